//! Optimality certificates for a uniform approximation.
//!
//! A degree-`m` polynomial is a best approximation exactly when the lifted
//! convex hulls `co{M(x) : x ∈ E⁺}` and `co{M(x) : x ∈ E⁻}` meet, i.e. when
//! there are convex weights `α` on `E⁺` and `β` on `E⁻` with
//! `Σ α_x x^e = Σ β_y y^e` for every monomial of degree at most `m`. That is
//! one LP feasibility problem. If it is infeasible, its Farkas multipliers
//! give a degree-`m` polynomial that is positive on `E⁺` and negative on
//! `E⁻`, a direction in which the approximation can be improved.

use log::warn;

use crate::error::{Error, Result};
use crate::fitting::{ExtremeSets, SampleSet};
use crate::linalg;
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::monomials::{FeatureMap, MonomialBasis, PolynomialModel};
use crate::scalar::Scalar;

/// Weight attached to a sample index.
#[derive(Clone, Debug, PartialEq)]
pub struct Weighted<T> {
    pub index: usize,
    pub weight: T,
}

/// Convex weights on `E⁺` and `E⁻` whose lifted averages coincide.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionCertificate<T> {
    pub degree: u32,
    pub plus: Vec<Weighted<T>>,
    pub minus: Vec<Weighted<T>>,
    /// Largest absolute mismatch over the matched moments and the two weight
    /// sums; exactly zero in rational arithmetic.
    pub moment_residual: T,
}

impl<T: Scalar> IntersectionCertificate<T> {
    pub fn support_size(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    /// Recomputes the moment residual from the sample coordinates.
    pub fn replay(&self, samples: &SampleSet<T>) -> Result<T> {
        let basis = MonomialBasis::build(samples.dimension(), self.degree)?;
        moment_residual(&basis, samples, &self.plus, &self.minus)
    }

    /// `true` when all weights are non-negative, both sides are non-empty and
    /// the replayed residual is within `tol`.
    pub fn is_valid(&self, samples: &SampleSet<T>, tol: &T) -> Result<bool> {
        if self.plus.is_empty() || self.minus.is_empty() {
            return Ok(false);
        }
        if self
            .plus
            .iter()
            .chain(&self.minus)
            .any(|w| w.weight.is_neg())
        {
            return Ok(false);
        }
        Ok(self.replay(samples)? <= *tol)
    }
}

fn moment_residual<T: Scalar>(
    basis: &MonomialBasis,
    samples: &SampleSet<T>,
    plus: &[Weighted<T>],
    minus: &[Weighted<T>],
) -> Result<T> {
    let k = basis.len();
    let mut diff = vec![T::zero(); k];
    let mut plus_sum = T::zero();
    let mut minus_sum = T::zero();
    for w in plus {
        let phi = basis.lift(samples.point(w.index))?;
        for (d, p) in diff.iter_mut().zip(phi) {
            *d = d.clone() + w.weight.clone() * p;
        }
        plus_sum = plus_sum + w.weight.clone();
    }
    for w in minus {
        let phi = basis.lift(samples.point(w.index))?;
        for (d, p) in diff.iter_mut().zip(phi) {
            *d = d.clone() - w.weight.clone() * p;
        }
        minus_sum = minus_sum + w.weight.clone();
    }
    let mut worst = T::max_of((plus_sum - T::one()).abs(), (minus_sum - T::one()).abs());
    for d in diff {
        worst = T::max_of(worst, d.abs());
    }
    Ok(worst)
}

/// A polynomial `L` with `L > 0` on `E⁺` and `L < 0` on `E⁻`, scaled so the
/// smaller of the two margins is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationWitness<T> {
    pub model: PolynomialModel<T>,
    /// `min L` over `E⁺` (`None` when `E⁺` is empty).
    pub min_plus: Option<T>,
    /// `max L` over `E⁻` (`None` when `E⁻` is empty).
    pub max_minus: Option<T>,
}

impl<T: Scalar> SeparationWitness<T> {
    /// Re-evaluates the polynomial and checks strict separation.
    pub fn separates(&self, extremes: &ExtremeSets<T>, samples: &SampleSet<T>) -> Result<bool> {
        for &i in &extremes.plus {
            if self.model.evaluate(samples.point(i))? <= T::zero() {
                return Ok(false);
            }
        }
        for &i in &extremes.minus {
            if self.model.evaluate(samples.point(i))? >= T::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Result of a hull-intersection test.
#[derive(Clone, Debug, PartialEq)]
pub enum HullVerdict<T> {
    Intersecting(IntersectionCertificate<T>),
    Separated(SeparationWitness<T>),
}

impl<T> HullVerdict<T> {
    pub fn is_intersecting(&self) -> bool {
        matches!(self, HullVerdict::Intersecting(_))
    }

    pub fn certificate(&self) -> Option<&IntersectionCertificate<T>> {
        match self {
            HullVerdict::Intersecting(c) => Some(c),
            HullVerdict::Separated(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&SeparationWitness<T>> {
        match self {
            HullVerdict::Intersecting(_) => None,
            HullVerdict::Separated(w) => Some(w),
        }
    }
}

// Scales `model` so that min over E⁺ is >= 1 and max over E⁻ is <= -1 with
// equality on the tighter side. `None` if it does not separate with a margin
// above tolerance relative to its largest coefficient.
fn normalize_witness<T: Scalar>(
    model: PolynomialModel<T>,
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
) -> Result<Option<SeparationWitness<T>>> {
    let eval = |idx: &[usize]| -> Result<Vec<T>> {
        idx.iter()
            .map(|&i| model.evaluate(samples.point(i)))
            .collect()
    };
    let plus_vals = eval(&extremes.plus)?;
    let minus_vals = eval(&extremes.minus)?;
    let min_plus = plus_vals.into_iter().reduce(T::min_of);
    let max_minus = minus_vals.into_iter().reduce(T::max_of);
    let margin = match (&min_plus, &max_minus) {
        (Some(p), Some(m)) => T::min_of(p.clone(), -m.clone()),
        (Some(p), None) => p.clone(),
        (None, Some(m)) => -m.clone(),
        (None, None) => return Ok(None),
    };
    let size = model
        .coefficients()
        .iter()
        .fold(T::zero(), |acc, c| T::max_of(acc, c.abs()));
    if size.is_zero() || !(margin.clone() / size).is_pos() {
        return Ok(None);
    }
    let factor = T::one() / margin;
    Ok(Some(SeparationWitness {
        model: model.scaled(&factor),
        min_plus: min_plus.map(|v| v * factor.clone()),
        max_minus: max_minus.map(|v| v * factor.clone()),
    }))
}

fn constant_witness<T: Scalar>(basis: MonomialBasis, positive: bool) -> SeparationWitness<T> {
    let mut c = vec![T::zero(); basis.len()];
    c[0] = if positive { T::one() } else { -T::one() };
    let model = PolynomialModel::new(basis, c).expect("coefficient count matches basis");
    if positive {
        SeparationWitness {
            model,
            min_plus: Some(T::one()),
            max_minus: None,
        }
    } else {
        SeparationWitness {
            model,
            min_plus: None,
            max_minus: Some(-T::one()),
        }
    }
}

/// Tests whether the degree-`degree` lifted hulls of `E⁺` and `E⁻` intersect.
pub fn check_hull_intersection<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
) -> Result<HullVerdict<T>> {
    extremes.check_indices(samples)?;
    if extremes.is_empty() {
        return Err(Error::EmptyExtremeSets);
    }
    let basis = MonomialBasis::build(samples.dimension(), degree)?;
    if extremes.minus.is_empty() {
        return Ok(HullVerdict::Separated(constant_witness(basis, true)));
    }
    if extremes.plus.is_empty() {
        return Ok(HullVerdict::Separated(constant_witness(basis, false)));
    }

    let np = extremes.plus.len();
    let nm = extremes.minus.len();
    let k = basis.len();
    let lift_all = |idx: &[usize]| -> Result<Vec<Vec<T>>> {
        idx.iter().map(|&i| basis.lift(samples.point(i))).collect()
    };
    let plus_lift = lift_all(&extremes.plus)?;
    let minus_lift = lift_all(&extremes.minus)?;

    // variables α (np) then β (nm); rows: Σα = 1, Σβ = 1, matched moments
    let mut lp = LinearProgram::new(np + nm);
    let mut row = vec![T::one(); np];
    row.extend(std::iter::repeat_n(T::zero(), nm));
    lp.add_constraint(row, Relation::Eq, T::one());
    let mut row = vec![T::zero(); np];
    row.extend(std::iter::repeat_n(T::one(), nm));
    lp.add_constraint(row, Relation::Eq, T::one());
    for r in 1..k {
        let mut row: Vec<T> = plus_lift.iter().map(|phi| phi[r].clone()).collect();
        row.extend(minus_lift.iter().map(|phi| -phi[r].clone()));
        lp.add_constraint(row, Relation::Eq, T::zero());
    }
    let solution = lp.solve()?;
    match solution.status {
        LpStatus::Optimal => {
            let plus = collect_weights(&extremes.plus, &solution.x[..np]);
            let minus = collect_weights(&extremes.minus, &solution.x[np..]);
            let moment_residual = moment_residual(&basis, samples, &plus, &minus)?;
            Ok(HullVerdict::Intersecting(IntersectionCertificate {
                degree,
                plus,
                minus,
                moment_residual,
            }))
        }
        LpStatus::Infeasible => {
            let y = solution
                .farkas
                .expect("infeasible solution carries multipliers");
            // y = (s, t, c_1..c_n): s + P(x) <= 0 on E⁺, t - P(y) <= 0 on E⁻, s + t > 0
            let two = T::one() + T::one();
            let mut coeffs = Vec::with_capacity(k);
            coeffs.push(-(y[0].clone() - y[1].clone()) / two);
            coeffs.extend(y[2..].iter().map(|c| -c.clone()));
            let model = PolynomialModel::new(basis, coeffs)?;
            if let Some(w) = normalize_witness(model, extremes, samples)? {
                return Ok(HullVerdict::Separated(w));
            }
            warn!("Farkas multipliers did not separate after rounding; solving the isolation LP");
            match check_isolability(extremes, samples, degree)?.witness {
                Some(w) => Ok(HullVerdict::Separated(w)),
                None => Err(Error::Lp(
                    "hull LP is infeasible but no separating polynomial clears the tolerance; \
                     the extreme sets are numerically borderline"
                        .into(),
                )),
            }
        }
        LpStatus::Unbounded => unreachable!("feasibility LP has a zero objective"),
    }
}

fn collect_weights<T: Scalar>(indices: &[usize], x: &[T]) -> Vec<Weighted<T>> {
    let mut out: Vec<Weighted<T>> = indices
        .iter()
        .zip(x)
        .filter(|(_, w)| {
            if T::EXACT {
                w.is_pos()
            } else {
                w.as_f64() > 1e-15
            }
        })
        .map(|(&index, w)| Weighted {
            index,
            weight: w.clone(),
        })
        .collect();
    if !T::EXACT {
        let total = out.iter().fold(T::zero(), |acc, w| acc + w.weight.clone());
        for w in &mut out {
            w.weight = w.weight.clone() / total.clone();
        }
    }
    out
}

/// Hull test in the original coordinates (degree 1).
pub fn check_linear_case<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
) -> Result<HullVerdict<T>> {
    check_hull_intersection(extremes, samples, 1)
}

/// Shrinks a certificate to at most `n + 2` support points (`n` non-constant
/// monomials) by repeatedly removing an affine dependence.
pub fn caratheodory_reduce<T: Scalar>(
    cert: &IntersectionCertificate<T>,
    samples: &SampleSet<T>,
) -> Result<IntersectionCertificate<T>> {
    let basis = MonomialBasis::build(samples.dimension(), cert.degree)?;
    let n = basis.non_constant_count();
    let limit = n + 2;
    if cert.support_size() <= limit {
        return Ok(cert.clone());
    }

    // one column per support entry: (±φ_1..±φ_n, [plus], [minus])
    let mut entries: Vec<(bool, usize, T)> = cert
        .plus
        .iter()
        .map(|w| (true, w.index, w.weight.clone()))
        .chain(
            cert.minus
                .iter()
                .map(|w| (false, w.index, w.weight.clone())),
        )
        .collect();
    let column = |(is_plus, idx, _): &(bool, usize, T)| -> Result<Vec<T>> {
        let phi = basis.lift(samples.point(*idx))?;
        let sign = if *is_plus { T::one() } else { -T::one() };
        let mut col: Vec<T> = phi[1..].iter().map(|v| sign.clone() * v.clone()).collect();
        col.push(if *is_plus { T::one() } else { T::zero() });
        col.push(if *is_plus { T::zero() } else { T::one() });
        Ok(col)
    };

    while entries.len() > limit {
        let cols: Vec<Vec<T>> = entries.iter().map(&column).collect::<Result<_>>()?;
        let rows: Vec<Vec<T>> = (0..n + 2)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let Some(mut v) = linalg::nullspace(&rows, entries.len()).into_iter().next() else {
            warn!(
                "no affine dependence found among {} support points",
                entries.len()
            );
            return Ok(cert.clone());
        };
        if !v.iter().any(Scalar::is_pos) {
            v = v.into_iter().map(|x| -x).collect();
        }
        let mut best: Option<(usize, T)> = None;
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_pos() {
                continue;
            }
            let ratio = entries[i].2.clone() / vi.clone();
            if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                best = Some((i, ratio));
            }
        }
        let Some((drop, step)) = best else {
            warn!("degenerate dependence vector during support reduction");
            return Ok(cert.clone());
        };
        for (e, vi) in entries.iter_mut().zip(&v) {
            e.2 = e.2.clone() - step.clone() * vi.clone();
        }
        entries[drop].2 = T::zero();
        entries.retain(|e| {
            if T::EXACT {
                e.2.is_pos()
            } else {
                e.2 > T::zero()
            }
        });
    }

    let mut plus: Vec<Weighted<T>> = Vec::new();
    let mut minus: Vec<Weighted<T>> = Vec::new();
    for (is_plus, index, weight) in entries {
        let w = Weighted { index, weight };
        if is_plus {
            plus.push(w);
        } else {
            minus.push(w);
        }
    }
    if !T::EXACT {
        for side in [&mut plus, &mut minus] {
            let total = side.iter().fold(T::zero(), |acc, w| acc + w.weight.clone());
            for w in side.iter_mut() {
                w.weight = w.weight.clone() / total.clone();
            }
        }
    }
    let residual = moment_residual(&basis, samples, &plus, &minus)?;
    let allowed = T::max_of(cert.moment_residual.clone(), T::from_f64(1e-9));
    if plus.is_empty() || minus.is_empty() || residual > allowed {
        warn!("support reduction lost accuracy (residual {residual}); keeping the input");
        return Ok(cert.clone());
    }
    Ok(IntersectionCertificate {
        degree: cert.degree,
        plus,
        minus,
        moment_residual: residual,
    })
}

/// Outcome of the strict-separation LP.
#[derive(Clone, Debug, PartialEq)]
pub struct Isolability<T> {
    pub isolable: bool,
    /// Optimal margin `t` under `‖A‖∞ <= 1`.
    pub margin: T,
    pub witness: Option<SeparationWitness<T>>,
}

/// Decides whether some degree-`degree` polynomial is positive on `E⁺` and
/// negative on `E⁻`: maximize `t` subject to `L(A,x) >= t` on `E⁺`,
/// `L(A,x) <= -t` on `E⁻` and `‖A‖∞ <= 1`.
pub fn check_isolability<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
) -> Result<Isolability<T>> {
    extremes.check_indices(samples)?;
    if extremes.is_empty() {
        return Err(Error::EmptyExtremeSets);
    }
    let basis = MonomialBasis::build(samples.dimension(), degree)?;
    let k = basis.len();
    let mut lp = LinearProgram::new(k + 1);
    for j in 0..k {
        lp.set_bounds(j, Some(-T::one()), Some(T::one()));
    }
    lp.set_objective_coeff(k, -T::one());
    for &i in &extremes.plus {
        let mut row = basis.lift(samples.point(i))?;
        row.push(-T::one());
        lp.add_constraint(row, Relation::Ge, T::zero());
    }
    for &i in &extremes.minus {
        let mut row = basis.lift(samples.point(i))?;
        row.push(T::one());
        lp.add_constraint(row, Relation::Le, T::zero());
    }
    let solution = lp.solve()?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Lp(format!(
            "isolation LP ended {:?}",
            solution.status
        )));
    }
    let margin = solution.x[k].clone();
    if !margin.is_pos() {
        return Ok(Isolability {
            isolable: false,
            margin,
            witness: None,
        });
    }
    let model = PolynomialModel::new(basis, solution.x[..k].to_vec())?;
    let witness = normalize_witness(model, extremes, samples)?;
    Ok(Isolability {
        isolable: witness.is_some(),
        margin,
        witness,
    })
}

/// Greedily shrinks a non-isolable extreme set to a critical point set: one
/// that is not isolable but becomes isolable when any single point is
/// removed. Points are tried in increasing index order. Returns `None` if
/// the input is already isolable.
pub fn find_critical_point_set<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
) -> Result<Option<ExtremeSets<T>>> {
    if check_isolability(extremes, samples, degree)?.isolable {
        return Ok(None);
    }
    let mut current = extremes.clone();
    for idx in extremes.union() {
        let candidate = ExtremeSets {
            plus: current.plus.iter().copied().filter(|&i| i != idx).collect(),
            minus: current
                .minus
                .iter()
                .copied()
                .filter(|&i| i != idx)
                .collect(),
            ..current.clone()
        };
        if candidate.is_empty() {
            continue;
        }
        if !check_isolability(&candidate, samples, degree)?.isolable {
            current = candidate;
        }
    }
    Ok(Some(current))
}
