//! Best uniform approximation on a finite sample set.
//!
//! The minimax problem `min_A max_i |f(x_i) - L(A, x_i)|` is solved through
//! its LP dual
//!
//! ```text
//!   maximize  Σ f_i (p_i - q_i)
//!   s.t.      Σ (p_i - q_i) φ(x_i) = 0,   Σ (p_i + q_i) = 1,   p, q >= 0
//! ```
//!
//! which has only `n + 2` rows however many samples there are. The simplex
//! multipliers of the final basis are the coefficients `A` and the error
//! level.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::monomials::{FeatureMap, MonomialBasis, PolynomialModel};
use crate::scalar::Scalar;

/// Default relative band used to collect maximal-deviation points.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

const DUPLICATE_TOL: f64 = 1e-12;

/// Finite point set with target values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<T> {
    dimension: usize,
    points: Vec<Vec<T>>,
    values: Vec<T>,
}

impl<T: Scalar> SampleSet<T> {
    pub fn new(points: Vec<Vec<T>>, values: Vec<T>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("sample set is empty".into()));
        };
        let dimension = first.len();
        if dimension == 0 {
            return Err(Error::InvalidArgument(
                "points must have at least one coordinate".into(),
            ));
        }
        if values.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if let Some(p) = points.iter().find(|p| p.len() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: p.len(),
            });
        }
        if let Some((first, second)) = find_duplicate(&points) {
            return Err(Error::DuplicatePoint { first, second });
        }
        Ok(Self {
            dimension,
            points,
            values,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Residuals `f(x_i) - L(A, x_i)`.
    pub fn residuals(&self, model: &PolynomialModel<T>) -> Result<Vec<T>> {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, f)| Ok(f.clone() - model.evaluate(p)?))
            .collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SampleSet<U> {
        SampleSet {
            dimension: self.dimension,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(&f).collect())
                .collect(),
            values: self.values.iter().map(&f).collect(),
        }
    }
}

// sweep over points sorted by their first coordinate
fn find_duplicate<T: Scalar>(points: &[Vec<T>]) -> Option<(usize, usize)> {
    let approx: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().map(Scalar::as_f64).collect())
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| approx[a][0].total_cmp(&approx[b][0]));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if approx[j][0] - approx[i][0] > DUPLICATE_TOL {
                break;
            }
            let close = if T::EXACT {
                points[i] == points[j]
            } else {
                approx[i]
                    .iter()
                    .zip(&approx[j])
                    .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL)
            };
            if close {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub model: PolynomialModel<T>,
    /// Uniform error, `max |residual|`.
    pub psi: T,
    pub residuals: Vec<T>,
}

/// Best uniform approximation of degree `degree` on `samples`.
pub fn fit_minimax<T: Scalar>(samples: &SampleSet<T>, degree: u32) -> Result<FitResult<T>> {
    let basis = MonomialBasis::build(samples.dimension(), degree)?;
    if basis.len() > samples.len() {
        warn!(
            "basis of size {} exceeds the {} sample points; the fit interpolates",
            basis.len(),
            samples.len()
        );
    }
    let coefficients = fit_with_features(samples, &basis)?;
    let model = PolynomialModel::new(basis, coefficients)?;
    let residuals = samples.residuals(&model)?;
    let psi = residuals
        .iter()
        .fold(T::zero(), |acc, r| T::max_of(acc, r.abs()));
    Ok(FitResult {
        model,
        psi,
        residuals,
    })
}

/// Minimax coefficients over an arbitrary feature map.
///
/// The simplex solution is polished by re-solving its reference, the `k + 1`
/// support points of the dual, as a square system. In exact mode the dual is
/// first solved in floating point and the proposed reference is certified in
/// rationals; the exact simplex only runs when that check fails.
pub fn fit_with_features<T: Scalar, F: FeatureMap>(
    samples: &SampleSet<T>,
    features: &F,
) -> Result<Vec<T>> {
    let lifted: Vec<Vec<T>> = samples
        .points()
        .iter()
        .map(|p| features.lift(p))
        .collect::<Result<_>>()?;
    let values = samples.values();
    let k = features.len();

    if T::EXACT {
        let approx: Vec<Vec<f64>> = lifted
            .iter()
            .map(|row| row.iter().map(Scalar::as_f64).collect())
            .collect();
        let approx_values: Vec<f64> = values.iter().map(Scalar::as_f64).collect();
        if let Ok(sol) = solve_dual(&approx, &approx_values) {
            if let Some(a) = reference_of(&sol.x, k).and_then(|r| exchange(&lifted, values, r)) {
                return Ok(a);
            }
        }
        debug!("floating-point reference not certified; solving the exact dual");
        let sol = solve_dual(&lifted, values)?;
        return Ok(sol.duals[..k].iter().map(|y| -y.clone()).collect());
    }

    let sol = solve_dual(&lifted, values)?;
    // multipliers of the moment rows are -A
    let simplex: Vec<T> = sol.duals[..k].iter().map(|y| -y.clone()).collect();
    let polished = reference_of(&sol.x, k).and_then(|r| exchange(&lifted, values, r));
    match polished {
        Some(a) if max_residual(&lifted, values, &a) <= max_residual(&lifted, values, &simplex) => {
            Ok(a)
        }
        _ => Ok(simplex),
    }
}

fn solve_dual<T: Scalar>(lifted: &[Vec<T>], values: &[T]) -> Result<crate::lp::LpSolution<T>> {
    let n = lifted.len();
    let k = lifted.first().map_or(0, Vec::len);
    // columns: p_0..p_{n-1}, q_0..q_{n-1}
    let mut lp = LinearProgram::new(2 * n);
    let mut objective = Vec::with_capacity(2 * n);
    objective.extend(values.iter().map(|f| -f.clone()));
    objective.extend(values.iter().cloned());
    lp.set_objective(objective);
    for r in 0..k {
        let mut row = Vec::with_capacity(2 * n);
        row.extend(lifted.iter().map(|phi| phi[r].clone()));
        row.extend(lifted.iter().map(|phi| -phi[r].clone()));
        lp.add_constraint(row, Relation::Eq, T::zero());
    }
    lp.add_constraint(vec![T::one(); 2 * n], Relation::Eq, T::one());

    let solution = lp.solve()?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Lp(format!(
            "minimax dual ended {:?} ({} samples, {} basis functions); the sample \
             coordinates may be badly scaled for this degree",
            solution.status, n, k
        )));
    }
    Ok(solution)
}

// Support of a dual solution as (index, residual sign is positive); `None`
// unless it has exactly k + 1 points.
fn reference_of<T: Scalar>(x: &[T], k: usize) -> Option<Vec<(usize, bool)>> {
    let n = x.len() / 2;
    let reference: Vec<(usize, bool)> = (0..n)
        .filter(|&i| x[i].as_f64() + x[n + i].as_f64() > 1e-12)
        .map(|i| (i, x[i] > x[n + i]))
        .collect();
    (reference.len() == k + 1).then_some(reference)
}

/// Solves `f_i - L(A, x_i) = σ_i h` on the reference together with the dual
/// weights `λ` (`Σ λ_i σ_i φ(x_i) = 0`, `Σ λ_i = 1`). Returns `(A, h, λ)`.
fn solve_reference<T: Scalar>(
    lifted: &[Vec<T>],
    values: &[T],
    reference: &[(usize, bool)],
) -> Option<(Vec<T>, T, Vec<T>)> {
    let sign = |s: bool| if s { T::one() } else { -T::one() };
    let m: Vec<Vec<T>> = reference
        .iter()
        .map(|&(i, s)| {
            let mut row = lifted[i].clone();
            row.push(sign(s));
            row
        })
        .collect();
    let rhs: Vec<T> = reference.iter().map(|&(i, _)| values[i].clone()).collect();
    let mut a = linalg::solve(&m, &rhs)?;
    let h = a.pop()?;
    // Mᵀ μ = e_last with μ_i = σ_i λ_i
    let size = m.len();
    let mt: Vec<Vec<T>> = (0..size)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect();
    let mut e = vec![T::zero(); size];
    e[size - 1] = T::one();
    let mu = linalg::solve(&mt, &e)?;
    let lambda = mu
        .into_iter()
        .zip(reference)
        .map(|(v, &(_, s))| v * sign(s))
        .collect();
    Some((a, h, lambda))
}

// Single-point exchange from a starting reference: simplex steps on the dual
// restricted to k + 1 columns. Stops, certified, once no residual exceeds h
// while the dual weights stay non-negative.
fn exchange<T: Scalar>(
    lifted: &[Vec<T>],
    values: &[T],
    mut reference: Vec<(usize, bool)>,
) -> Option<Vec<T>> {
    let scale = values
        .iter()
        .fold(T::one(), |acc, f| T::max_of(acc, f.abs()));
    let tol = if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-14) * scale
    };
    let sign = |s: bool| if s { T::one() } else { -T::one() };
    for _ in 0..100 + 4 * lifted.len() {
        let (a, h, lambda) = solve_reference(lifted, values, &reference)?;
        if lambda.iter().any(Scalar::is_neg) {
            return None;
        }
        let (j, r) = lifted
            .iter()
            .zip(values)
            .map(|(phi, f)| {
                f.clone()
                    - phi
                        .iter()
                        .zip(&a)
                        .fold(T::zero(), |s, (p, c)| s + p.clone() * c.clone())
            })
            .enumerate()
            .fold((0, T::zero()), |best, (i, r)| {
                if r.abs() > best.1.abs() {
                    (i, r)
                } else {
                    best
                }
            });
        if r.abs() - h <= tol {
            return Some(a);
        }
        // entering column (s φ(x_j), 1) against the reference columns
        let s_j = r.is_pos();
        let size = reference.len();
        let basis: Vec<Vec<T>> = (0..size)
            .map(|row| {
                reference
                    .iter()
                    .map(|&(i, s)| {
                        if row + 1 == size {
                            T::one()
                        } else {
                            sign(s) * lifted[i][row].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut column: Vec<T> = lifted[j].iter().map(|v| sign(s_j) * v.clone()).collect();
        column.push(T::one());
        let d = linalg::solve(&basis, &column)?;
        let leave = (0..size)
            .filter(|&i| d[i].is_pos())
            .map(|i| (i, lambda[i].clone() / d[i].clone()))
            .reduce(|best, cand| if cand.1 < best.1 { cand } else { best })?
            .0;
        reference[leave] = (j, s_j);
    }
    None
}

fn max_residual<T: Scalar>(lifted: &[Vec<T>], values: &[T], a: &[T]) -> T {
    lifted.iter().zip(values).fold(T::zero(), |acc, (phi, f)| {
        let l = phi
            .iter()
            .zip(a)
            .fold(T::zero(), |s, (p, c)| s + p.clone() * c.clone());
        T::max_of(acc, (f.clone() - l).abs())
    })
}

/// `Ψ(A) = max_i |f(x_i) - L(A, x_i)|`.
pub fn compute_psi<T: Scalar>(model: &PolynomialModel<T>, samples: &SampleSet<T>) -> Result<T> {
    if model.basis().dimension() != samples.dimension() {
        return Err(Error::DimensionMismatch {
            expected: samples.dimension(),
            found: model.basis().dimension(),
        });
    }
    Ok(samples
        .residuals(model)?
        .iter()
        .fold(T::zero(), |acc, r| T::max_of(acc, r.abs())))
}

/// Maximal-deviation points split by residual sign.
///
/// `plus` holds points with `f - L >= (1 - rel_tol) psi`, `minus` those with
/// `L - f >= (1 - rel_tol) psi`. When `psi` is below the absolute tolerance
/// the fit is exact, `degenerate` is set and both lists hold every point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeSets<T> {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub psi: T,
    pub rel_tol: f64,
    pub degenerate: bool,
}

impl<T: Scalar> ExtremeSets<T> {
    /// Extreme sets given directly by index lists, e.g. a subset of a fit's
    /// extremes.
    pub fn from_indices(plus: Vec<usize>, minus: Vec<usize>, psi: T) -> Self {
        Self {
            plus,
            minus,
            psi,
            rel_tol: 0.0,
            degenerate: false,
        }
    }

    /// Union of both lists, sorted and deduplicated.
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.plus.iter().chain(&self.minus).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    pub(crate) fn check_indices(&self, samples: &SampleSet<T>) -> Result<()> {
        match self
            .plus
            .iter()
            .chain(&self.minus)
            .find(|&&i| i >= samples.len())
        {
            Some(&i) => Err(Error::InvalidArgument(format!(
                "extreme index {i} out of range for {} samples",
                samples.len()
            ))),
            None => Ok(()),
        }
    }
}

pub fn extreme_sets<T: Scalar>(
    model: &PolynomialModel<T>,
    samples: &SampleSet<T>,
    rel_tol: f64,
) -> Result<ExtremeSets<T>> {
    if !(0.0..0.5).contains(&rel_tol) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol {rel_tol} outside [0, 0.5)"
        )));
    }
    let residuals = samples.residuals(model)?;
    let psi = residuals
        .iter()
        .fold(T::zero(), |acc, r| T::max_of(acc, r.abs()));
    if psi <= T::psi_tol() {
        let all: Vec<usize> = (0..samples.len()).collect();
        return Ok(ExtremeSets {
            plus: all.clone(),
            minus: all,
            psi,
            rel_tol,
            degenerate: true,
        });
    }
    let threshold = psi.clone() * (T::one() - T::from_f64(rel_tol));
    let plus = (0..residuals.len())
        .filter(|&i| residuals[i] >= threshold)
        .collect();
    let minus = (0..residuals.len())
        .filter(|&i| -residuals[i].clone() >= threshold)
        .collect();
    Ok(ExtremeSets {
        plus,
        minus,
        psi,
        rel_tol,
        degenerate: false,
    })
}

/// Length of the longest sign-alternating subsequence of the extreme points
/// sorted by their (single) coordinate.
pub fn count_alternations<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
) -> Result<usize> {
    if samples.dimension() != 1 {
        return Err(Error::UnsupportedDimension(samples.dimension()));
    }
    extremes.check_indices(samples)?;
    if extremes.degenerate {
        // every point may take either sign
        return Ok(extremes.union().len());
    }
    let mut signed: Vec<(T, bool)> = extremes
        .plus
        .iter()
        .map(|&i| (samples.point(i)[0].clone(), true))
        .chain(
            extremes
                .minus
                .iter()
                .map(|&i| (samples.point(i)[0].clone(), false)),
        )
        .collect();
    signed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    // number of maximal runs of equal sign
    let mut runs = 0;
    let mut last: Option<bool> = None;
    for (_, s) in signed {
        if last != Some(s) {
            runs += 1;
            last = Some(s);
        }
    }
    Ok(runs)
}
