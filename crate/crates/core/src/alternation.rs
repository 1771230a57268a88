//! Hyperplane generalization of the alternation test.
//!
//! A hyperplane `⟨u,x⟩ = a` splits the extreme points into two half-spaces
//! and the plane itself. Flipping the deviation sign of the points in the
//! negative half-space turns a degree-`m` separation question into a
//! degree-`m - 1` one: if some `Q` of degree `m - 1` separates the flipped
//! sets and some `R` of degree `m` separates the on-plane points, then
//! `(⟨u,x⟩ - a)·Q + εR` separates `E⁺` from `E⁻`. Optimality is therefore
//! equivalent to every plane through `d` affinely independent extreme points
//! leaving one of the two conditions unseparable.

use std::collections::HashSet;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{ExtremeSets, SampleSet};
use crate::linalg;
use crate::optimality::{check_hull_intersection, check_linear_case};
use crate::reduction::Verdict;
use crate::scalar::Scalar;

/// Distance below which a point counts as lying on the plane.
pub const PLANE_TOL: f64 = 1e-9;

/// Extreme indices classified against a hyperplane.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneSplit<T> {
    /// Unit normal (2-norm in floating point, max-norm in exact arithmetic).
    pub normal: Vec<T>,
    pub offset: T,
    /// `(E⁺ ∩ H⁺) ∪ (E⁻ ∩ H⁻)`
    pub plus_side: Vec<usize>,
    /// `(E⁻ ∩ H⁺) ∪ (E⁺ ∩ H⁻)`
    pub minus_side: Vec<usize>,
    pub on_plane_plus: Vec<usize>,
    pub on_plane_minus: Vec<usize>,
}

fn normalize<T: Scalar>(u: &[T], a: &T) -> Result<(Vec<T>, T)> {
    let inf = u.iter().fold(T::zero(), |acc, v| T::max_of(acc, v.abs()));
    if !inf.is_pos() || (!T::EXACT && inf.near_zero()) {
        return Err(Error::InvalidArgument(
            "hyperplane normal must be non-zero".into(),
        ));
    }
    // scale by the max-norm first so the 2-norm cannot overflow
    let u: Vec<T> = u.iter().map(|v| v.clone() / inf.clone()).collect();
    let a = a.clone() / inf;
    let sq = u
        .iter()
        .fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
    match sq.sqrt() {
        Some(norm) => Ok((
            u.iter().map(|v| v.clone() / norm.clone()).collect(),
            a / norm,
        )),
        None => Ok((u, a)),
    }
}

/// Classifies the extreme points against `⟨u,x⟩ = a`.
pub fn split<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    u: &[T],
    a: &T,
) -> Result<HyperplaneSplit<T>> {
    if u.len() != samples.dimension() {
        return Err(Error::DimensionMismatch {
            expected: samples.dimension(),
            found: u.len(),
        });
    }
    extremes.check_indices(samples)?;
    let (normal, offset) = normalize(u, a)?;
    let tol = if T::EXACT {
        T::zero()
    } else {
        T::from_f64(PLANE_TOL)
    };
    let side = |i: usize| -> i8 {
        let p = samples.point(i);
        let v = normal
            .iter()
            .zip(p)
            .fold(-offset.clone(), |acc, (n, x)| acc + n.clone() * x.clone());
        if v > tol {
            1
        } else if v < -tol.clone() {
            -1
        } else {
            0
        }
    };
    let mut out = HyperplaneSplit {
        normal: normal.clone(),
        offset: offset.clone(),
        plus_side: Vec::new(),
        minus_side: Vec::new(),
        on_plane_plus: Vec::new(),
        on_plane_minus: Vec::new(),
    };
    for &i in &extremes.plus {
        match side(i) {
            1 => out.plus_side.push(i),
            -1 => out.minus_side.push(i),
            _ => out.on_plane_plus.push(i),
        }
    }
    for &i in &extremes.minus {
        match side(i) {
            1 => out.minus_side.push(i),
            -1 => out.plus_side.push(i),
            _ => out.on_plane_minus.push(i),
        }
    }
    for list in [&mut out.plus_side, &mut out.minus_side] {
        list.sort_unstable();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Holds,
    Fails,
    /// One of the two sets is empty, so a constant already separates them.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitVia {
    DegreeReduction,
    PointElimination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitCondition {
    pub holds: bool,
    pub via: Option<SplitVia>,
    pub degree_reduction: ConditionStatus,
    pub point_elimination: ConditionStatus,
}

/// How the degree-`m - 1` condition is decided.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recursion {
    /// Certificate LP at degree `m - 1`.
    #[default]
    One,
    /// Apply the hyperplane test again at each lower degree. The number of
    /// planes grows combinatorially; meant for small univariate inputs.
    Full,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HyperplaneOptions {
    pub recursion: Recursion,
}

fn sub_extremes<T: Scalar>(
    base: &ExtremeSets<T>,
    plus: &[usize],
    minus: &[usize],
) -> ExtremeSets<T> {
    ExtremeSets {
        plus: plus.to_vec(),
        minus: minus.to_vec(),
        ..base.clone()
    }
}

fn hulls_meet<T: Scalar>(
    base: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    plus: &[usize],
    minus: &[usize],
    degree: u32,
    options: &HyperplaneOptions,
) -> Result<ConditionStatus> {
    if plus.is_empty() || minus.is_empty() {
        return Ok(ConditionStatus::NotApplicable);
    }
    let sets = sub_extremes(base, plus, minus);
    let meet = match options.recursion {
        Recursion::Full if degree >= 2 => {
            verify_by_hyperplanes(&sets, samples, degree, options)?.verdict == Verdict::Pass
        }
        _ => check_hull_intersection(&sets, samples, degree)?.is_intersecting(),
    };
    Ok(if meet {
        ConditionStatus::Holds
    } else {
        ConditionStatus::Fails
    })
}

/// Evaluates the degree-reduction and point-elimination conditions for one
/// split. Holds iff at least one of them holds.
pub fn check_split_condition<T: Scalar>(
    split: &HyperplaneSplit<T>,
    samples: &SampleSet<T>,
    degree: u32,
) -> Result<SplitCondition> {
    check_split_condition_with(split, samples, degree, &HyperplaneOptions::default())
}

fn check_split_condition_with<T: Scalar>(
    split: &HyperplaneSplit<T>,
    samples: &SampleSet<T>,
    degree: u32,
    options: &HyperplaneOptions,
) -> Result<SplitCondition> {
    if degree == 0 {
        return Err(Error::InvalidArgument(
            "split condition needs degree >= 1".into(),
        ));
    }
    let base = ExtremeSets::from_indices(Vec::new(), Vec::new(), T::zero());
    let degree_reduction = hulls_meet(
        &base,
        samples,
        &split.plus_side,
        &split.minus_side,
        degree - 1,
        options,
    )?;
    // evaluated even when the first condition holds so reports show both
    let point_elimination = hulls_meet(
        &base,
        samples,
        &split.on_plane_plus,
        &split.on_plane_minus,
        degree,
        options,
    )?;
    let via = if degree_reduction == ConditionStatus::Holds {
        Some(SplitVia::DegreeReduction)
    } else if point_elimination == ConditionStatus::Holds {
        Some(SplitVia::PointElimination)
    } else {
        None
    };
    Ok(SplitCondition {
        holds: via.is_some(),
        via,
        degree_reduction,
        point_elimination,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneOutcome<T> {
    pub verdict: Verdict,
    /// First split for which neither condition holds.
    pub counterexample: Option<HyperplaneSplit<T>>,
    pub planes_checked: usize,
    pub warnings: Vec<String>,
}

/// Checks every hyperplane through `d` affinely independent extreme points.
///
/// When all extreme points lie in a lower-dimensional affine subspace, the
/// test runs in affine coordinates of that subspace instead.
pub fn verify_by_hyperplanes<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
    options: &HyperplaneOptions,
) -> Result<HyperplaneOutcome<T>> {
    if degree == 0 {
        return Err(Error::InvalidArgument(
            "hyperplane test needs degree >= 1".into(),
        ));
    }
    extremes.check_indices(samples)?;
    if extremes.is_empty() {
        return Err(Error::EmptyExtremeSets);
    }
    let mut outcome = HyperplaneOutcome {
        verdict: Verdict::Pass,
        counterexample: None,
        planes_checked: 0,
        warnings: Vec::new(),
    };
    if extremes.plus.is_empty() || extremes.minus.is_empty() {
        outcome.verdict = Verdict::Fail;
        outcome
            .warnings
            .push("one extreme set is empty; a constant separates them".into());
        return Ok(outcome);
    }
    if degree == 1 {
        if !check_linear_case(extremes, samples)?.is_intersecting() {
            outcome.verdict = Verdict::Fail;
        }
        return Ok(outcome);
    }

    let union = extremes.union();
    let d = samples.dimension();
    let origin = samples.point(union[0]);
    let mut diffs: Vec<Vec<T>> = union[1..]
        .iter()
        .map(|&i| {
            samples
                .point(i)
                .iter()
                .zip(origin)
                .map(|(p, o)| p.clone() - o.clone())
                .collect()
        })
        .collect();
    let pivots = if diffs.is_empty() {
        Vec::new()
    } else {
        linalg::rref(&mut diffs)
    };
    if pivots.len() < d {
        return verify_in_affine_hull(extremes, samples, degree, options, &union, &pivots);
    }

    let mut seen: HashSet<Vec<String>> = HashSet::new();
    for subset in Combinations::new(union.len(), d) {
        let pts: Vec<&[T]> = subset.iter().map(|&k| samples.point(union[k])).collect();
        let Some((u, a)) = plane_through(&pts) else {
            continue;
        };
        let (u, a) = canonical(&u, &a)?;
        if !seen.insert(plane_key(&u, &a)) {
            continue;
        }
        let s = split(extremes, samples, &u, &a)?;
        let cond = check_split_condition_with(&s, samples, degree, options)?;
        outcome.planes_checked += 1;
        if !cond.holds {
            debug!(
                "hyperplane {:?} = {} fails both conditions",
                s.normal, s.offset
            );
            outcome.verdict = Verdict::Fail;
            outcome.counterexample = Some(s);
            break;
        }
    }
    Ok(outcome)
}

// Runs the test on the pivot coordinates of the affine hull, which map that
// hull bijectively onto a lower-dimensional space.
fn verify_in_affine_hull<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
    options: &HyperplaneOptions,
    union: &[usize],
    pivots: &[usize],
) -> Result<HyperplaneOutcome<T>> {
    let d = samples.dimension();
    let note = format!(
        "extreme points span an affine subspace of dimension {} < {d}; testing in that subspace",
        pivots.len()
    );
    warn!("{note}");
    if pivots.is_empty() {
        // a single point carrying both signs
        return Ok(HyperplaneOutcome {
            verdict: Verdict::Pass,
            counterexample: None,
            planes_checked: 0,
            warnings: vec![note],
        });
    }
    let position = |i: usize| {
        union
            .iter()
            .position(|&u| u == i)
            .expect("index is in the union")
    };
    let points: Vec<Vec<T>> = union
        .iter()
        .map(|&i| {
            pivots
                .iter()
                .map(|&c| samples.point(i)[c].clone())
                .collect()
        })
        .collect();
    let reduced = SampleSet::new(points, vec![T::zero(); union.len()])?;
    let sets = ExtremeSets {
        plus: extremes.plus.iter().map(|&i| position(i)).collect(),
        minus: extremes.minus.iter().map(|&i| position(i)).collect(),
        ..extremes.clone()
    };
    let inner = verify_by_hyperplanes(&sets, &reduced, degree, options)?;
    let counterexample = match inner.counterexample {
        Some(c) => {
            let mut u = vec![T::zero(); d];
            for (k, &col) in pivots.iter().enumerate() {
                u[col] = c.normal[k].clone();
            }
            // the pivot coordinates already determine position inside the hull
            Some(split(extremes, samples, &u, &c.offset)?)
        }
        None => None,
    };
    let mut warnings = vec![note];
    warnings.extend(inner.warnings);
    Ok(HyperplaneOutcome {
        verdict: inner.verdict,
        counterexample,
        planes_checked: inner.planes_checked,
        warnings,
    })
}

// Plane through `d` points in R^d, or `None` if they are affinely dependent.
fn plane_through<T: Scalar>(pts: &[&[T]]) -> Option<(Vec<T>, T)> {
    let d = pts.len();
    let rows: Vec<Vec<T>> = pts
        .iter()
        .map(|p| {
            let mut r = p.to_vec();
            r.push(-T::one());
            r
        })
        .collect();
    let null = linalg::nullspace(&rows, d + 1);
    if null.len() != 1 {
        return None;
    }
    let v = null.into_iter().next().unwrap();
    if v[..d].iter().all(Scalar::near_zero) {
        return None;
    }
    let diffs: Vec<Vec<T>> = pts[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(pts[0])
                .map(|(a, b)| a.clone() - b.clone())
                .collect()
        })
        .collect();
    if d > 1 && linalg::rank(&diffs) != d - 1 {
        return None;
    }
    Some((v[..d].to_vec(), v[d].clone()))
}

fn canonical<T: Scalar>(u: &[T], a: &T) -> Result<(Vec<T>, T)> {
    let (u, a) = normalize(u, a)?;
    let first = u
        .iter()
        .find(|v| !v.near_zero())
        .cloned()
        .unwrap_or_else(T::one);
    if first.is_neg() {
        Ok((u.into_iter().map(|v| -v).collect(), -a))
    } else {
        Ok((u, a))
    }
}

fn plane_key<T: Scalar>(u: &[T], a: &T) -> Vec<String> {
    u.iter()
        .chain(std::iter::once(a))
        .map(|v| {
            if T::EXACT {
                v.to_string()
            } else {
                let r = (v.as_f64() * 1e12).round();
                // avoid distinct keys for +0 and -0
                format!("{}", if r == 0.0 { 0.0 } else { r })
            }
        })
        .collect()
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
