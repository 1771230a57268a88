//! Necessary-condition check by iterated point reduction.
//!
//! Translating coordinate `j` so that its smallest value over the extreme
//! points becomes zero lets the moment equalities be divided by `x̃_j`: every
//! point on that coordinate minimum drops out and the remaining points must
//! satisfy the same equalities at degree `m - 1`. Repeating down to degree 1
//! leaves a convex-hull intersection test in the original space.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{ExtremeSets, SampleSet};
use crate::monomials::ShiftVariant;
use crate::optimality::check_linear_case;
use crate::scalar::Scalar;

/// Absolute tolerance for "translated coordinate is zero".
pub const ZERO_COORD_TOL: f64 = 1e-10;

/// How reduction branches are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// One branch: dimensions taken cyclically from `order`, always the same
    /// variant.
    Single {
        order: Vec<usize>,
        variant: ShiftVariant,
    },
    /// Every sequence of (dimension, variant) choices.
    #[default]
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionStep<T> {
    pub dimension: usize,
    pub variant: ShiftVariant,
    pub delta: T,
    /// Sample indices dropped at this step.
    pub removed: Vec<usize>,
    pub degree_after: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchVerdict {
    Pass,
    Fail,
    /// A side was emptied before reaching degree 1.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace<T> {
    pub branch: usize,
    pub steps: Vec<ReductionStep<T>>,
    pub verdict: BranchVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutcome<T> {
    pub verdict: Verdict,
    pub traces: Vec<ReductionTrace<T>>,
}

impl<T> ReductionOutcome<T> {
    pub fn vacuous_branches(&self) -> usize {
        self.traces
            .iter()
            .filter(|t| t.verdict == BranchVerdict::Vacuous)
            .count()
    }
}

#[derive(Clone)]
struct State {
    plus: Vec<usize>,
    minus: Vec<usize>,
    degree: u32,
}

/// Runs the point-reduction check. The overall verdict is `Fail` if any
/// branch fails.
pub fn reduce_and_verify<T: Scalar>(
    extremes: &ExtremeSets<T>,
    samples: &SampleSet<T>,
    degree: u32,
    strategy: &Strategy,
) -> Result<ReductionOutcome<T>> {
    if degree == 0 {
        return Err(Error::InvalidArgument("reduction needs degree >= 1".into()));
    }
    extremes.check_indices(samples)?;
    if extremes.is_empty() {
        return Err(Error::EmptyExtremeSets);
    }
    if let Strategy::Single { order, .. } = strategy {
        if order.is_empty() {
            return Err(Error::InvalidArgument(
                "single strategy needs a dimension order".into(),
            ));
        }
        if let Some(&j) = order.iter().find(|&&j| j >= samples.dimension()) {
            return Err(Error::InvalidArgument(format!(
                "dimension {j} out of range for {}-dimensional samples",
                samples.dimension()
            )));
        }
    }

    let start = State {
        plus: extremes.plus.clone(),
        minus: extremes.minus.clone(),
        degree,
    };
    if start.plus.is_empty() || start.minus.is_empty() {
        // a constant already separates the two sides
        let trace = ReductionTrace {
            branch: 0,
            steps: Vec::new(),
            verdict: BranchVerdict::Fail,
        };
        return Ok(ReductionOutcome {
            verdict: Verdict::Fail,
            traces: vec![trace],
        });
    }

    let mut runner = Runner {
        extremes,
        samples,
        strategy,
        traces: Vec::new(),
    };
    runner.explore(start, Vec::new())?;
    let traces = runner.traces;
    let verdict = if traces.iter().any(|t| t.verdict == BranchVerdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(ReductionOutcome { verdict, traces })
}

struct Runner<'a, T> {
    extremes: &'a ExtremeSets<T>,
    samples: &'a SampleSet<T>,
    strategy: &'a Strategy,
    traces: Vec<ReductionTrace<T>>,
}

impl<T: Scalar> Runner<'_, T> {
    fn finish(&mut self, steps: Vec<ReductionStep<T>>, verdict: BranchVerdict) {
        let branch = self.traces.len();
        debug!(
            "reduction branch {branch}: {} steps, {verdict:?}",
            steps.len()
        );
        self.traces.push(ReductionTrace {
            branch,
            steps,
            verdict,
        });
    }

    fn explore(&mut self, state: State, steps: Vec<ReductionStep<T>>) -> Result<()> {
        if state.plus.is_empty() || state.minus.is_empty() {
            self.finish(steps, BranchVerdict::Vacuous);
            return Ok(());
        }
        if state.degree <= 1 {
            let remaining = ExtremeSets {
                plus: state.plus,
                minus: state.minus,
                ..self.extremes.clone()
            };
            let verdict = if check_linear_case(&remaining, self.samples)?.is_intersecting() {
                BranchVerdict::Pass
            } else {
                BranchVerdict::Fail
            };
            self.finish(steps, verdict);
            return Ok(());
        }

        let choices: Vec<(usize, ShiftVariant)> = match self.strategy {
            Strategy::Single { order, variant } => {
                vec![(order[steps.len() % order.len()], *variant)]
            }
            Strategy::Exhaustive => (0..self.samples.dimension())
                .flat_map(|j| [(j, ShiftVariant::Min), (j, ShiftVariant::Max)])
                .collect(),
        };
        for (j, variant) in choices {
            let (next, step) = self.reduce(&state, j, variant);
            let mut path = steps.clone();
            path.push(step);
            self.explore(next, path)?;
        }
        Ok(())
    }

    fn reduce(&self, state: &State, j: usize, variant: ShiftVariant) -> (State, ReductionStep<T>) {
        let coord = |i: usize| self.samples.point(i)[j].clone();
        let all = state.plus.iter().chain(&state.minus).map(|&i| coord(i));
        let delta = match variant {
            ShiftVariant::Min => all.reduce(T::min_of),
            ShiftVariant::Max => all.reduce(T::max_of).map(|v| -v),
        }
        .expect("both sides are non-empty");
        let tol = if T::EXACT {
            T::zero()
        } else {
            T::from_f64(ZERO_COORD_TOL)
        };
        let shifted = |i: usize| match variant {
            ShiftVariant::Min => coord(i) - delta.clone(),
            ShiftVariant::Max => -coord(i) - delta.clone(),
        };
        let mut removed: Vec<usize> = Vec::new();
        let mut keep = |idx: &[usize]| -> Vec<usize> {
            idx.iter()
                .copied()
                .filter(|&i| {
                    let gone = shifted(i).abs() <= tol;
                    if gone {
                        removed.push(i);
                    }
                    !gone
                })
                .collect()
        };
        let plus = keep(&state.plus);
        let minus = keep(&state.minus);
        removed.sort_unstable();
        removed.dedup();
        let degree = state.degree - 1;
        let step = ReductionStep {
            dimension: j,
            variant,
            delta,
            removed,
            degree_after: degree,
        };
        (
            State {
                plus,
                minus,
                degree,
            },
            step,
        )
    }
}
