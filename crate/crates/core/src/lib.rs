//! Best uniform (Chebyshev) approximation of multivariate data by polynomials
//! on finite point sets, together with several independent ways of checking
//! that a given approximation is optimal:
//!
//! * [`optimality`]: lifted convex-hull intersection certificates, their
//!   Carathéodory reduction, and Rice-style isolability / critical point sets;
//! * [`reduction`]: the fast coordinate-extreme point reduction test
//!   (necessary condition, also sufficient for univariate data);
//! * [`alternation`]: hyperplane sign-splitting, a multivariate analogue of
//!   the alternating sequence.
//!
//! Everything is generic over [`Scalar`], so the same code runs in `f64` and
//! in exact rational arithmetic ([`Rational`]).

pub mod alternation;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod lp;
pub mod monomials;
pub mod optimality;
pub mod reduction;
pub mod scalar;

pub use alternation::{
    check_split_condition, split, verify_by_hyperplanes, ConditionStatus, HyperplaneOptions,
    HyperplaneOutcome, HyperplaneSplit, Recursion, SplitCondition, SplitVia,
};
pub use error::{Error, Result};
pub use fitting::{
    compute_psi, count_alternations, extreme_sets, fit_minimax, ExtremeSets, FitResult, SampleSet,
    DEFAULT_REL_TOL,
};
pub use lp::{solve, solve_exact, Constraint, LinearProgram, LpSolution, LpStatus, Relation};
pub use monomials::{
    shift_delta, shift_monomial_weights, ExponentVector, FeatureMap, MonomialBasis,
    PolynomialModel, ShiftVariant, WeightedTerm,
};
pub use optimality::{
    caratheodory_reduce, check_hull_intersection, check_isolability, check_linear_case,
    find_critical_point_set, HullVerdict, IntersectionCertificate, Isolability, SeparationWitness,
    Weighted,
};
pub use reduction::{
    reduce_and_verify, BranchVerdict, ReductionOutcome, ReductionStep, ReductionTrace, Strategy,
    Verdict,
};
pub use scalar::{Rational, Scalar};
