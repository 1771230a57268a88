//! Exponent vectors, the graded monomial basis and polynomial evaluation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponents `(e_1, ..., e_d)` of the monomial `x_1^e_1 ... x_d^e_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(dimension: usize) -> Self {
        Self(vec![0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// Total degree, the sum of the components.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// The exponent with coordinate `k` lowered by one, if it is positive.
    pub fn lower(&self, k: usize) -> Option<Self> {
        let e = *self.0.get(k)?;
        (e > 0).then(|| {
            let mut v = self.0.clone();
            v[k] -= 1;
            Self(v)
        })
    }

    pub fn raise(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v[k] += 1;
        Self(v)
    }

    pub fn eval<T: Scalar>(&self, point: &[T]) -> T {
        self.0
            .iter()
            .zip(point)
            .filter(|(e, _)| **e > 0)
            .fold(T::one(), |acc, (&e, x)| acc * x.powi(e))
    }

    /// Graded lexicographic order: total degree first, then `x1 ≻ x2 ≻ ...`.
    pub fn graded_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Anything that maps a point of `R^d` to a feature vector `(1, g_1(x), ..., g_n(x))`.
///
/// The fitting and certificate code only touches basis functions through this
/// trait. [`MonomialBasis`] is the one shipped implementation.
pub trait FeatureMap {
    fn dimension(&self) -> usize;

    /// Number of features including the leading constant.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lift<T: Scalar>(&self, point: &[T]) -> Result<Vec<T>>;
}

/// All monomials in `d` variables of total degree at most `m`, constant first,
/// in graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    dimension: usize,
    degree: u32,
    exponents: Vec<ExponentVector>,
    // (coordinate k, index of e with e_k lowered) for every non-constant entry
    factors: Vec<Option<(usize, usize)>>,
}

impl MonomialBasis {
    pub fn build(dimension: usize, degree: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        let mut exponents = Vec::new();
        let mut current = vec![0u32; dimension];
        enumerate(&mut current, 0, degree, &mut exponents);
        exponents.sort_by(|a, b| a.graded_cmp(b));
        let factors = exponents
            .iter()
            .map(|e| {
                (0..dimension).find_map(|k| {
                    let low = e.lower(k)?;
                    Some((k, exponents.iter().position(|x| *x == low)?))
                })
            })
            .collect();
        Ok(Self {
            dimension,
            degree,
            exponents,
            factors,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[ExponentVector] {
        &self.exponents
    }

    /// Number of non-constant monomials.
    pub fn non_constant_count(&self) -> usize {
        self.exponents.len() - 1
    }

    /// Number of leading basis entries with degree at most `k`. Because of the
    /// graded ordering these form a prefix.
    pub fn prefix_len(&self, k: u32) -> usize {
        self.exponents.partition_point(|e| e.degree() <= k)
    }

    pub fn index_of(&self, e: &ExponentVector) -> Option<usize> {
        self.exponents.iter().position(|x| x == e)
    }
}

fn enumerate(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<ExponentVector>) {
    if pos == current.len() {
        out.push(ExponentVector(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[pos] = e;
        enumerate(current, pos + 1, budget - e, out);
    }
    current[pos] = 0;
}

impl FeatureMap for MonomialBasis {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn len(&self) -> usize {
        self.exponents.len()
    }

    fn lift<T: Scalar>(&self, point: &[T]) -> Result<Vec<T>> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: point.len(),
            });
        }
        // every monomial of degree k+1 is x_j times an earlier one of degree k
        let mut values: Vec<T> = Vec::with_capacity(self.exponents.len());
        for factor in &self.factors {
            let v = match *factor {
                None => T::one(),
                Some((k, low)) => values[low].clone() * point[k].clone(),
            };
            values.push(v);
        }
        Ok(values)
    }
}

/// `L(A, x) = sum_k a_k x^{e_k}` over a monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialModel<T> {
    basis: MonomialBasis,
    coefficients: Vec<T>,
}

impl<T: Scalar> PolynomialModel<T> {
    pub fn new(basis: MonomialBasis, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coefficients.len(),
            });
        }
        Ok(Self {
            basis,
            coefficients,
        })
    }

    pub fn zero(basis: MonomialBasis) -> Self {
        let coefficients = vec![T::zero(); basis.len()];
        Self {
            basis,
            coefficients,
        }
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn evaluate(&self, point: &[T]) -> Result<T> {
        let lifted = self.basis.lift(point)?;
        Ok(dot(&self.coefficients, &lifted))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PolynomialModel<U> {
        PolynomialModel {
            basis: self.basis.clone(),
            coefficients: self.coefficients.iter().map(f).collect(),
        }
    }

    pub fn scaled(&self, factor: &T) -> Self {
        self.map(|c| c.clone() * factor.clone())
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// One term `weight * coefficient * value` of a weighted moment sum.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTerm<T> {
    pub weight: T,
    pub coefficient: T,
    pub value: T,
}

impl<T> WeightedTerm<T> {
    pub fn new(weight: T, coefficient: T, value: T) -> Self {
        Self {
            weight,
            coefficient,
            value,
        }
    }
}

/// Translates both sides of a balanced weighted sum by `delta`.
///
/// Given `sum a_i w_i x_i = sum b_i v_i y_i` and `sum a_i w_i = sum b_i v_i`,
/// returns `(sum a_i w_i (x_i - delta), sum b_i v_i (y_i - delta))`, which are
/// then equal as well. Fails if the two balance hypotheses do not hold within
/// the scalar tolerance (relative to the magnitude of the sums).
pub fn shift_monomial_weights<T: Scalar>(
    left: &[WeightedTerm<T>],
    right: &[WeightedTerm<T>],
    delta: &T,
) -> Result<(T, T)> {
    let mass = |terms: &[WeightedTerm<T>]| {
        terms.iter().fold(T::zero(), |acc, t| {
            acc + t.weight.clone() * t.coefficient.clone()
        })
    };
    let moment = |terms: &[WeightedTerm<T>]| {
        terms.iter().fold(T::zero(), |acc, t| {
            acc + t.weight.clone() * t.coefficient.clone() * t.value.clone()
        })
    };
    let (ml, mr) = (mass(left), mass(right));
    let (fl, fr) = (moment(left), moment(right));
    let scale = |a: &T, b: &T| T::max_of(T::one(), T::max_of(a.abs(), b.abs()));
    if !((ml.clone() - mr.clone()) / scale(&ml, &mr)).near_zero() {
        return Err(Error::Precondition(format!(
            "weighted masses differ: {ml} vs {mr}"
        )));
    }
    if !((fl.clone() - fr.clone()) / scale(&fl, &fr)).near_zero() {
        return Err(Error::Precondition(format!(
            "weighted moments differ: {fl} vs {fr}"
        )));
    }
    let shifted = |terms: &[WeightedTerm<T>]| {
        terms.iter().fold(T::zero(), |acc, t| {
            acc + t.weight.clone() * t.coefficient.clone() * (t.value.clone() - delta.clone())
        })
    };
    Ok((shifted(left), shifted(right)))
}

/// Which of the two admissible shifts to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftVariant {
    /// `delta = min x_j`; shifted coordinates `x_j - delta >= 0`.
    Min,
    /// `delta = -max x_j`; shifted coordinates `-x_j - delta >= 0`.
    Max,
}

/// The shift `delta` making every coordinate `j` with `e_j > 0` non-negative
/// over all `points`, or `None` if the monomial is constant or `points` is
/// empty.
pub fn shift_delta<T: Scalar>(
    points: &[&[T]],
    exponent: &ExponentVector,
    variant: ShiftVariant,
) -> Option<T> {
    let coords = exponent
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, _)| j)
        .collect::<Vec<_>>();
    let mut values = points
        .iter()
        .flat_map(|p| coords.iter().map(move |&j| p[j].clone()));
    let first = values.next()?;
    Some(match variant {
        ShiftVariant::Min => values.fold(first, T::min_of),
        ShiftVariant::Max => -values.fold(first, T::max_of),
    })
}
