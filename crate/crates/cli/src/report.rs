//! JSON report written by every command.
//!
//! Numbers are JSON numbers in floating-point mode and strings such as
//! `"3/4"` in exact mode, so exact results survive a round trip. Point
//! indices are 0-based data rows (header excluded).

use std::collections::BTreeMap;

use chebycert::{
    BranchVerdict, ExtremeSets, HyperplaneOutcome, HyperplaneSplit, IntersectionCertificate,
    PolynomialModel, Recursion, ReductionOutcome, SampleSet, Scalar, SeparationWitness,
    ShiftVariant, Verdict, Weighted,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub instance: Instance,
    pub degree: u32,
    pub psi: Value,
    pub model: ModelReport,
    pub extremes: ExtremesReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ModelReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternation: Option<AlternationReport>,
    /// Outcome of the command's check; absent for `fit`.
    #[serde(default)]
    pub verdict: Option<Verdict>,
    /// Wall-clock milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub source: String,
    pub dimension: usize,
    pub points: usize,
    pub arithmetic: Arithmetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    Exact,
}

/// A polynomial as parallel lists of exponent vectors and coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub exponents: Vec<Vec<u32>>,
    pub coefficients: Vec<Value>,
    /// Witness margins: `min L` over `E⁺` and `max L` over `E⁻`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_plus: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_minus: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub rel_tol: f64,
    pub degenerate: bool,
    /// Sign alternations along the axis; univariate data only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub index: usize,
    pub point: Vec<Value>,
    pub weight: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub degree: u32,
    pub moment_residual: Value,
    pub plus: Vec<WeightedPoint>,
    pub minus: Vec<WeightedPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub verdict: Verdict,
    pub strategy: String,
    pub vacuous_branches: usize,
    pub traces: Vec<TraceReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub branch: usize,
    pub verdict: BranchVerdict,
    pub steps: Vec<StepReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// Column name, `x1` ... `xd`.
    pub coordinate: String,
    pub variant: ShiftVariant,
    pub delta: Value,
    pub removed: Vec<usize>,
    pub degree_after: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternationReport {
    pub verdict: Verdict,
    pub recursion: Recursion,
    pub planes_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<SplitReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub normal: Vec<Value>,
    pub offset: Value,
    pub plus_side: Vec<usize>,
    pub minus_side: Vec<usize>,
    pub on_plane_plus: Vec<usize>,
    pub on_plane_minus: Vec<usize>,
}

pub fn num<T: Scalar>(v: &T) -> Value {
    if !T::EXACT {
        if let Some(n) = serde_json::Number::from_f64(v.as_f64()) {
            return Value::Number(n);
        }
    }
    Value::String(v.to_string())
}

/// Reads a number written by [`num`] (or by hand) in either mode.
pub fn parse_num<T: Scalar>(v: &Value) -> Option<T> {
    match v {
        Value::Number(n) => T::parse(&n.to_string()),
        Value::String(s) => T::parse(s),
        _ => None,
    }
}

fn nums<T: Scalar>(vs: &[T]) -> Vec<Value> {
    vs.iter().map(num).collect()
}

pub fn model_report<T: Scalar>(model: &PolynomialModel<T>) -> ModelReport {
    ModelReport {
        exponents: model
            .basis()
            .exponents()
            .iter()
            .map(|e| e.as_slice().to_vec())
            .collect(),
        coefficients: nums(model.coefficients()),
        min_plus: None,
        max_minus: None,
    }
}

pub fn witness_report<T: Scalar>(w: &SeparationWitness<T>) -> ModelReport {
    ModelReport {
        min_plus: w.min_plus.as_ref().map(num),
        max_minus: w.max_minus.as_ref().map(num),
        ..model_report(&w.model)
    }
}

pub fn extremes_report<T: Scalar>(
    e: &ExtremeSets<T>,
    alternations: Option<usize>,
) -> ExtremesReport {
    ExtremesReport {
        plus: e.plus.clone(),
        minus: e.minus.clone(),
        rel_tol: e.rel_tol,
        degenerate: e.degenerate,
        alternations,
    }
}

pub fn certificate_report<T: Scalar>(
    c: &IntersectionCertificate<T>,
    samples: &SampleSet<T>,
) -> CertificateReport {
    let side = |ws: &[Weighted<T>]| {
        ws.iter()
            .map(|w| WeightedPoint {
                index: w.index,
                point: nums(samples.point(w.index)),
                weight: num(&w.weight),
            })
            .collect()
    };
    CertificateReport {
        degree: c.degree,
        moment_residual: num(&c.moment_residual),
        plus: side(&c.plus),
        minus: side(&c.minus),
    }
}

pub fn reduction_report<T: Scalar>(out: &ReductionOutcome<T>, strategy: &str) -> ReductionReport {
    ReductionReport {
        verdict: out.verdict,
        strategy: strategy.to_string(),
        vacuous_branches: out.vacuous_branches(),
        traces: out
            .traces
            .iter()
            .map(|t| TraceReport {
                branch: t.branch,
                verdict: t.verdict,
                steps: t
                    .steps
                    .iter()
                    .map(|s| StepReport {
                        coordinate: format!("x{}", s.dimension + 1),
                        variant: s.variant,
                        delta: num(&s.delta),
                        removed: s.removed.clone(),
                        degree_after: s.degree_after,
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn split_report<T: Scalar>(s: &HyperplaneSplit<T>) -> SplitReport {
    SplitReport {
        normal: nums(&s.normal),
        offset: num(&s.offset),
        plus_side: s.plus_side.clone(),
        minus_side: s.minus_side.clone(),
        on_plane_plus: s.on_plane_plus.clone(),
        on_plane_minus: s.on_plane_minus.clone(),
    }
}

pub fn alternation_report<T: Scalar>(
    out: &HyperplaneOutcome<T>,
    recursion: Recursion,
) -> AlternationReport {
    AlternationReport {
        verdict: out.verdict,
        recursion,
        planes_checked: out.planes_checked,
        counterexample: out.counterexample.as_ref().map(split_report),
        warnings: out.warnings.clone(),
    }
}

impl CertificateReport {
    /// Rebuilds the certificate from the points and weights stored in the
    /// report alone and checks it: non-negative weights, both sides present,
    /// moment residual within `tol`.
    pub fn revalidate<T: Scalar>(&self, tol: &T) -> Result<bool, String> {
        let mut points: Vec<Vec<T>> = Vec::new();
        let mut original: Vec<usize> = Vec::new();
        let mut convert = |ws: &[WeightedPoint]| -> Result<Vec<Weighted<T>>, String> {
            ws.iter()
                .map(|w| {
                    let weight =
                        parse_num(&w.weight).ok_or_else(|| format!("bad weight {}", w.weight))?;
                    let index = match original.iter().position(|&i| i == w.index) {
                        Some(k) => k,
                        None => {
                            let p = w
                                .point
                                .iter()
                                .map(|v| parse_num(v).ok_or_else(|| format!("bad coordinate {v}")))
                                .collect::<Result<Vec<T>, String>>()?;
                            points.push(p);
                            original.push(w.index);
                            points.len() - 1
                        }
                    };
                    Ok(Weighted { index, weight })
                })
                .collect()
        };
        let plus = convert(&self.plus)?;
        let minus = convert(&self.minus)?;
        if points.is_empty() {
            return Ok(false);
        }
        let values = vec![T::zero(); points.len()];
        let samples = SampleSet::new(points, values).map_err(|e| e.to_string())?;
        let cert = IntersectionCertificate {
            degree: self.degree,
            plus,
            minus,
            moment_residual: T::zero(),
        };
        cert.is_valid(&samples, tol).map_err(|e| e.to_string())
    }
}
