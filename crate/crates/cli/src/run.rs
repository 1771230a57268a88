use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use chebycert::{
    caratheodory_reduce, check_hull_intersection, count_alternations, extreme_sets, fit_minimax,
    reduce_and_verify, verify_by_hyperplanes, FeatureMap, HullVerdict, HyperplaneOptions,
    MonomialBasis, PolynomialModel, Rational, Recursion, SampleSet, Scalar, ShiftVariant, Strategy,
    Verdict,
};
use log::info;
use serde::Deserialize;
use serde_json::Value;

use crate::grid::GridSpec;
use crate::ingest::ingest;
use crate::report::{self, Arithmetic, Instance, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Fit and report the extreme sets.
    Fit,
    /// Certificate LP: certificate or separating polynomial.
    Verify,
    /// Point-reduction necessary condition.
    Reduce,
    /// Hyperplane enumeration test.
    Alternate,
    /// All of the above; the exit code follows the certificate.
    Report,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Csv(PathBuf),
    Grid(GridSpec),
}

/// Reduction strategy; `Single` cycles through every coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyChoice {
    Exhaustive,
    Single(ShiftVariant),
}

impl StrategyChoice {
    fn resolve(self, dimension: usize) -> Strategy {
        match self {
            StrategyChoice::Exhaustive => Strategy::Exhaustive,
            StrategyChoice::Single(variant) => Strategy::Single {
                order: (0..dimension).collect(),
                variant,
            },
        }
    }

    fn name(self) -> &'static str {
        match self {
            StrategyChoice::Exhaustive => "exhaustive",
            StrategyChoice::Single(ShiftVariant::Min) => "single-min",
            StrategyChoice::Single(ShiftVariant::Max) => "single-max",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    pub degree: u32,
    pub rel_tol: f64,
    pub strategy: StrategyChoice,
    pub recursion: Recursion,
    pub exact: bool,
    /// Coefficients to check instead of fitting.
    pub coeffs: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, source: Source, degree: u32) -> Self {
        RunConfig {
            command,
            source,
            degree,
            rel_tol: chebycert::DEFAULT_REL_TOL,
            strategy: StrategyChoice::Exhaustive,
            recursion: Recursion::One,
            exact: false,
            coeffs: None,
            out: None,
        }
    }
}

/// Process exit status of a finished run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

/// Runs the pipeline and writes the report (to `out`, or stdout).
pub fn run(config: &RunConfig) -> Result<(Report, Status)> {
    if !(0.0..0.5).contains(&config.rel_tol) {
        bail!("--rel-tol must lie in [0, 0.5), got {}", config.rel_tol);
    }
    let report = if config.exact {
        pipeline::<Rational>(config)?
    } else {
        pipeline::<f64>(config)?
    };
    let status = match report.verdict {
        Some(Verdict::Fail) => Status::Fail,
        _ => Status::Pass,
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &config.out {
        Some(path) => std::fs::write(path, json + "\n")
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{json}") {
                // reader went away (e.g. piped into head)
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other.context("writing report to stdout")?,
            }
        }
    }
    Ok((report, status))
}

fn load<T: Scalar>(source: &Source) -> Result<(SampleSet<T>, String)> {
    Ok(match source {
        Source::Csv(path) => (ingest(path)?, path.display().to_string()),
        Source::Grid(spec) => {
            let label = format!(
                "{};{};{};{}",
                spec.bounds
                    .iter()
                    .map(|(a, b)| format!("{a}:{b}"))
                    .collect::<Vec<_>>()
                    .join(","),
                spec.resolution
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                spec.nodes.name(),
                spec.expr
            );
            (spec.generate()?, label)
        }
    })
}

#[derive(Deserialize)]
struct CoeffFile {
    #[serde(default)]
    degree: Option<u32>,
    #[serde(default)]
    exponents: Option<Vec<Vec<u32>>>,
    coefficients: Vec<Value>,
}

/// Reads `{"degree", "coefficients", "exponents"?}`; a report's `model`
/// object is accepted too. Without exponents the coefficients follow the
/// graded order `1, x1, ..., xd, x1^2, x1*x2, ...`.
pub fn load_coefficients<T: Scalar>(
    path: &Path,
    dimension: usize,
    degree: u32,
) -> Result<PolynomialModel<T>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let report_degree = doc.get("degree").and_then(Value::as_u64);
    if let Some(model) = doc.get("model") {
        doc = model.clone();
    }
    let file: CoeffFile = serde_json::from_value(doc)
        .with_context(|| format!("reading coefficients from {}", path.display()))?;
    let stated = file.degree.map(u64::from).or(report_degree);
    if let Some(d) = stated {
        if d != u64::from(degree) {
            bail!("coefficient file is for degree {d} but --degree is {degree}");
        }
    }
    let basis = MonomialBasis::build(dimension, degree)?;
    let values = file
        .coefficients
        .iter()
        .map(|v| report::parse_num::<T>(v).with_context(|| format!("bad coefficient {v}")))
        .collect::<Result<Vec<T>>>()?;
    let coefficients = match file.exponents {
        None => values,
        Some(exps) => {
            if exps.len() != values.len() {
                bail!("{} exponents but {} coefficients", exps.len(), values.len());
            }
            let mut c = vec![T::zero(); basis.len()];
            for (e, v) in exps.into_iter().zip(values) {
                let e = chebycert::ExponentVector::new(e);
                let k = basis
                    .index_of(&e)
                    .with_context(|| format!("monomial {e} is not in the degree-{degree} basis"))?;
                c[k] = v;
            }
            c
        }
    };
    Ok(PolynomialModel::new(basis, coefficients)?)
}

fn pipeline<T: Scalar>(config: &RunConfig) -> Result<Report> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
    };

    let (samples, source) = load::<T>(&config.source)?;
    lap("load_ms", &mut timings);
    let d = samples.dimension();
    let m = config.degree;
    info!("{} points in dimension {d}, degree {m}", samples.len());

    let model = match &config.coeffs {
        Some(path) => load_coefficients::<T>(path, d, m)?,
        None => fit_minimax(&samples, m)?.model,
    };
    lap("fit_ms", &mut timings);
    let psi = chebycert::compute_psi(&model, &samples)?;
    let extremes = extreme_sets(&model, &samples, config.rel_tol)?;
    let alternations = if d == 1 {
        Some(count_alternations(&extremes, &samples)?)
    } else {
        None
    };
    lap("extremes_ms", &mut timings);

    let mut report = Report {
        instance: Instance {
            source,
            dimension: d,
            points: samples.len(),
            arithmetic: if T::EXACT {
                Arithmetic::Exact
            } else {
                Arithmetic::Float
            },
        },
        degree: m,
        psi: report::num(&psi),
        model: report::model_report(&model),
        extremes: report::extremes_report(&extremes, alternations),
        certificate: None,
        witness: None,
        reduction: None,
        alternation: None,
        verdict: None,
        timings: BTreeMap::new(),
    };

    let cmd = config.command;
    if matches!(cmd, Command::Verify | Command::Report) {
        let verdict = match check_hull_intersection(&extremes, &samples, m)? {
            HullVerdict::Intersecting(cert) => {
                let cert = caratheodory_reduce(&cert, &samples)?;
                report.certificate = Some(report::certificate_report(&cert, &samples));
                Verdict::Pass
            }
            HullVerdict::Separated(w) => {
                report.witness = Some(report::witness_report(&w));
                Verdict::Fail
            }
        };
        report.verdict = Some(verdict);
        lap("certificate_ms", &mut timings);
    }
    if matches!(cmd, Command::Reduce | Command::Report) {
        let out = reduce_and_verify(&extremes, &samples, m, &config.strategy.resolve(d))?;
        if cmd == Command::Reduce {
            report.verdict = Some(out.verdict);
        }
        report.reduction = Some(report::reduction_report(&out, config.strategy.name()));
        lap("reduction_ms", &mut timings);
    }
    if matches!(cmd, Command::Alternate | Command::Report) {
        let options = HyperplaneOptions {
            recursion: config.recursion,
        };
        let out = verify_by_hyperplanes(&extremes, &samples, m, &options)?;
        if cmd == Command::Alternate {
            report.verdict = Some(out.verdict);
        }
        report.alternation = Some(report::alternation_report(&out, config.recursion));
        lap("alternation_ms", &mut timings);
    }
    report.timings = timings;
    Ok(report)
}
