//! CSV input: a header `x1,...,xd,f` (or `x,f` for one variable) followed by
//! one row per sample point.

use std::io::Read;
use std::path::Path;

use chebycert::{SampleSet, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("header: {0}")]
    Header(String),
    #[error("no data rows")]
    Empty,
    #[error("line {second}: duplicate of the point on line {first}")]
    Duplicate { first: u64, second: u64 },
    #[error(transparent)]
    Samples(chebycert::Error),
}

pub fn ingest<T: Scalar>(path: &Path) -> Result<SampleSet<T>, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file)
}

pub fn read_csv<T: Scalar, R: Read>(input: R) -> Result<SampleSet<T>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| IngestError::Header(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    let d = check_header(&header)?;

    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != d + 1 {
            return Err(IngestError::Row {
                line,
                message: format!("expected {} fields, found {}", d + 1, record.len()),
            });
        }
        let mut row = Vec::with_capacity(d + 1);
        for (k, field) in record.iter().enumerate() {
            let v = T::parse(field).ok_or_else(|| IngestError::Row {
                line,
                message: format!("column '{}': cannot parse {field:?} as a number", header[k]),
            })?;
            row.push(v);
        }
        values.push(row.pop().expect("row has d + 1 entries"));
        points.push(row);
        lines.push(line);
    }
    if points.is_empty() {
        return Err(IngestError::Empty);
    }
    SampleSet::new(points, values).map_err(|e| match e {
        chebycert::Error::DuplicatePoint { first, second } => IngestError::Duplicate {
            first: lines[first],
            second: lines[second],
        },
        other => IngestError::Samples(other),
    })
}

fn check_header(header: &[String]) -> Result<usize, IngestError> {
    let Some((last, coords)) = header.split_last() else {
        return Err(IngestError::Header("empty header".into()));
    };
    if last != "f" {
        return Err(IngestError::Header(format!(
            "last column must be 'f', found {last:?}"
        )));
    }
    if coords.is_empty() {
        return Err(IngestError::Header("no coordinate columns".into()));
    }
    if coords.len() == 1 && coords[0] == "x" {
        return Ok(1);
    }
    for (k, name) in coords.iter().enumerate() {
        if *name != format!("x{}", k + 1) {
            return Err(IngestError::Header(format!(
                "column {} must be 'x{}', found {name:?}",
                k + 1,
                k + 1
            )));
        }
    }
    Ok(coords.len())
}
