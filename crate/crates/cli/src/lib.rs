//! Front end for the `chebycert` binary: CSV ingestion, grid generation,
//! the fit/verify/reduce/alternate pipeline and its JSON report.

pub mod expr;
pub mod grid;
pub mod ingest;
pub mod report;
pub mod run;

pub use run::{run, Command, RunConfig, Source, Status, StrategyChoice};
