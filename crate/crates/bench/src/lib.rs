//! Benchmark harness: builds `A x* = b` problems from Matrix Market files,
//! runs grids of solver configurations and reports iteration counts,
//! timings and accuracy as CSV or JSON.

pub mod cli;
pub mod fetch;
pub mod problem;
pub mod report;
pub mod run;

pub use fetch::{fetch_matrix, FetchError, DEFAULT_BASE_URL};
pub use problem::{build_problem, exact_solution, MatrixSource, ProblemSpec};
pub use report::{emit_report, emit_ratios, parse_csv, parse_json, OutputFormat};
pub use run::{default_grid, ratio_rows, run_benchmark, run_cell, BenchRow, RatioRow, Suite, STANDARD_VARIANTS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Matrix {
        path: String,
        #[source]
        source: mpkrylov::sparse::MarketError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("invalid argument: {0}")]
    Usage(String),
}
