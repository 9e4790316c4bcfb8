use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use mpkrylov::krylov::{Method, SolverConfig, SpmvMode};
use mpkrylov::precond::PrecondMode;
use mpkrylov::PrecisionKind;

use crate::fetch::{cached_path, fetch_matrix, DEFAULT_BASE_URL};
use crate::problem::MatrixSource;
use crate::report::{emit_report, OutputFormat};
use crate::run::{default_grid, ratio_rows, run_benchmark, BenchRow, Suite};
use crate::BenchError;

#[derive(Debug, Parser)]
#[command(
    name = "mpkrylov-bench",
    version,
    about = "Runs Krylov solver grids on Matrix Market problems A x* = b"
)]
pub struct Cli {
    /// Matrix Market file, or a collection name resolved in --cache-dir.
    /// Repeat for several matrices.
    #[arg(long, required = true)]
    pub matrix: Vec<String>,
    /// bicg, cgs, bicgstab, gpbicg, a comma-separated list, or all.
    #[arg(long, default_value = "all")]
    pub method: String,
    /// dd, td, qd, f64, a list, or all (= dd,td,qd).
    #[arg(long, default_value = "all")]
    pub precision: String,
    /// none, ilu0, ilu0-mixed, or a list. With neither --precond nor --spmv
    /// the four standard variants are run.
    #[arg(long)]
    pub precond: Option<String>,
    /// full, mixed, or a list.
    #[arg(long)]
    pub spmv: Option<String>,
    /// Relative residual tolerance.
    #[arg(long, default_value = "1e-13")]
    pub eps_rel: f64,
    /// Absolute residual floor.
    #[arg(long, default_value = "1e-100")]
    pub eps_abs: f64,
    /// Iteration cap as a multiple of n.
    #[arg(long, default_value_t = 3)]
    pub max_iter_factor: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
    /// Also report per-iteration time ratios between variants.
    #[arg(long)]
    pub ratios: bool,
    /// Download collection matrices that are not in --cache-dir.
    #[arg(long)]
    pub fetch: bool,
    #[arg(long, default_value = "matrices")]
    pub cache_dir: PathBuf,
    #[arg(long, default_value = DEFAULT_BASE_URL)]
    pub base_url: String,
    /// Row-parallel SpMV on N threads (full-precision SpMV only).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn list<T: FromStr>(arg: &str, all: &[T], what: &str) -> Result<Vec<T>, BenchError>
where
    T: Copy + PartialEq,
    T::Err: std::fmt::Display,
{
    if arg.eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    let mut out = Vec::new();
    for part in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v = part
            .parse::<T>()
            .map_err(|e| BenchError::Usage(format!("--{what}: {e}")))?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(BenchError::Usage(format!("--{what} is empty")));
    }
    Ok(out)
}

impl Cli {
    /// Configurations selected by the flags; combinations that need a
    /// working precision wider than binary64 are dropped for f64.
    pub fn configs(&self) -> Result<Vec<SolverConfig>, BenchError> {
        if !(self.eps_rel > 0.0) || !(self.eps_abs > 0.0) {
            return Err(BenchError::Usage("thresholds must be positive".into()));
        }
        if self.max_iter_factor == 0 {
            return Err(BenchError::Usage("--max-iter-factor must be positive".into()));
        }
        let methods = list(&self.method, &Method::ALL, "method")?;
        let ladder = [PrecisionKind::Dd, PrecisionKind::Td, PrecisionKind::Qd];
        let precisions = list(&self.precision, &ladder, "precision")?;
        let base = if self.precond.is_none() && self.spmv.is_none() {
            default_grid(&methods, &precisions)
        } else {
            let preconds = list(self.precond.as_deref().unwrap_or("all"), &PrecondMode::ALL, "precond")?;
            let spmvs = list(
                self.spmv.as_deref().unwrap_or("all"),
                &[SpmvMode::Full, SpmvMode::Mixed],
                "spmv",
            )?;
            let mut out = Vec::new();
            for &p in &precisions {
                for &m in &methods {
                    for &s in &spmvs {
                        for &c in &preconds {
                            let cfg = SolverConfig::new(m, p).with_precond(c).with_spmv(s);
                            if cfg.validate().is_ok() {
                                out.push(cfg);
                            }
                        }
                    }
                }
            }
            out
        };
        if base.is_empty() {
            return Err(BenchError::Usage("no valid configuration selected".into()));
        }
        Ok(base
            .into_iter()
            .map(|mut c| {
                c.eps_rel = self.eps_rel;
                c.eps_abs = self.eps_abs;
                c.parallel_spmv = self.threads.is_some();
                c
            })
            .collect())
    }

    fn resolve(&self, m: &str) -> Result<PathBuf, BenchError> {
        let p = Path::new(m);
        if p.is_file() {
            return Ok(p.to_path_buf());
        }
        if self.fetch {
            return Ok(fetch_matrix(m, &self.base_url, &self.cache_dir)?);
        }
        let cached = cached_path(m, &self.cache_dir)
            .unwrap_or_else(|_| self.cache_dir.join(format!("{m}.mtx")));
        if cached.is_file() {
            return Ok(cached);
        }
        Err(BenchError::Usage(format!(
            "{m}: no such file and not cached in {} (use --fetch to download)",
            self.cache_dir.display()
        )))
    }

    pub fn suite(&self) -> Result<Suite, BenchError> {
        let configs = self.configs()?;
        let matrices = self
            .matrix
            .iter()
            .map(|m| self.resolve(m).and_then(MatrixSource::load))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Suite {
            matrices,
            configs,
            max_iter_factor: self.max_iter_factor,
        })
    }
}

/// Runs the benchmark described by `cli` and writes the report. Returns
/// the rows; the run is complete when none of them has a failure.
pub fn run(cli: &Cli) -> Result<Vec<BenchRow>, BenchError> {
    let suite = cli.suite()?;
    let rows = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| BenchError::Usage(format!("--threads: {e}")))?
            .install(|| run_benchmark(&suite)),
        None => run_benchmark(&suite),
    };
    let ratios = cli.ratios.then(|| ratio_rows(&rows));
    let io_err = |path: &str| {
        let path = path.to_string();
        move |source: io::Error| BenchError::Io { path, source }
    };
    match &cli.out {
        Some(path) => {
            let name = path.display().to_string();
            let f = File::create(path).map_err(io_err(&name))?;
            emit_report(&rows, ratios.as_deref(), cli.output, BufWriter::new(f)).map_err(io_err(&name))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit_report(&rows, ratios.as_deref(), cli.output, &mut lock).map_err(io_err("<stdout>"))?;
            lock.flush().map_err(io_err("<stdout>"))?;
        }
    }
    Ok(rows)
}
