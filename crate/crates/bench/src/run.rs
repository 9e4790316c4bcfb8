use std::collections::HashMap;

use log::{info, warn};
use mpkrylov::krylov::{Method, SolveReport, SolverConfig, SpmvMode};
use mpkrylov::precond::PrecondMode;
use mpkrylov::sparse::Field;
use mpkrylov::{solve, ComplexDd, ComplexF64, ComplexQd, ComplexTd, CsrMatrix, Dd, PrecisionKind, Qd, Scalar, Td};
use serde::{Deserialize, Serialize};

use crate::problem::{build_problem, MatrixSource};
use crate::report::finite_or_text;

/// The four variants reported per method and precision: plain, ILU(0),
/// binary64 SpMV, and binary64 SpMV with binary64 ILU(0) sweeps.
pub const STANDARD_VARIANTS: [(PrecondMode, SpmvMode); 4] = [
    (PrecondMode::None, SpmvMode::Full),
    (PrecondMode::Ilu0, SpmvMode::Full),
    (PrecondMode::None, SpmvMode::Mixed),
    (PrecondMode::Ilu0Mixed, SpmvMode::Mixed),
];

pub fn default_grid(methods: &[Method], precisions: &[PrecisionKind]) -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for &p in precisions {
        for &m in methods {
            for (precond, spmv) in STANDARD_VARIANTS {
                let cfg = SolverConfig::new(m, p).with_precond(precond).with_spmv(spmv);
                if cfg.validate().is_ok() {
                    out.push(cfg);
                }
            }
        }
    }
    out
}

/// One cell of a benchmark report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub matrix: String,
    pub method: String,
    pub precision: String,
    pub precond: String,
    pub spmv_mode: String,
    pub iterations: usize,
    pub converged: bool,
    #[serde(rename = "total_s", with = "finite_or_text")]
    pub total_seconds: f64,
    #[serde(with = "finite_or_text")]
    pub ms_per_iter: f64,
    #[serde(with = "finite_or_text")]
    pub true_relres: f64,
    #[serde(rename = "err2", with = "finite_or_text")]
    pub error_norm: f64,
    /// Why the cell could not run. Not part of the report columns.
    #[serde(skip)]
    pub failure: Option<String>,
}

impl BenchRow {
    fn labels(matrix: &str, cfg: &SolverConfig) -> Self {
        Self {
            matrix: matrix.to_string(),
            method: cfg.method.label().to_string(),
            precision: cfg.precision.label().to_string(),
            precond: cfg.precond.label().to_string(),
            spmv_mode: cfg.spmv_mode.label().to_string(),
            iterations: 0,
            converged: false,
            total_seconds: f64::NAN,
            ms_per_iter: f64::NAN,
            true_relres: f64::NAN,
            error_norm: f64::NAN,
            failure: None,
        }
    }

    pub fn from_report(matrix: &str, r: &SolveReport) -> Self {
        Self {
            iterations: r.iterations,
            converged: r.converged,
            total_seconds: r.total_seconds,
            ms_per_iter: r.ms_per_iteration,
            true_relres: r.true_relres,
            error_norm: r.error_norm.unwrap_or(f64::NAN),
            ..Self::labels(matrix, &r.config)
        }
    }

    /// A cell that could not run: counts zero, measurements NaN.
    pub fn failed(matrix: &str, cfg: &SolverConfig, why: impl Into<String>) -> Self {
        Self {
            failure: Some(why.into()),
            ..Self::labels(matrix, cfg)
        }
    }

    /// Equality of all report columns, with NaN equal to NaN.
    pub fn same_report(&self, other: &Self) -> bool {
        let f = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        self.matrix == other.matrix
            && self.method == other.method
            && self.precision == other.precision
            && self.precond == other.precond
            && self.spmv_mode == other.spmv_mode
            && self.iterations == other.iterations
            && self.converged == other.converged
            && f(self.total_seconds, other.total_seconds)
            && f(self.ms_per_iter, other.ms_per_iter)
            && f(self.true_relres, other.true_relres)
            && f(self.error_norm, other.error_norm)
    }
}

fn run_typed<S: Scalar>(src: &MatrixSource, cfg: &SolverConfig) -> Result<BenchRow, String> {
    let a = CsrMatrix::<S>::from_coo(&src.coo).map_err(|e| e.to_string())?;
    let p = build_problem(src.name.clone(), a);
    let (report, _) = solve(&p.a, &p.b, cfg, Some(&p.x_exact)).map_err(|e| e.to_string())?;
    if let Some(why) = &report.breakdown {
        warn!("{} {}: stopped early: {why}", src.name, describe(cfg));
    }
    Ok(BenchRow::from_report(&src.name, &report))
}

fn describe(cfg: &SolverConfig) -> String {
    format!(
        "{}/{}/{}/{}",
        cfg.method, cfg.precision, cfg.precond, cfg.spmv_mode
    )
}

/// Runs one configuration on one matrix. Failures become a row with
/// [`BenchRow::failure`] set.
pub fn run_cell(src: &MatrixSource, cfg: &SolverConfig) -> BenchRow {
    use PrecisionKind::*;
    let complex = src.field() == Field::Complex;
    let result = match (cfg.precision, complex) {
        (F64, false) => run_typed::<f64>(src, cfg),
        (Dd, false) => run_typed::<self::Dd>(src, cfg),
        (Td, false) => run_typed::<self::Td>(src, cfg),
        (Qd, false) => run_typed::<self::Qd>(src, cfg),
        (F64, true) => run_typed::<ComplexF64>(src, cfg),
        (Dd, true) => run_typed::<ComplexDd>(src, cfg),
        (Td, true) => run_typed::<ComplexTd>(src, cfg),
        (Qd, true) => run_typed::<ComplexQd>(src, cfg),
    };
    match result {
        Ok(row) => {
            info!(
                "{} {}: {} iterations, converged={}, {:.3} s",
                src.name,
                describe(cfg),
                row.iterations,
                row.converged,
                row.total_seconds
            );
            row
        }
        Err(e) => {
            warn!("{} {}: {e}", src.name, describe(cfg));
            BenchRow::failed(&src.name, cfg, e)
        }
    }
}

/// Matrices × configurations, run sequentially.
#[derive(Debug, Clone)]
pub struct Suite {
    pub matrices: Vec<MatrixSource>,
    pub configs: Vec<SolverConfig>,
    /// Iteration cap as a multiple of `n`; a config's own `max_iter` wins.
    pub max_iter_factor: usize,
}

pub fn run_benchmark(suite: &Suite) -> Vec<BenchRow> {
    let mut rows = Vec::with_capacity(suite.matrices.len() * suite.configs.len());
    for src in &suite.matrices {
        for cfg in &suite.configs {
            let mut cfg = *cfg;
            if cfg.max_iter.is_none() {
                cfg.max_iter = Some(suite.max_iter_factor * src.n());
            }
            rows.push(run_cell(src, &cfg));
        }
    }
    rows
}

/// Per-iteration time ratios for one matrix, method and precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRow {
    pub matrix: String,
    pub method: String,
    pub precision: String,
    /// ILU(0) over unpreconditioned.
    #[serde(with = "finite_or_text")]
    pub ilu_over_plain: f64,
    /// Mixed ILU(0) with mixed SpMV over mixed SpMV alone.
    #[serde(with = "finite_or_text")]
    pub ilu_d_over_plain_d: f64,
    /// ILU(0) over mixed ILU(0) with mixed SpMV.
    #[serde(with = "finite_or_text")]
    pub ilu_over_ilu_d: f64,
}

/// Builds one ratio row per (matrix, method, precision) that has rows in
/// `rows`; a missing or failed variant yields NaN.
pub fn ratio_rows(rows: &[BenchRow]) -> Vec<RatioRow> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut ms: HashMap<(String, String, String, String, String), f64> = HashMap::new();
    for r in rows {
        let key = (r.matrix.clone(), r.method.clone(), r.precision.clone());
        if !order.contains(&key) {
            order.push(key.clone());
        }
        let v = if r.failure.is_some() { f64::NAN } else { r.ms_per_iter };
        ms.insert((key.0, key.1, key.2, r.precond.clone(), r.spmv_mode.clone()), v);
    }
    let get = |k: &(String, String, String), (p, s): (PrecondMode, SpmvMode)| {
        ms.get(&(k.0.clone(), k.1.clone(), k.2.clone(), p.label().to_string(), s.label().to_string()))
            .copied()
            .unwrap_or(f64::NAN)
    };
    order
        .into_iter()
        .map(|k| {
            let [plain, ilu, plain_d, ilu_d] = STANDARD_VARIANTS.map(|v| get(&k, v));
            RatioRow {
                matrix: k.0,
                method: k.1,
                precision: k.2,
                ilu_over_plain: ilu / plain,
                ilu_d_over_plain_d: ilu_d / plain_d,
                ilu_over_ilu_d: ilu / ilu_d,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use mpkrylov::sparse::{CooMatrix, Symmetry};

    fn identity(n: usize) -> MatrixSource {
        let mut coo = CooMatrix::new(n, n, Field::Real, Symmetry::General);
        for i in 0..n {
            coo.push(i, i, 1.0, 0.0);
        }
        MatrixSource::from_coo("eye", coo)
    }

    #[test]
    fn identity_cell_takes_one_iteration() {
        let cfg = SolverConfig::new(Method::BiCg, PrecisionKind::Dd);
        let row = run_cell(&identity(5), &cfg);
        assert_eq!(row.iterations, 1);
        assert!(row.converged);
        assert!(row.failure.is_none());
        assert_eq!(row.error_norm, 0.0);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(&Method::ALL, &[PrecisionKind::Dd, PrecisionKind::Td, PrecisionKind::Qd]);
        assert_eq!(g.len(), 4 * 3 * 4);
        // mixed variants are invalid in binary64 and are left out
        assert_eq!(default_grid(&[Method::Cgs], &[PrecisionKind::F64]).len(), 2);
    }

    #[test]
    fn failures_are_recorded_and_the_run_continues() {
        let mut coo = CooMatrix::new(2, 2, Field::Real, Symmetry::General);
        coo.push(0, 1, 1.0, 0.0);
        coo.push(1, 0, 1.0, 0.0);
        let suite = Suite {
            matrices: vec![MatrixSource::from_coo("nodiag", coo), identity(3)],
            configs: vec![SolverConfig::new(Method::BiCg, PrecisionKind::Dd).with_precond(PrecondMode::Ilu0)],
            max_iter_factor: 3,
        };
        let rows = run_benchmark(&suite);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].failure.as_deref().unwrap().contains("diagonal"));
        assert!(rows[1].failure.is_none() && rows[1].converged);
    }

    #[test]
    fn ratios_are_quotients_of_source_rows() {
        let src = identity(4);
        let rows: Vec<BenchRow> = default_grid(&[Method::Cgs], &[PrecisionKind::Qd])
            .iter()
            .map(|c| {
                let mut r = run_cell(&src, c);
                r.ms_per_iter = 1.0 + r.precond.len() as f64 + 10.0 * r.spmv_mode.len() as f64;
                r
            })
            .collect();
        let ratios = ratio_rows(&rows);
        assert_eq!(ratios.len(), 1);
        let ms = |p: &str, s: &str| {
            rows.iter().find(|r| r.precond == p && r.spmv_mode == s).unwrap().ms_per_iter
        };
        let r = &ratios[0];
        assert_eq!(r.ilu_over_plain, ms("ilu0", "full") / ms("none", "full"));
        assert_eq!(r.ilu_d_over_plain_d, ms("ilu0_mixed", "mixed") / ms("none", "mixed"));
        assert_eq!(r.ilu_over_ilu_d, ms("ilu0", "full") / ms("ilu0_mixed", "mixed"));
    }
}
