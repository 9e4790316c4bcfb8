//! Product-type Krylov solvers (BiCG, CGS, BiCGSTAB, GPBiCG) over any
//! [`Scalar`], with optional preconditioning and mixed-precision SpMV.
//!
//! Every method starts from `x₀ = 0`, uses the shadow residual `r̃ = r₀` and
//! stops once the recursive residual satisfies `‖r‖ < ε_r‖r₀‖ + ε_a`.

mod bicg;
mod bicgstab;
mod cgs;
mod gpbicg;
mod operator;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

pub use bicg::bicg;
pub use bicgstab::bicgstab;
pub use cgs::cgs;
pub use gpbicg::gpbicg;
pub use operator::{LinearOperator, MixedOperator, ParallelOperator};

use crate::precond::{PrecondError, PrecondMode, Preconditioner};
use crate::scalar::{PrecisionKind, Real, Scalar};
use crate::sparse::vector::norm2;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BiCg,
    Cgs,
    BiCgStab,
    GpBiCg,
}

impl Method {
    pub const ALL: [Method; 4] = [Self::BiCg, Self::Cgs, Self::BiCgStab, Self::GpBiCg];

    pub const fn label(self) -> &'static str {
        match self {
            Self::BiCg => "bicg",
            Self::Cgs => "cgs",
            Self::BiCgStab => "bicgstab",
            Self::GpBiCg => "gpbicg",
        }
    }

    /// Runs this method on an already-built operator and preconditioner.
    pub fn run<S: Scalar>(
        self,
        a: &dyn LinearOperator<S>,
        b: &[S],
        m: Option<&dyn Preconditioner<S>>,
        stop: &StopRule,
    ) -> Result<Outcome<S>, KrylovError> {
        match self {
            Self::BiCg => bicg(a, b, m, stop),
            Self::Cgs => cgs(a, b, m, stop),
            Self::BiCgStab => bicgstab(a, b, m, stop),
            Self::GpBiCg => gpbicg(a, b, m, stop),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| KrylovError::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Where the matrix values live during SpMV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpmvMode {
    /// Matrix stored in the working precision.
    Full,
    /// Matrix stored in binary64, promoted per product.
    Mixed,
}

impl SpmvMode {
    pub const fn label(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Mixed => "mixed",
        }
    }
}

impl fmt::Display for SpmvMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SpmvMode {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Self::Full),
            "mixed" | "d" => Ok(Self::Mixed),
            _ => Err(KrylovError::InvalidConfig(format!("unknown SpMV mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrylovError {
    #[error("dimension mismatch: operator is {expected}x{expected}, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("preconditioner construction failed: {0}")]
    Precond(#[from] PrecondError),
}

/// Why an iteration stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Breakdown {
    /// A scalar that is divided by became exactly zero.
    Zero(&'static str),
    /// A scalar or norm became infinite or NaN.
    NonFinite(&'static str),
    /// The 2×2 least-squares system of GPBiCG is singular.
    SingularLeastSquares,
    Precond(PrecondError),
}

impl fmt::Display for Breakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero(what) => write!(f, "{what} = 0"),
            Self::NonFinite(what) => write!(f, "{what} is not finite"),
            Self::SingularLeastSquares => f.write_str("singular 2x2 least-squares system"),
            Self::Precond(e) => write!(f, "preconditioner: {e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub eps_rel: f64,
    pub eps_abs: f64,
    pub max_iter: usize,
}

impl StopRule {
    pub const DEFAULT_EPS_REL: f64 = 1e-13;
    pub const DEFAULT_EPS_ABS: f64 = 1e-100;

    /// Default thresholds with a cap of `3n` iterations.
    pub fn for_dimension(n: usize) -> Self {
        Self {
            eps_rel: Self::DEFAULT_EPS_REL,
            eps_abs: Self::DEFAULT_EPS_ABS,
            max_iter: 3 * n,
        }
    }
}

/// Final state of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<S: Scalar> {
    pub x: Vec<S>,
    /// Loop passes, counting an interrupted one.
    pub iterations: usize,
    pub converged: bool,
    /// `‖r‖` of the recursive residual at exit.
    pub residual_norm: S::Real,
    pub initial_residual_norm: S::Real,
    pub breakdown: Option<Breakdown>,
}

impl<S: Scalar> Outcome<S> {
    /// `‖r‖ / ‖r₀‖`.
    pub fn recursive_relres(&self) -> S::Real {
        self.residual_norm / self.initial_residual_norm
    }
}

/// Stopping threshold and exit bookkeeping shared by the methods.
pub(crate) struct Monitor<S: Scalar> {
    r0: S::Real,
    threshold: S::Real,
    pub max_iter: usize,
}

impl<S: Scalar> Monitor<S> {
    pub fn new(r0: &[S], stop: &StopRule) -> Self {
        let r0 = norm2(r0);
        let threshold =
            S::Real::from_binary64(stop.eps_rel) * r0 + S::Real::from_binary64(stop.eps_abs);
        Self {
            r0,
            threshold,
            max_iter: stop.max_iter,
        }
    }

    pub fn initial(&self) -> S::Real {
        self.r0
    }

    pub fn met(&self, rn: S::Real) -> bool {
        rn < self.threshold
    }

    pub fn finish(&self, x: Vec<S>, iterations: usize, rn: S::Real, converged: bool) -> Outcome<S> {
        Outcome {
            x,
            iterations,
            converged,
            residual_norm: rn,
            initial_residual_norm: self.r0,
            breakdown: None,
        }
    }

    pub fn broke(&self, x: Vec<S>, iterations: usize, rn: S::Real, why: Breakdown) -> Outcome<S> {
        Outcome {
            breakdown: Some(why),
            ..self.finish(x, iterations, rn, false)
        }
    }
}

/// Classifies a divisor: `Some` when it is zero or not finite.
pub(crate) fn degenerate<S: Scalar>(v: S, what: &'static str) -> Option<Breakdown> {
    if !v.is_finite() {
        Some(Breakdown::NonFinite(what))
    } else if v.is_zero() {
        Some(Breakdown::Zero(what))
    } else {
        None
    }
}

pub(crate) fn check_dims<S: Scalar>(a: &dyn LinearOperator<S>, b: &[S]) -> Result<(), KrylovError> {
    if a.dim() != b.len() {
        return Err(KrylovError::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    Ok(())
}

/// One cell of the benchmark grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub precision: PrecisionKind,
    pub precond: PrecondMode,
    pub spmv_mode: SpmvMode,
    pub eps_rel: f64,
    pub eps_abs: f64,
    /// `None` means `3n`.
    pub max_iter: Option<usize>,
    /// Row-parallel SpMV (full mode only). Not bitwise reproducible
    /// across thread counts.
    pub parallel_spmv: bool,
}

impl SolverConfig {
    pub fn new(method: Method, precision: PrecisionKind) -> Self {
        Self {
            method,
            precision,
            precond: PrecondMode::None,
            spmv_mode: SpmvMode::Full,
            eps_rel: StopRule::DEFAULT_EPS_REL,
            eps_abs: StopRule::DEFAULT_EPS_ABS,
            max_iter: None,
            parallel_spmv: false,
        }
    }

    pub fn with_precond(mut self, precond: PrecondMode) -> Self {
        self.precond = precond;
        self
    }

    pub fn with_spmv(mut self, spmv_mode: SpmvMode) -> Self {
        self.spmv_mode = spmv_mode;
        self
    }

    pub fn validate(&self) -> Result<(), KrylovError> {
        let bad = |m: &str| Err(KrylovError::InvalidConfig(m.to_string()));
        if !(self.eps_rel > 0.0 && self.eps_rel.is_finite()) {
            return bad("eps_rel must be positive");
        }
        if !(self.eps_abs > 0.0 && self.eps_abs.is_finite()) {
            return bad("eps_abs must be positive");
        }
        if self.max_iter == Some(0) {
            return bad("max_iter must be positive");
        }
        if self.spmv_mode == SpmvMode::Mixed && self.precision == PrecisionKind::F64 {
            return bad("mixed SpMV needs a working precision wider than binary64");
        }
        if self.precond == PrecondMode::Ilu0Mixed && self.precision == PrecisionKind::F64 {
            return bad("mixed ILU(0) needs a working precision wider than binary64");
        }
        Ok(())
    }

    pub fn stop_rule(&self, n: usize) -> StopRule {
        StopRule {
            eps_rel: self.eps_rel,
            eps_abs: self.eps_abs,
            max_iter: self.max_iter.unwrap_or(3 * n),
        }
    }
}

/// Measurements of one [`solve`] call. Norms are reported in binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub config: SolverConfig,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Wall time including preconditioner construction.
    pub total_seconds: f64,
    pub ms_per_iteration: f64,
    pub final_recursive_relres: f64,
    /// `‖b − Ax‖ / ‖b‖`, recomputed once at exit in the working precision.
    pub true_relres: f64,
    /// `‖x − x*‖₂` when the exact solution is known.
    pub error_norm: Option<f64>,
    pub breakdown: Option<Breakdown>,
}

/// Builds the preconditioner and operator described by `cfg`, runs the
/// method and measures the result. Returns the report and the iterate.
pub fn solve<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &[S],
    cfg: &SolverConfig,
    x_exact: Option<&[S]>,
) -> Result<(SolveReport, Vec<S>), KrylovError> {
    cfg.validate()?;
    if cfg.precision != S::precision() {
        return Err(KrylovError::InvalidConfig(format!(
            "configured precision {} but the scalar type is {}",
            cfg.precision,
            S::precision()
        )));
    }
    let n = a.n();
    if b.len() != n {
        return Err(KrylovError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if let Some(xs) = x_exact {
        if xs.len() != n {
            return Err(KrylovError::DimensionMismatch {
                expected: n,
                found: xs.len(),
            });
        }
    }
    let stop = cfg.stop_rule(n);

    let start = Instant::now();
    let precond: Option<Box<dyn Preconditioner<S>>> = match cfg.precond {
        PrecondMode::None => None,
        mode => Some(mode.build(a)?),
    };
    let m = precond.as_deref();
    let outcome = match cfg.spmv_mode {
        SpmvMode::Full if cfg.parallel_spmv => cfg.method.run(&ParallelOperator(a), b, m, &stop)?,
        SpmvMode::Full => cfg.method.run(a, b, m, &stop)?,
        SpmvMode::Mixed => {
            let low = a.demote();
            cfg.method.run(&MixedOperator::new(&low), b, m, &stop)?
        }
    };
    let total_seconds = start.elapsed().as_secs_f64();

    let ax = a.mul_vec(&outcome.x).expect("dimensions checked");
    let diff: Vec<S> = b.iter().zip(&ax).map(|(&bi, &yi)| bi - yi).collect();
    let true_relres = (norm2(&diff) / norm2(b)).to_binary64();
    let error_norm = x_exact.map(|xs| {
        let e: Vec<S> = outcome.x.iter().zip(xs).map(|(&u, &v)| u - v).collect();
        norm2(&e).to_binary64()
    });
    let iterations = outcome.iterations;
    let report = SolveReport {
        config: *cfg,
        n,
        iterations,
        converged: outcome.converged,
        total_seconds,
        ms_per_iteration: if iterations > 0 {
            1000.0 * total_seconds / iterations as f64
        } else {
            f64::NAN
        },
        final_recursive_relres: outcome.recursive_relres().to_binary64(),
        true_relres,
        error_norm,
        breakdown: outcome.breakdown.clone(),
    };
    Ok((report, outcome.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precond::Identity;
    use crate::scalar::{Complex, MultiFloat};

    type Dd = MultiFloat<2>;

    fn eye(n: usize) -> CsrMatrix<Dd> {
        CsrMatrix::from_triplets(n, (0..n).map(|i| (i, i, Dd::from(1.0)))).unwrap()
    }

    fn tridiag(n: usize) -> CsrMatrix<Dd> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Dd::from(4.0)));
            if i > 0 {
                t.push((i, i - 1, Dd::from(-1.0)));
            }
            if i + 1 < n {
                t.push((i, i + 1, Dd::from(-2.0)));
            }
        }
        CsrMatrix::from_triplets(n, t).unwrap()
    }

    #[test]
    fn identity_system_takes_one_iteration() {
        let a = eye(5);
        let b: Vec<Dd> = (1..=5).map(|i| Dd::from(i as f64).sqrt()).collect();
        for method in Method::ALL {
            for precond in PrecondMode::ALL {
                let cfg = SolverConfig::new(method, PrecisionKind::Dd).with_precond(precond);
                let (rep, x) = solve(&a, &b, &cfg, Some(&b)).unwrap();
                assert!(rep.converged, "{method} {precond}");
                assert_eq!(rep.iterations, 1, "{method} {precond}");
                if precond != PrecondMode::Ilu0Mixed {
                    assert_eq!(x, b, "{method} {precond}");
                }
            }
        }
    }

    /// Non-symmetric 5-point stencil on a `g × g` grid; ILU(0) drops fill.
    fn grid(g: usize) -> CsrMatrix<Dd> {
        let mut t = Vec::new();
        for i in 0..g {
            for j in 0..g {
                let row = i * g + j;
                t.push((row, row, Dd::from(4.5)));
                if j > 0 {
                    t.push((row, row - 1, Dd::from(-1.25)));
                }
                if j + 1 < g {
                    t.push((row, row + 1, Dd::from(-0.75)));
                }
                if i > 0 {
                    t.push((row, row - g, Dd::from(-1.0)));
                }
                if i + 1 < g {
                    t.push((row, row + g, Dd::from(-1.0)));
                }
            }
        }
        CsrMatrix::from_triplets(g * g, t).unwrap()
    }

    #[test]
    fn all_methods_solve_a_grid_system() {
        let a = grid(6);
        let n = a.n();
        let xs: Vec<Dd> = (1..=n).map(|i| Dd::from(2.0).sqrt() * Dd::from(i as f64)).collect();
        let b = a.mul_vec(&xs).unwrap();
        for method in Method::ALL {
            for precond in PrecondMode::ALL {
                for spmv in [SpmvMode::Full, SpmvMode::Mixed] {
                    let cfg = SolverConfig {
                        eps_rel: 1e-28,
                        ..SolverConfig::new(method, PrecisionKind::Dd)
                            .with_precond(precond)
                            .with_spmv(spmv)
                    };
                    let (rep, _) = solve(&a, &b, &cfg, Some(&xs)).unwrap();
                    assert!(rep.converged, "{method} {precond} {spmv}: {rep:?}");
                    assert!(rep.true_relres < 1e-25, "{method} {precond} {spmv}: {rep:?}");
                    assert!(rep.error_norm.unwrap() < 1e-20);
                }
            }
        }
    }

    #[test]
    fn explicit_identity_matches_plain_path_bitwise() {
        let n = 25;
        let a = tridiag(n);
        let b: Vec<Dd> = (0..n).map(|i| Dd::from(i as f64 + 0.5).sqrt()).collect();
        let stop = StopRule::for_dimension(n);
        for method in Method::ALL {
            let plain = method.run(&a, &b, None, &stop).unwrap();
            let ident = method.run(&a, &b, Some(&Identity), &stop).unwrap();
            assert_eq!(plain, ident, "{method}");
        }
    }

    #[test]
    fn cap_is_reported_as_non_convergence() {
        let a = tridiag(20);
        let b = vec![Dd::from(1.0); 20];
        let cfg = SolverConfig {
            max_iter: Some(2),
            ..SolverConfig::new(Method::BiCg, PrecisionKind::Dd)
        };
        let (rep, _) = solve(&a, &b, &cfg, None).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 2);
        assert!(rep.breakdown.is_none());
        let ratio = rep.ms_per_iteration * rep.iterations as f64 / (1000.0 * rep.total_seconds);
        assert!((ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rhs_converges_immediately() {
        let a = tridiag(4);
        let b = vec![Dd::ZERO; 4];
        let (rep, x) = solve(&a, &b, &SolverConfig::new(Method::Cgs, PrecisionKind::Dd), None).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert_eq!(x, b);
    }

    #[test]
    fn configuration_is_validated() {
        let a = tridiag(4);
        let b = vec![Dd::from(1.0); 4];
        let wrong_precision = SolverConfig::new(Method::BiCg, PrecisionKind::Qd);
        assert!(solve(&a, &b, &wrong_precision, None).is_err());
        let af = a.demote();
        let mixed64 = SolverConfig::new(Method::BiCg, PrecisionKind::F64).with_spmv(SpmvMode::Mixed);
        assert!(solve(&af, &[1.0; 4], &mixed64, None).is_err());
        let cfg = SolverConfig { eps_rel: 0.0, ..SolverConfig::new(Method::BiCg, PrecisionKind::Dd) };
        assert!(cfg.validate().is_err());
        assert!(solve(&a, &b[..3], &SolverConfig::new(Method::BiCg, PrecisionKind::Dd), None).is_err());
    }

    #[test]
    fn singular_pivot_surfaces_as_error() {
        let a = CsrMatrix::<Dd>::from_triplets(2, [(0, 1, Dd::from(1.0)), (1, 0, Dd::from(1.0))]).unwrap();
        let cfg = SolverConfig::new(Method::BiCg, PrecisionKind::Dd).with_precond(PrecondMode::Ilu0);
        assert!(matches!(
            solve(&a, &[Dd::from(1.0); 2], &cfg, None),
            Err(KrylovError::Precond(PrecondError::MissingDiagonal { row: 0 }))
        ));
    }

    #[test]
    fn complex_system() {
        type C = Complex<Dd>;
        let n = 12;
        let c = |re: f64, im: f64| C::new(re.into(), im.into());
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(4.0, 1.0)));
            if i > 0 {
                t.push((i, i - 1, c(-1.0, 0.5)));
            }
            if i + 1 < n {
                t.push((i, i + 1, c(0.0, -1.0)));
            }
        }
        let a = CsrMatrix::from_triplets(n, t).unwrap();
        let xs: Vec<C> = (1..=n).map(|i| c(2.0, 3.0).sqrt().scale(Dd::from(i as f64))).collect();
        let b = a.mul_vec(&xs).unwrap();
        for method in Method::ALL {
            for precond in PrecondMode::ALL {
                let cfg = SolverConfig {
                    eps_rel: 1e-28,
                    ..SolverConfig::new(method, PrecisionKind::Dd).with_precond(precond)
                };
                let (rep, _) = solve(&a, &b, &cfg, Some(&xs)).unwrap();
                assert!(rep.converged && rep.true_relres < 1e-25, "{method} {precond}: {rep:?}");
            }
        }
    }
}
