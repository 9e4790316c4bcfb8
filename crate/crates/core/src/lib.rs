//! Multi-component floating point (double-, triple- and quad-double) sparse
//! iterative solvers: CSR storage, ILU(0) preconditioning and the BiCG,
//! CGS, BiCGSTAB and GPBiCG methods, with optional binary64 SpMV and
//! binary64 preconditioner sweeps inside a wider working precision.

pub mod krylov;
pub mod precond;
pub mod scalar;
pub mod sparse;

pub use krylov::{solve, Method, SolveReport, SolverConfig, SpmvMode, StopRule};
pub use precond::{IluFactors, PrecondMode, Preconditioner};
pub use scalar::{Complex, MultiFloat, PrecisionKind, Real, Scalar};
pub use sparse::{CooMatrix, CsrMatrix};

/// Double-double: 106-bit significand.
pub type Dd = MultiFloat<2>;
/// Triple-double: 159-bit significand.
pub type Td = MultiFloat<3>;
/// Quad-double: 212-bit significand.
pub type Qd = MultiFloat<4>;

pub type ComplexF64 = Complex<f64>;
pub type ComplexDd = Complex<Dd>;
pub type ComplexTd = Complex<Td>;
pub type ComplexQd = Complex<Qd>;
