use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid factor shape: {0}")]
    InvalidShape(String),
    #[error("invalid factor permutation {0:?}")]
    InvalidPermutation(alloc::vec::Vec<usize>),
    #[error("invalid factor subset: {0}")]
    InvalidSubset(String),
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not an isometry (residual {residual:e})")]
    NotIsometry { residual: f64 },
    #[error("vectors are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("state is not supported on the antisymmetric subspace (residual {residual:e})")]
    OutsideAntisymmetric { residual: f64 },
    #[error("invalid probability triple ({p23}, {p31}, {p12})")]
    InvalidTriple { p23: f64, p31: f64, p12: f64 },
    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("cubic does not have three real roots (cos 3theta = {cos3theta})")]
    NotIrreducible { cos3theta: f64 },
    #[error("bound violated: {what} (margin {margin:e})")]
    BoundViolated { what: &'static str, margin: f64 },
    #[error("density matrix has rank zero")]
    RankZero,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no valid ensemble within budget")]
    BudgetExhausted,
}
