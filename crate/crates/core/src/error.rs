use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator.
///
/// Variants split into two families: invalid input (bad parameters, out of
/// range indices) and numerical contract violations (a computed object failed
/// a structural check that should hold by symmetry). The CLI maps the two
/// families to different exit codes, see [`Error::is_numerical_contract`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {diff:e}")]
    Asymmetric { i: usize, j: usize, diff: f64 },
    #[error("matrix is not positive semi-definite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("site {site} out of range for {n_spins} spins")]
    SiteOutOfRange { site: usize, n_spins: usize },
    #[error("sites must be distinct, got {site} twice")]
    CoincidentSites { site: usize },
    #[error("{n_spins} spins not supported (allowed 1..={max})")]
    TooManySpins { n_spins: usize, max: usize },
    #[error("a standalone sigma-y operator is complex and has no real-matrix representation")]
    ComplexOperator,
    #[error("state has {got} amplitudes, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("state is not normalized: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(u32),

    #[error("ground level is not degenerate: E1 = {e1}, E2 = {e2}")]
    DegeneracyViolation { e1: f64, e2: f64 },
    #[error("ground doublet is separated from the third level by only {gap:e}")]
    GapViolation { gap: f64 },
    #[error("block Hamiltonian mixes parity sectors (coupling {coupling:e})")]
    ParityViolation { coupling: f64 },
    #[error("projected {operator} is not of pure single-spin form (deviation {deviation:e})")]
    StructureViolation { operator: &'static str, deviation: f64 },
    #[error("renormalized bond strength vanished ({0:e})")]
    DegenerateCoupling(f64),

    #[error("{needed} points required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("derivative curve is identically zero on the requested side")]
    ZeroCurve,
    #[error("distance to the critical point underflows at RG step {step} (gamma_m = {gamma_m:e})")]
    Underflow { step: usize, gamma_m: f64 },
}

impl Error {
    /// True for failures of a numerical contract (symmetry or structure
    /// checks on computed objects) as opposed to invalid input.
    pub fn is_numerical_contract(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DegeneracyViolation { .. }
                | Error::GapViolation { .. }
                | Error::ParityViolation { .. }
                | Error::StructureViolation { .. }
                | Error::DegenerateCoupling(_)
                | Error::ZeroCurve
                | Error::Underflow { .. }
        )
    }
}
