use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("a grid of {grid} points cannot resolve |k| <= {max_freq} (needs at least {needed})")]
    Aliasing {
        grid: usize,
        max_freq: usize,
        needed: usize,
    },

    #[error("coefficients of a real-valued template are not Hermitian at k = {k}")]
    NotHermitian { k: i64 },

    #[error("imaginary residue {residue:e} of a real-valued synthesis exceeds 1e-10")]
    ImaginaryResidue { residue: f64 },

    #[error("eigenvalue gamma_{k} vanishes")]
    VanishingEigenvalue { k: i64 },

    #[error("max frequency mismatch: expected {expected}, found {found}")]
    FrequencyMismatch { expected: usize, found: usize },

    #[error("observations carry no per-curve coefficients")]
    MissingCurves,

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("too few points for a fit: {0}")]
    InsufficientPoints(usize),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
