use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration unstable at step {step}: trace drift {drift:.3e} exceeds 1e-6")]
    StepInstability { step: usize, drift: f64 },

    #[error("steady state is not unique: smallest singular values {smallest:.3e} and {next:.3e}")]
    NonUniqueSteadyState { smallest: f64, next: f64 },

    #[error("steady-state residual {residual:.3e} above tolerance")]
    SteadyStateResidual { residual: f64 },

    #[error("degenerate populations at step {step}: gap {gap:.3e}")]
    DegeneratePopulations { step: usize, gap: f64 },

    #[error("eigenvector labeling lost at step {step}: best overlap {overlap:.3}")]
    LabelTracking { step: usize, overlap: f64 },

    #[error("phase is ill-conditioned: |z| = {modulus:.3e}")]
    IllConditionedPhase { modulus: f64 },

    #[error("table is not a rectangular grid: {0}")]
    NonRectangular(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short tag used in the `flag` column of sweep output.
    pub fn flag(&self) -> &'static str {
        match self {
            Error::DegeneratePopulations { .. } => "degenerate",
            Error::IllConditionedPhase { .. } => "ill_conditioned",
            Error::StepInstability { .. } => "unstable",
            Error::NonUniqueSteadyState { .. } | Error::SteadyStateResidual { .. } => "steady_state",
            Error::LabelTracking { .. } => "labeling",
            _ => "error",
        }
    }

    /// True for failures of the numerics rather than of the invocation.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Config { .. } | Error::Io { .. } | Error::InvalidParameter { .. })
    }
}
