use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian (max |A - A^dagger| = {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max |U^dagger U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("composite dimension {dim} exceeds the configured ceiling {ceiling}")]
    DimensionCeiling { dim: usize, ceiling: usize },

    #[error(
        "step-size failure at t = {t}: error estimate {estimate:.3e} above tolerance {tolerance:.3e}"
    )]
    StepSizeFailure {
        t: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("horizon too short: surviving population {surviving:.3e} exceeds {threshold:.1e}")]
    HorizonTooShort { surviving: f64, threshold: f64 },

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("line {line}: {reason}")]
    Data { line: usize, reason: String },

    #[error("run {run_id} is missing arm {group}")]
    MissingArm { run_id: i64, group: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    /// Process exit status the CLI reports for this error.
    ///
    /// 2 configuration/validation, 3 numeric failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StepSizeFailure { .. } | Error::HorizonTooShort { .. } | Error::Undefined(_) => 3,
            Error::Io { .. } => 4,
            Error::Csv(e) if e.is_io_error() => 4,
            _ => 2,
        }
    }

    /// Short machine-readable tag used in one-line diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension",
            Error::InvalidState(_) => "state",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotUnitary(_) => "not_unitary",
            Error::InvalidSubsystems(_) => "subsystems",
            Error::InvalidParameter { .. } => "parameter",
            Error::DimensionCeiling { .. } => "ceiling",
            Error::StepSizeFailure { .. } => "step_size",
            Error::HorizonTooShort { .. } => "horizon",
            Error::Undefined(_) => "undefined",
            Error::Data { .. } => "data",
            Error::MissingArm { .. } => "missing_arm",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
