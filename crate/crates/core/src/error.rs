use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular linear system ({0})")]
    Singular(String),

    /// The requested `(θ₀, θ_T)` lies outside the variant's region of validity.
    #[error("({theta0:.6}, {theta_t:.6}) outside validity region: {reason}")]
    Region {
        theta0: f64,
        theta_t: f64,
        reason: String,
    },

    #[error("no variant covers (θ₀={theta0:.6}, θ_T={theta_t:.6}): {verdicts:?}")]
    Uncovered {
        theta0: f64,
        theta_t: f64,
        verdicts: Vec<String>,
    },

    /// A constraint formula has a removable singularity at this input.
    #[error("singular point θ_T={theta_t:.6}: {reason}")]
    Singularity { theta_t: f64, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("solution failed oracle verification: {0}")]
    Verification(String),

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("phase extraction failed, best coefficient residual {best_residual:.3e}")]
    Extraction { best_residual: f64 },

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("zones not coverable by one pulse duration: Rabi ratio {ratio:.4} exceeds window ratio {limit:.4}")]
    Uncoverable { ratio: f64, limit: f64 },

    #[error("value {value:.6e} outside range ±{limit:.6e}")]
    Range { value: f64, limit: f64 },

    #[error("fit failed: {reason} (rms residual {rms_residual:.3e})")]
    Fit { reason: String, rms_residual: f64 },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("scan point x={x:.6}: {source}")]
    Scan {
        x: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Region-type failures: the request itself is not realisable.
    pub fn is_validity(&self) -> bool {
        match self {
            Error::Region { .. }
            | Error::Uncovered { .. }
            | Error::Uncoverable { .. }
            | Error::Precondition(_) => true,
            Error::Scan { source, .. } => source.is_validity(),
            _ => false,
        }
    }
}
