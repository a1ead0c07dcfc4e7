use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty design")]
    EmptyDesign,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ratios require unlabeled data")]
    NoUnlabeledData,

    #[error("singular Hessian")]
    SingularHessian,

    #[error("degenerate information matrix")]
    DegenerateInformation,

    #[error("all {count} candidates failed: {details}")]
    AllCandidatesFailed { count: usize, details: String },

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("model file: {0}")]
    Schema(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularHessian | Error::DegenerateInformation | Error::AllCandidatesFailed { .. }
        )
    }
}
