use thiserror::Error;

pub type Result<T> = std::result::Result<T, RinqError>;

#[derive(Debug, Error)]
pub enum RinqError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty structure: no ATOM records")]
    EmptyStructure,

    #[error("invalid PDB id {0:?}: expected a digit followed by three alphanumerics")]
    InvalidId(String),

    #[error("fetch failed for {id}: {message}")]
    Fetch { id: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("no valid sample with exactly {tau} selected bits")]
    NoValidSample { tau: usize },

    #[error("sweep failed at tau={tau}: {source}")]
    Sweep {
        tau: usize,
        #[source]
        source: Box<RinqError>,
    },

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<RinqError>,
    },
}

impl RinqError {
    /// Wrap an error with the pipeline stage it surfaced in.
    pub fn at_stage(self, stage: &'static str) -> RinqError {
        RinqError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
