use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("degenerate input to {op}: {detail}")]
    DegenerateInput { op: &'static str, detail: String },

    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("invalid parameter `{name}`: {detail}")]
    Parameter { name: String, detail: String },

    #[error("unknown preset `{0}` (expected helium, molecule or custom)")]
    UnknownPreset(String),

    #[error("{op} did not converge within {steps} steps (last energy {last_energy:.10}, drift {drift:.3e})")]
    Convergence {
        op: &'static str,
        steps: usize,
        last_energy: f64,
        drift: f64,
        drift_history: Vec<f64>,
    },

    #[error("all kernel weights underflowed for walker {walker} (kernel width {width:.3e})")]
    DegenerateWeights { walker: usize, width: f64 },

    #[error("numerical blow-up in {op} at walker {walker}, electron {electron} (pre-normalization norm {norm:e})")]
    Instability {
        op: &'static str,
        walker: usize,
        electron: usize,
        norm: f64,
    },

    #[error("eigensolver failed to converge for eigenvalue {index}")]
    EigenConvergence { index: usize },

    #[error("invariant violated in {op}: {detail}")]
    Invariant { op: &'static str, detail: String },

    #[error("empty domain in {op}")]
    EmptyDomain { op: &'static str },

    #[error("partition error: {0}")]
    Partition(String),

    #[error("comparison error: {0}")]
    Comparison(String),

    #[error("config error at `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("missing input file {0}")]
    MissingFile(String),

    #[error("malformed file {path}: {detail}")]
    Format { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::DegenerateWeights { .. }
                | Error::Instability { .. }
                | Error::EigenConvergence { .. }
                | Error::Invariant { .. }
                | Error::DegenerateInput { .. }
        )
    }

    pub(crate) fn param(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
