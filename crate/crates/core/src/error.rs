use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("integration diverged near x = {x}")]
    Blowup { x: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside the validity regime: {0}")]
    Regime(String),
    #[error("degenerate envelope: {0}")]
    Degenerate(String),
    #[error("no real root: {0}")]
    NoRoot(String),
    #[error("certification failed at `{check}`: {detail}")]
    Certification { check: String, detail: String },
    #[error("ordering violated at x = {x}: {detail}")]
    Ordering { x: f64, detail: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Blowup { .. } => "blowup",
            Error::NoBracket { .. } => "no_bracket",
            Error::Precondition(_) => "precondition",
            Error::Regime(_) => "regime",
            Error::Degenerate(_) => "degenerate",
            Error::NoRoot(_) => "no_root",
            Error::Certification { .. } => "certification",
            Error::Ordering { .. } => "ordering",
            Error::InvalidParams(_) => "invalid_params",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
