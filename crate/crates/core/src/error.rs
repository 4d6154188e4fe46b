use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("series anchored at different roots")]
    AnchorMismatch,

    #[error("sample t = {t} lies outside the convergence domain |t - t0| < {radius}")]
    OutsideDomain { t: f64, radius: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("insufficient nodes near t0 = {t0}: found {found}, need {needed}")]
    InsufficientNodes {
        t0: f64,
        found: usize,
        needed: usize,
    },

    #[error("not a simple root: {0}")]
    NotSimpleRoot(String),

    #[error("root crossing failed near t = {t}: {reason}")]
    CrossingFailed { t: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
