use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zeta = {zeta} sits on the integer pole {pole}")]
    PoleAtInteger { zeta: f64, pole: i64 },
    #[error("x = {x} is within {tol} of a pole")]
    NearPole { x: f64, tol: f64 },
    #[error("series did not converge within {n_max} terms at t = {t}")]
    NoConvergence { t: f64, n_max: usize },
    #[error("no root found in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },
    #[error("weight forms disagree at node {k}: {first} vs {second}")]
    InconsistentWeights { k: usize, first: f64, second: f64 },
    #[error("forward recurrence unstable from index {index}")]
    MethodUnstable { index: usize },
    #[error("need at least 3 levels, got {count}")]
    TooFewLevels { count: usize },
}

impl Error {
    /// True for failures that come from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParams(_) | Error::InvalidArgument(_) | Error::TooFewLevels { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
