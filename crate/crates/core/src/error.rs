use thiserror::Error;

/// Errors produced by the analyses in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge within {max_iter} iterations (last bracket [{lo}, {hi}])")]
    MaxIterations { max_iter: usize, lo: f64, hi: f64 },

    #[error("log-sum-exp needs at least one positive weight")]
    EmptyInput,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{value} is outside the domain of the {family} utility")]
    Domain { family: &'static str, value: f64 },

    #[error("{value} is outside the range of the {family} utility")]
    Range { family: &'static str, value: f64 },

    #[error("invalid utility parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid lottery: {0}")]
    InvalidLottery(String),

    #[error("invalid pill deal: {0}")]
    InvalidDeal(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("step function has no two-sided limit at 0 (left {left}, right {right})")]
    NoLimit { left: f64, right: f64 },

    #[error("invalid patch width {eps}: {reason}")]
    InvalidEps { eps: f64, reason: String },

    #[error("no acceptance threshold: reward {r} is not below value of life {l}")]
    InvalidThreshold { l: f64, r: f64 },

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("invalid population spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// Solver failures (as opposed to bad inputs or domain violations).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NoSignChange { .. } | Error::MaxIterations { .. } | Error::NoSolution(_)
        )
    }

    /// Inputs that were rejected by a constructor before any computation ran.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::InvalidParameter(_)
                | Error::InvalidLottery(_)
                | Error::InvalidDeal(_)
                | Error::InvalidStep(_)
                | Error::InvalidSpec(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
