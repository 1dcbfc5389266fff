use thiserror::Error;

/// Which phase of a two-phase decomposition left the entropy domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    One,
    Two,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::One => write!(f, "phase 1"),
            Phase::Two => write!(f, "phase 2"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid EoS parameters: {0}")]
    InvalidParams(String),

    #[error("state (tau={tau}, e={e}) is outside the entropy domain")]
    Domain { tau: f64, e: f64 },

    #[error("temperature {temperature} must lie in (0, {critical}) for a saturation solve")]
    InvalidTemperature { temperature: f64, critical: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
        /// Residual norm after each iteration.
        trace: Vec<f64>,
    },

    #[error("state (tau={tau}, e={e}) is not under the saturation dome")]
    NotUnderDome { tau: f64, e: f64 },

    #[error("no tangent state distinct from the reference state")]
    NoDistinctRoot,

    #[error("fractions are not in the open unit cube: ({0}, {1}, {2})")]
    FractionOutOfRange(f64, f64, f64),

    #[error("{phase} state (tau={tau}, e={e}) is outside the entropy domain")]
    PhasicOutOfDomain { phase: Phase, tau: f64, e: f64 },

    #[error("step size underflow at t={t} (h={h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),

    #[error("squared sound speed {c2:e} is not positive")]
    NonHyperbolicState { c2: f64 },

    #[error("at t={time}, cell {cell}: {source}")]
    AtCell {
        time: f64,
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn at_cell(self, time: f64, cell: usize) -> Self {
        Error::AtCell {
            time,
            cell,
            source: Box::new(self),
        }
    }

    /// Strips any cell/time context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCell { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the error comes from a numerical solve (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self.root(),
            Error::InvalidParams(_) | Error::Config(_) | Error::InvalidTemperature { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
