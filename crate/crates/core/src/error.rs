use thiserror::Error;

use crate::game::Concept;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Index or dimension mismatch between objects that must agree.
    #[error("shape error: {0}")]
    Shape(String),

    /// A probability vector failed validation.
    #[error("invalid distribution at {context}: {reason}")]
    Distribution { context: String, reason: String },

    /// A non-finite or out-of-range numeric input.
    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{concept} not installable at stage (h={stage}, s={state}): {reason}")]
    StageNotInstallable {
        concept: Concept,
        stage: usize,
        state: usize,
        reason: String,
    },

    /// Requested dominance gap exceeds what the reward bound can support.
    #[error("epsilon {epsilon} exceeds the maximum installable gap {max_gap}")]
    EpsilonTooLarge { epsilon: f64, max_gap: f64 },

    #[error("deviation class leaves player {player} no action at (h={stage}, s={state})")]
    EmptyDeviationSet {
        player: usize,
        stage: usize,
        state: usize,
    },

    #[error("invalid linear program: {0}")]
    LpInput(String),

    /// The design LP has no feasible point.
    #[error("not {slack}-installable within bound {bound}")]
    Infeasible { slack: f64, bound: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn distribution(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Distribution {
            context: context.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable code for reports and exit diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "E_SHAPE",
            Error::Distribution { .. } => "E_DISTRIBUTION",
            Error::InvalidValue(_) => "E_VALUE",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Domain(_) => "E_DOMAIN",
            Error::StageNotInstallable { .. } => "E_NOT_INSTALLABLE",
            Error::EpsilonTooLarge { .. } => "E_EPSILON",
            Error::EmptyDeviationSet { .. } => "E_EMPTY_DEVIATIONS",
            Error::LpInput(_) => "E_LP_INPUT",
            Error::Infeasible { .. } => "E_INFEASIBLE",
            Error::Internal(_) => "E_INTERNAL",
        }
    }
}
