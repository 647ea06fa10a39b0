use thiserror::Error;

/// Errors raised by the pointwise algebra, the solver and the diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("superluminal state: |v| = {0} is not below the light speed")]
    SuperluminalState(f64),

    #[error("non-positive stretch: phi_xi = {0}")]
    NonPositiveStretch(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate acceleration denominator: |A| = {0:e}")]
    DegenerateDenominator(f64),

    #[error("loss of hyperbolicity at node {node}: discriminant {discriminant:e}")]
    LossOfHyperbolicity { node: usize, discriminant: f64 },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("insufficient snapshots: need at least {needed}, got {got}")]
    InsufficientSnapshots { needed: usize, got: usize },

    #[error("snapshots are not uniformly spaced in time")]
    NonUniformSnapshots,

    #[error("conservation law {law} does not apply to this entropy profile")]
    NotApplicable { law: String },

    #[error("point {x} outside interpolation range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("non-finite value in state at node {0}")]
    NonFinite(usize),

    #[error("at node {node}, t = {t}: {source}")]
    AtNode {
        node: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn at_node(self, node: usize, t: f64) -> Self {
        Error::AtNode {
            node,
            t,
            source: Box::new(self),
        }
    }

    /// Strips node/time context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for guards that trip while stepping (as opposed to input validation).
    pub fn is_runtime_guard(&self) -> bool {
        matches!(
            self.root(),
            Error::SuperluminalState(_)
                | Error::NonPositiveStretch(_)
                | Error::DegenerateDenominator(_)
                | Error::LossOfHyperbolicity { .. }
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
