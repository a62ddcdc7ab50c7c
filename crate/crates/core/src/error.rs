use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i lies in no branch domain")]
    DomainMiss { re: f64, im: f64 },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("Julia approximation is empty; the grid missed the Julia set")]
    EmptyApprox,

    #[error("period {period} exceeds the configured maximum {max}")]
    PeriodTooLarge { period: usize, max: usize },

    #[error("root solver failure: found {found} of {expected} roots")]
    SolverFailure { found: usize, expected: usize },

    #[error("the critical neighborhood swallows the whole Julia approximation")]
    EmptyModel,

    #[error("anchor {0} is post-critical")]
    PostCriticalAnchor(usize),

    #[error("anchors {0} and {1} are the same orbit")]
    DuplicateAnchor(usize, usize),

    #[error("no bridge from anchor {from} to anchor {to} within depth {depth}")]
    BridgeNotFound { from: usize, to: usize, depth: usize },

    #[error("expansion not certified: kappa = {kappa}")]
    NotExpanding { kappa: f64 },

    #[error("model carries no expansion certificate")]
    Unverified,

    #[error("pressure has no sign change (P(0) = {p0})")]
    NoSignChange { p0: f64 },

    #[error("model is not transitive")]
    NonTransitive,

    #[error("edge weights are not stationary (defect {0})")]
    NotStationary(f64),

    #[error("potential does not match the model: {0}")]
    PotentialMismatch(String),

    #[error("no label-compatible graph isomorphism between the models")]
    GraphMismatch,

    #[error("degenerate map {which}: {flag}")]
    Degenerate { which: String, flag: String },

    #[error("empty input: {0}")]
    Empty(&'static str),
}
