use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("unresolved placement: {0}")]
    UnresolvedPlacement(String),
    #[error("diagram is not oriented")]
    Unoriented,
    #[error("diagram is not {0}-labeled; use a reduction")]
    Unlabeled(&'static str),
    #[error("self-linking undefined")]
    SelfLinking,
    #[error("double resolution of crossing {0}")]
    DoubleResolution(String),
    #[error("state explosion: {states} states exceed cap {cap}")]
    StateExplosion { states: u128, cap: u64 },
    #[error("non-invertible substitution")]
    NonInvertible,
    #[error("alignment required")]
    AlignmentRequired,
    #[error("shortcut endpoints must be distinct poles ({0})")]
    SamePole(String),
    #[error("unknown pole {0}")]
    UnknownPole(String),
    #[error("unknown constituent {0}")]
    UnknownConstituent(String),
    #[error("unknown crossing {0}")]
    UnknownCrossing(String),
    #[error("constituent {0} is not a segment")]
    NotASegment(String),
    #[error("stale move: {0}")]
    StaleMove(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
