use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("atom out of range: p{index} with {atoms} atom(s)")]
    AtomOutOfRange { index: usize, atoms: u8 },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("empty input set: {0}")]
    EmptyInput(&'static str),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("input set outside the enumerated universe")]
    OutsideUniverse,

    #[error("postulate violation: {0}")]
    PostulateViolation(String),

    #[error("antisymmetry violation: outcomes {0} and {1} are mutually reachable")]
    AntisymmetryViolation(String, String),

    #[error("no representation element in the given set")]
    NoRepresentationElement,

    #[error("collected theory is not deductively closed")]
    ResultNotClosed,

    #[error("relation query outside its domain")]
    OutsideDomain,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
