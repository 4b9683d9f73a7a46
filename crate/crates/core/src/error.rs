use thiserror::Error;

/// Broad classification of failures, mapped onto process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input morphism is outside the supported class.
    Inadmissible,
    /// A consistency check on computed data failed.
    Internal,
    /// A configurable search or iteration bound was exhausted.
    ResourceCap,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Inadmissible => 1,
            ErrorClass::Internal => 2,
            ErrorClass::ResourceCap => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rule `{0}`")]
    MalformedRule(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("empty image for letter `{0}`")]
    EmptyImage(String),
    #[error("missing rule for letter `{0}`")]
    MissingRule(String),
    #[error("duplicate rule for letter `{0}`")]
    DuplicateRule(String),
    #[error("letter `{0}` does not start a fixed point")]
    NotFixedPointLetter(String),
    #[error("inadmissible morphism: {0}")]
    Inadmissible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch between operands")]
    FieldMismatch,
    #[error("degenerate matrix: dominant root {0} is not greater than 1")]
    DegenerateMatrix(String),
    #[error("orientation test exceeded {cap} conjugation steps")]
    OrientationCap { cap: usize },
    #[error("suffix transfer exceeded the bound of {bound} steps")]
    TransferBound { bound: usize },
    #[error("no synchronization delay found up to {cap}")]
    SynchronizationDelayNotFound { cap: usize },
    #[error("image of `{letter}` too short to cut {needed} letters (D = {delay})")]
    ChiLength { letter: String, needed: usize, delay: usize },
    #[error("window `{0}` is not a factor of the subshift")]
    UnknownWindow(String),
    #[error("value {value} lies outside the domain of piece {piece}")]
    DomainViolation { value: String, piece: String },
    #[error("value {0} sits on a doubled cut point without a side tag")]
    AmbiguousProjection(String),
    #[error("prefix too short to resolve index {0}")]
    PrefixTooShort(usize),
    #[error("index chain exceeded {cap} links")]
    ChainCap { cap: usize },
    #[error("morphism is not uniform")]
    NotUniform,
    #[error("shifts {0} and {1} agree on the whole available prefix")]
    NoDifference(usize, usize),
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            MalformedRule(_) | UnknownLetter(_) | EmptyImage(_) | MissingRule(_)
            | DuplicateRule(_) | NotFixedPointLetter(_) | Inadmissible(_) | DegenerateMatrix(_)
            | OrientationCap { .. } | TransferBound { .. } | NotUniform => {
                ErrorClass::Inadmissible
            }
            SynchronizationDelayNotFound { .. } | ChainCap { .. } | PrefixTooShort(_)
            | NoDifference(..) => ErrorClass::ResourceCap,
            DivisionByZero | FieldMismatch | ChiLength { .. } | UnknownWindow(_)
            | DomainViolation { .. } | AmbiguousProjection(_) | Consistency(_) => {
                ErrorClass::Internal
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
