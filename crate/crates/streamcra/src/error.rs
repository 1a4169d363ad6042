use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown value domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("operation `{0}` is partial on this domain: {1}")]
    PartialOperationRejected(String, String),
    #[error("register `{0}` is not bound in the valuation")]
    UnboundRegister(String),
    #[error("expression uses `val` but no current value was supplied")]
    MissingCurrentVal,
    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("algebraic law `{law}` failed for operation `{op}`: {detail}")]
    LawCheckFailed {
        op: String,
        law: String,
        detail: String,
    },
    #[error("alphabets do not match: {0}")]
    AlphabetMismatch(String),
    #[error("tag `{0}` is not in the machine alphabet")]
    TagOutOfAlphabet(String),
    #[error("epsilon cycle through state {0}")]
    EpsilonCycle(usize),
    #[error("machine is not unambiguous: {0}")]
    NotUnambiguous(String),
    #[error("two tokens collided on state `{0}` during evaluation")]
    AmbiguityDetected(String),
    #[error("registry has no constant to initialize unused registers")]
    NoConstant,
    #[error("operation `{0}` is not unary; this construction needs a unary-only registry")]
    NonUnaryOperation(String),
    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("expression is not linearizable over the semiring: {0}")]
    NonLinearizableExpression(String),
    #[error("machine rate is not the universal language, cannot view as a total transduction")]
    PartialRate,
    #[error("prefix-sum requires a total argument (rate must be the universal language)")]
    PrefixSumOnPartial,
    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),
    #[error("rule transduction is not well-formed: {0}")]
    NotWellFormed(String),
    #[error("output DAG is malformed: {0}")]
    MalformedDag(String),
    #[error("machine is invalid: {0}")]
    InvalidMachine(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("value `{0}` does not belong to the registry domain")]
    ValueOutOfDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
