use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol {symbol} is outside the alphabet 1..={k}")]
    SymbolOutOfRange { symbol: usize, k: usize },

    #[error("map entry {value} at position {position} is outside 1..={bound}")]
    MalformedMap {
        position: usize,
        value: usize,
        bound: usize,
    },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("not a 2-subset: {{{0}, {1}}}")]
    BadPair(usize, usize),

    #[error("{what} requires {requirement}")]
    Precondition {
        what: &'static str,
        requirement: String,
    },

    #[error("sequence has repeated entries: {0:?}")]
    RepeatedEntries(Vec<usize>),

    #[error("not a permutation word: {0:?}")]
    NotAPermutation(Vec<usize>),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("element set is not a group: {0}")]
    NotAGroup(String),

    #[error("incomplete cs spec: no value for {0}")]
    IncompleteSpec(String),

    #[error("cs spec key is not in the admissible value set: {0}")]
    InvalidSpecKey(String),

    #[error("domain too large: {k}^{n} tuples")]
    DomainTooLarge { k: usize, n: usize },

    #[error("{0}")]
    Refused(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(what: &'static str, requirement: impl Into<String>) -> Self {
        Error::Precondition {
            what,
            requirement: requirement.into(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
