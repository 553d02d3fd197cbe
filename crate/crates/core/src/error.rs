use thiserror::Error;

use crate::alphabet::AlphabetError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),

    #[error("symbol {symbol} is not in alphabet {alphabet}")]
    InvalidSymbol { symbol: u32, alphabet: String },

    #[error("state {0} does not exist")]
    InvalidState(u32),

    #[error("machine has no states")]
    NoStates,

    #[error("transition from state {state} on `{input}` defined twice")]
    DuplicateTransition { state: u32, input: String },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("state budget of {0} exceeded")]
    BudgetExceeded(usize),

    #[error("context analysis blow-up: {size} total-output tuples exceed the cap of {cap}")]
    CaBlowUp { size: u128, cap: u128 },

    #[error("spurious counterexample: {0}")]
    SpuriousCounterexample(String),

    #[error("system under learning is undefined on a queried word of length {0}")]
    UndefinedQuery(usize),

    #[error("time budget exhausted")]
    Timeout,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
