use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::signal::Signal;
use crate::solver::OscillationReport;

/// Position in DSL text, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("malformed bit vector `{0}`")]
    BadBits(String),
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: unknown variable `{name}`")]
    UnknownVariable { at: Location, name: String },
    #[error("{at}: arity error: {message}")]
    Arity { at: Location, message: String },
}

impl ParseError {
    pub fn location(&self) -> Option<Location> {
        match self {
            ParseError::Syntax { at, .. }
            | ParseError::UnknownVariable { at, .. }
            | ParseError::Arity { at, .. } => Some(*at),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width {0} outside the supported range 1..=64")]
    WidthOutOfRange(usize),
    #[error("coordinate range {lo}..={hi} invalid for width {width}")]
    BadRange { lo: usize, hi: usize, width: usize },
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("input widths differ: {left} vs {right}")]
    InputWidthMismatch { left: usize, right: usize },
    #[error("switch times not strictly increasing at position {index}")]
    NonIncreasingTimes { index: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("schedule is not progressive: some coordinate fires only finitely often")]
    NotProgressive,
    #[error("n+m = {arity} exceeds the truth-table cap of {cap}")]
    ArityCapExceeded { arity: usize, cap: usize },
    #[error("trajectory does not stabilize: {0}")]
    NonStabilizing(OscillationReport),
    #[error("no stabilization within {max_events} events")]
    EventBudgetExceeded { max_events: usize },
    #[error("a system needs at least one input")]
    EmptySystem,
    #[error("every input needs at least one state")]
    EmptyStateSet,
    #[error("the systems have no common input")]
    EmptyCommonInput,
    #[error("the intersection is empty for every common input")]
    EmptyIntersection,
    #[error("{} intermediate state(s) are not inputs of the second system", missing.len())]
    Composability { missing: Vec<Signal> },
    #[error("computation function has no entry for initial value {mu} under input {input}")]
    MissingComputation { mu: String, input: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
