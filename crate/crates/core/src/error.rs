//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// Syntax error in the textual game format. `line` and `col` are 1-based.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// Structurally invalid game (duplicate vertex, deadlock, edge out of a
    /// target, ...). Raised by the graph constructor, so every `GameGraph`
    /// in circulation satisfies the structural invariants.
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A strategy object does not fit the game it is used with.
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    /// A Markov chain or distribution violates its invariants.
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    /// Precondition of an operation does not hold for these inputs
    /// (infinite values where finite ones are required, a strategy that does
    /// not reach the targets almost surely, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configurable resource cap was exceeded (iteration budget, cycle
    /// enumeration size, product-graph size, exponent size).
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
