use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rule code {code:?}: invalid character {ch:?} at position {position}, expected a digit")]
    RuleChar {
        code: String,
        ch: char,
        position: usize,
    },
    #[error("rule code {code:?}: expected exactly 4 digits, found {len} characters")]
    RuleLength { code: String, len: usize },
    #[error("rule digit {digit} at position {position} is outside 0..=9")]
    RuleDigitRange { position: usize, digit: u8 },
    #[error("lattice dimensions {width}x{height} are not positive")]
    LatticeDims { width: usize, height: usize },
    #[error("expected {expected} cell states, found {found}")]
    StateCount { expected: usize, found: usize },
    #[error("cell ({x}, {y}) outside {width}x{height} lattice")]
    CellIndex {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("lattice text row {row}: expected {expected} cells, found {found}")]
    TextRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("lattice text: invalid state {ch:?} at ({x}, {y})")]
    TextChar { x: usize, y: usize, ch: char },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("malformed trajectory csv at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("protocol: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
