use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input is missing required column `{0}`")]
    MissingColumn(&'static str),

    #[error("row {row}: column `{column}`: {message}")]
    MalformedRow {
        row: usize,
        column: String,
        message: String,
    },

    #[error("row {row}: pp_top10 and its bounds disagree on percent vs fraction scale")]
    InconsistentScale { row: usize },

    #[error("publication counts must be positive (got {n1} and {n2})")]
    NonPositiveSize { n1: f64, n2: f64 },

    #[error("pooled proportion {pooled} leaves no variance but proportions differ")]
    DegenerateVariance { pooled: f64 },

    #[error("contingency table has an empty row or column")]
    DegenerateTable,

    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("cannot resample {n} papers")]
    TooFewPapers { n: f64 },

    #[error("bootstrap settings out of range: {0}")]
    InvalidBootstrap(String),

    #[error("record `{0}` has no stability interval")]
    MissingBounds(String),

    #[error("vector value {value} at vertex {vertex} is negative")]
    NegativeVector { vertex: usize, value: f64 },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
