use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or checking a structure.
///
/// The variants fall into three families that the CLI maps onto exit codes:
/// input errors, resource bounds, and falsification of an audited claim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("table is not associative: ({a}*{b})*{c} = {lhs} but {a}*({b}*{c}) = {rhs}")]
    NonAssociative {
        a: usize,
        b: usize,
        c: usize,
        lhs: usize,
        rhs: usize,
    },
    #[error("element id {id} out of range (order {order})")]
    OutOfRange { id: usize, order: usize },
    #[error("resource bound exceeded: {what} needs {size}, cap is {cap}")]
    ResourceBound { what: String, size: u128, cap: u128 },
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("construction requires n ≥ 3 (got n = {0})")]
    RankTooSmall(usize),
    #[error("verification failed: {0}")]
    Falsified(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than by a failed audit.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::ResourceBound { .. } | Error::Falsified(_))
    }
}
