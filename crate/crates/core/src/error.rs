use thiserror::Error;

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("local nilpotency inconclusive after {cap} iterations")]
    NilpotencyInconclusive { cap: usize },
    #[error("logarithm series did not terminate within {cap} terms (not unipotent, or cap too small)")]
    LogarithmCapExceeded { cap: usize },
    #[error("{0} is not in the kernel")]
    NotInKernel(String),
    #[error("no solution within degree bound {bound}: {what}")]
    NoSolution { what: String, bound: u32 },
    #[error("cannot invert: {0}")]
    NotInvertible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not an element of N: {0}")]
    NotInN(String),
    #[error("internal consistency fault: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
