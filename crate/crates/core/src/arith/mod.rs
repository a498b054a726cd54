//! Exact sparse multivariate polynomial arithmetic over `Q`.

mod gcd;
mod poly;
pub mod rational;
pub mod text;

pub use gcd::{gcd, gcd_all};
pub use poly::{monomials_up_to, Monomial, Poly, Vars};
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("variable lists differ: {left} vs {right}")]
    VarMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no image given for variable `{0}`")]
    MissingImage(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not divisible")]
    NotDivisible,
    #[error("gcd of two zero polynomials")]
    GcdOfZeros,
}
