//! Exact computation with locally nilpotent derivations of `Q[x, y, z]`, the
//! unipotent automorphisms they exponentiate to, and the centralizers of such
//! automorphisms.

pub mod arith;
pub mod automorphisms;
pub mod checks;
pub mod corpus;
pub mod cyclotomic;
pub mod delta_family;
pub mod derivations;
pub mod error;
pub mod groupmodel;
pub mod linalg;
pub mod quotient_geometry;
pub mod random;
pub mod sweep;

pub use error::{Error, Result};
