//! Exact symbolic engine for supersymmetric Poisson vertex algebras.
//!
//! The crate builds, from finite-dimensional Lie superalgebra data, the
//! affine SUSY PVA brackets on an algebra of super differential polynomials,
//! reduces them to generalized W-algebras through gauge-fixing of odd Lax
//! operators, and derives the associated bi-Hamiltonian integrable
//! hierarchies.  All arithmetic is over exact rationals; every algebraic
//! identity the engine relies on can be re-verified mechanically through the
//! `check_*` entry points.

pub mod chibracket;
pub mod dsred;
pub mod error;
pub mod hierarchy;
pub mod liesuper;
pub mod linalg;
pub mod loopalg;
pub mod report;
pub mod superpoly;
pub mod textio;


pub use error::{Error, Result};
pub use liesuper::{GVector, LieSuperAlgebra, ReductionData};



pub use superpoly::{DerivedVar, Functional, Monomial, Parity, SPoly, VarSet, Variable};

/// Exact rational scalar used throughout the engine.
pub type Rat = num::BigRational;

/// Convenience constructor for integer rationals.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Convenience constructor for fractions.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}
