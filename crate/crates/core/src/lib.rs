//! Orbit types of split O₂ₙ on tuples of isotropic flags over exact fields.

pub mod canonical;
pub mod classifier;
pub mod error;
pub mod field;
pub mod flags;
pub mod geometry;
pub mod invariants;
pub mod matrix;
pub mod orbit;
pub mod subspace;
pub mod witness;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rationals};
