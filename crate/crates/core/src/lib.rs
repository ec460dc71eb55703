//! Exact point counting over finite fields for diagonal-type equations,
//! with exact certification of square-root error bounds.

pub mod arith;
pub mod bounds;
pub mod conv;
pub mod counter;
pub mod error;
pub mod existence;
pub mod geometry;
pub mod gf;
pub mod harness;
pub mod par;
pub mod poly;
pub mod rng;

pub use error::{Error, Result};
pub use gf::{FieldCtx, FieldElement, FieldSpec};
pub use par::Execution;
pub use poly::{SparsePoly, Term, UniPoly, WeightedPoly};
