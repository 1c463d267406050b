//! Finite element solver for the 2D Helmholtz impedance problem with the
//! ORAS (restricted additive Schwarz with impedance transmission
//! conditions) preconditioner, and tools for measuring how powers of its
//! error propagation matrix contract.

// negated float comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod decomposition;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod oras;

pub use error::{Error, Result};
