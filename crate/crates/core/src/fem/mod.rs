//! Lagrange P1/P2 spaces and assembly of the Helmholtz impedance form, the
//! load vector and the k-weighted H¹ metric.

mod assembly;
mod problem;
mod quadrature;
mod space;

pub use assembly::{
    apply_helmholtz, assemble_helmholtz, assemble_load, assemble_metric_dk, l2_error,
};
pub use problem::ProblemData;
pub use space::FeSpace;
