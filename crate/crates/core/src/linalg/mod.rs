//! Complex sparse, band and dense kernels plus the two iterative methods
//! (GMRES, plus generalized power and Lanczos iterations) used by the analysis.

mod factor;
mod gmres;
mod power;
mod sparse;

use num_complex::Complex64;

pub use factor::{
    band_factorize, real_spd_factorize, BandCholesky, BandLu, DenseLu, Factorization,
    DENSE_FALLBACK_LIMIT,
};
pub use gmres::{gmres, GmresResult, GmresStatus};
pub use power::{
    lanczos_generalized, power_iteration_generalized, Estimator, PowerIterationOptions, PowerIterationResult, StartVector,
    RAYLEIGH_RESIDUAL_FLAG,
};
pub use sparse::CsrMatrix;

pub type Vector = Vec<Complex64>;

/// Euclidean norm.
pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `sum conj(x_i) y_i`
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
