//! Dense reference helpers shared by the integration tests.
#![allow(dead_code)]

use helmholtz_oras::experiment::{Experiment, Geometry};
use helmholtz_oras::linalg::CsrMatrix;
use helmholtz_oras::decomposition::Cover;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn dense(m: &CsrMatrix) -> DMatrix<C> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for (j, v) in m.row(i) {
            d[(i, j)] = v;
        }
    }
    d
}

pub fn random_vector(n: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn to_dvec(v: &[C]) -> DVector<C> {
    DVector::from_column_slice(v)
}

pub fn rel_diff(a: &[C], b: &[C]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Small cells for dense comparisons: a coarse mesh constant keeps the
/// systems to a few hundred unknowns.
pub fn small(geometry: Geometry, k: f64, n: usize, degree: usize) -> Experiment {
    let overlap = match geometry {
        Geometry::Strip => 1.0 / 6.0,
        Geometry::Checkerboard => 0.25,
    };
    Experiment::build(geometry, k, n, degree, 4.0, overlap).unwrap()
}

/// Dense restriction `R_l` and weighted restriction `R̃_l`.
pub fn dense_restrictions(cover: &Cover, l: usize) -> (DMatrix<C>, DMatrix<C>) {
    let s = cover.subdomain(l);
    let w = cover.weights(l).unwrap();
    let mut r = DMatrix::zeros(s.n_dofs(), cover.n_global());
    let mut rt = DMatrix::zeros(s.n_dofs(), cover.n_global());
    for (i, &g) in s.node_ids.iter().enumerate() {
        r[(i, g)] = C::new(1.0, 0.0);
        rt[(i, g)] = C::new(w[i], 0.0);
    }
    (r, rt)
}

/// Dense `B⁻¹ = Σ R̃ᵀ A_l⁻¹ R` and `E = I - B⁻¹ A`.
pub fn dense_b_inverse_and_e(exp: &Experiment) -> (DMatrix<C>, DMatrix<C>) {
    let op = &exp.operator;
    let n = op.n_dofs();
    let mut b = DMatrix::zeros(n, n);
    for l in 0..op.cover().len() {
        let (r, rt) = dense_restrictions(op.cover(), l);
        let a_inv = dense(op.local_matrix(l)).try_inverse().unwrap();
        b += rt.transpose() * a_inv * r;
    }
    let e = DMatrix::identity(n, n) - &b * dense(op.matrix());
    (b, e)
}

/// `‖Eˢ‖` in the `D_k` norm: the largest singular value of `Lᵀ Eˢ L⁻ᵀ`
/// with `D_k = L Lᵀ`.
pub fn dense_norm(exp: &Experiment, e: &DMatrix<C>, s: usize) -> f64 {
    let d = dense(exp.operator.metric().unwrap()).map(|v| v.re);
    let l = d.cholesky().unwrap().l();
    let lc = l.map(|v| C::new(v, 0.0));
    let lt_inv = lc.transpose().try_inverse().unwrap();
    let es = e.pow(s as u32);
    let f = lc.transpose() * es * lt_inv;
    f.singular_values().max()
}
