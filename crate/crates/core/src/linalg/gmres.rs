use num_complex::Complex64;

use super::{norm2, Vector};
use crate::error::{check_len, Error, Result};

/// Arnoldi vectors shorter than this (relative to the residual norm) mean
/// the Krylov space is invariant.
const BREAKDOWN_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmresStatus {
    Converged,
    /// The Krylov space became invariant. The solution is the exact
    /// minimizer over that space.
    Breakdown,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub solution: Vector,
    pub iterations: usize,
    /// True relative residuals `|b - A x_j| / |b|`, starting with the zero
    /// initial guess (entry 0 is 1.0).
    pub residual_history: Vec<f64>,
    pub status: GmresStatus,
}

impl GmresResult {
    pub fn converged(&self) -> bool {
        self.status == GmresStatus::Converged
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&0.0)
    }
}

/// Full (unrestarted) right-preconditioned GMRES from a zero initial guess.
///
/// Solves `A B^{-1} y = b` and returns `x = B^{-1} y`. After every Arnoldi
/// step the iterate is formed and its true residual recomputed; the
/// iteration stops at the first iterate with true relative residual
/// `<= tol`.
pub fn gmres<A, P>(
    mut apply_operator: A,
    mut apply_preconditioner: P,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<GmresResult>
where
    A: FnMut(&[Complex64]) -> Result<Vector>,
    P: FnMut(&[Complex64]) -> Result<Vector>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("GMRES tolerance must be positive, got {tol}")));
    }
    let n = b.len();
    let beta = norm2(b);
    if beta == 0.0 {
        return Ok(GmresResult {
            solution: vec![Complex64::default(); n],
            iterations: 0,
            residual_history: vec![0.0],
            status: GmresStatus::Converged,
        });
    }

    let mut basis: Vec<Vector> = vec![b.iter().map(|v| v / beta).collect()];
    // column j of the Hessenberg matrix, after Givens rotations (upper triangle)
    let mut r_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut rotations: Vec<(f64, Complex64)> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut solution = vec![Complex64::default(); n];
    let mut status = GmresStatus::MaxIterations;

    for j in 0..max_iter {
        let z = apply_preconditioner(&basis[j])?;
        check_len(n, z.len())?;
        let mut w = apply_operator(&z)?;
        check_len(n, w.len())?;

        // modified Gram-Schmidt, with one reorthogonalization pass
        let mut h = vec![Complex64::default(); j + 2];
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let coef = dot(v, &w);
                h[i] += coef;
                axpy(-coef, v, &mut w);
            }
        }
        let h_next = norm2(&w);
        h[j + 1] = Complex64::new(h_next, 0.0);

        for (i, &(cs, sn)) in rotations.iter().enumerate() {
            let (hi, hn) = (h[i], h[i + 1]);
            h[i] = cs * hi + sn * hn;
            h[i + 1] = -sn.conj() * hi + cs * hn;
        }
        let (cs, sn) = givens(h[j], h[j + 1]);
        h[j] = cs * h[j] + sn * h[j + 1];
        h[j + 1] = Complex64::default();
        rotations.push((cs, sn));
        let gj = g[j];
        g[j] = cs * gj;
        g.push(-sn.conj() * gj);
        h.truncate(j + 1);
        r_cols.push(h);

        // y solves the (j+1)x(j+1) triangular system R y = g
        let m = j + 1;
        let mut y = vec![Complex64::default(); m];
        for i in (0..m).rev() {
            let mut acc = g[i];
            for (c, yc) in y.iter().enumerate().skip(i + 1) {
                acc -= r_cols[c][i] * yc;
            }
            y[i] = acc / r_cols[i][i];
        }
        let mut krylov = vec![Complex64::default(); n];
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut krylov);
        }
        solution = apply_preconditioner(&krylov)?;
        let ax = apply_operator(&solution)?;
        let residual: f64 = b
            .iter()
            .zip(&ax)
            .map(|(bi, ai)| (bi - ai).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / beta;
        history.push(residual);

        if residual <= tol {
            status = GmresStatus::Converged;
            break;
        }
        if h_next <= BREAKDOWN_TOLERANCE * beta {
            status = GmresStatus::Breakdown;
            break;
        }
        basis.push(w.iter().map(|v| v / h_next).collect());
    }

    Ok(GmresResult {
        solution,
        iterations: history.len() - 1,
        residual_history: history,
        status,
    })
}

/// `<u, v> = sum conj(u_i) v_i`
fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Rotation `(c, s)` with real `c` such that `[c s; -conj(s) c] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, Complex64::default());
    }
    if na == 0.0 {
        return (0.0, (b / nb).conj());
    }
    let r = na.hypot(nb);
    let phase = a / na;
    (na / r, phase * b.conj() / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_step() {
        let b: Vec<_> = (0..6).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let res = gmres(|x| Ok(x.to_vec()), |x| Ok(x.to_vec()), &b, 1e-10, 10).unwrap();
        assert!(res.converged());
        assert_eq!(res.iterations, 1);
        assert!(res.final_residual() < 1e-14);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let b = vec![Complex64::default(); 4];
        let res = gmres(|x| Ok(x.to_vec()), |x| Ok(x.to_vec()), &b, 1e-6, 10).unwrap();
        assert_eq!(res.iterations, 0);
        assert!(res.solution.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let b = vec![Complex64::new(1.0, 0.0)];
        assert!(gmres(|x| Ok(x.to_vec()), |x| Ok(x.to_vec()), &b, 0.0, 10).is_err());
    }

    #[test]
    fn reports_max_iterations() {
        // cyclic shift: GMRES makes no progress until the last step
        let n = 8;
        let shift = |x: &[Complex64]| -> Result<Vector> {
            Ok((0..x.len()).map(|i| x[(i + 1) % x.len()]).collect())
        };
        let mut b = vec![Complex64::default(); n];
        b[0] = Complex64::new(1.0, 0.0);
        let res = gmres(shift, |x| Ok(x.to_vec()), &b, 1e-10, 3).unwrap();
        assert_eq!(res.status, GmresStatus::MaxIterations);
        assert_eq!(res.residual_history.len(), 4);
        let res = gmres(shift, |x| Ok(x.to_vec()), &b, 1e-10, 20).unwrap();
        assert!(res.converged());
        assert_eq!(res.iterations, n);
    }
}
