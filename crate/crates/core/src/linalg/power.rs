use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Vector;
use crate::error::{check_len, Result};

/// Rayleigh-quotient residuals above this are flagged as a possible
/// cluster of near-equal top eigenvalues.
pub const RAYLEIGH_RESIDUAL_FLAG: f64 = 1e-4;

/// Starting vector for [`power_iteration_generalized`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartVector {
    Ones,
    /// Entries drawn uniformly from the unit square of the complex plane
    /// with a ChaCha8 generator seeded by the value.
    Seeded(u64),
}

impl StartVector {
    pub fn build(self, n: usize) -> Vector {
        match self {
            StartVector::Ones => vec![Complex64::new(1.0, 0.0); n],
            StartVector::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerIterationOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub start: StartVector,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 2000,
            start: StartVector::Ones,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerIterationResult {
    /// Estimate of the largest eigenvalue.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `|C x - lambda x|_M / (lambda |x|_M)` at the final iterate.
    pub rayleigh_residual: f64,
}

impl PowerIterationResult {
    /// True when the final Rayleigh residual suggests clustered top
    /// eigenvalues.
    pub fn clustered(&self) -> bool {
        self.rayleigh_residual > RAYLEIGH_RESIDUAL_FLAG
    }
}

/// Largest eigenvalue of an operator `C` that is self-adjoint and positive
/// semidefinite in the inner product `metric_inner`.
///
/// Iterates `x <- C x / |C x|_M` and tracks the Rayleigh quotient
/// `<x, C x>_M / <x, x>_M` until its relative change drops below `tol`.
pub fn power_iteration_generalized<C, M>(
    n: usize,
    mut apply_c: C,
    metric_inner: M,
    options: PowerIterationOptions,
) -> Result<PowerIterationResult>
where
    C: FnMut(&[Complex64]) -> Result<Vector>,
    M: Fn(&[Complex64], &[Complex64]) -> Result<Complex64>,
{
    let metric_norm = |x: &[Complex64]| -> Result<f64> { Ok(metric_inner(x, x)?.re.max(0.0).sqrt()) };

    let mut x = options.start.build(n);
    let nx = metric_norm(&x)?;
    if nx == 0.0 {
        return Ok(PowerIterationResult {
            eigenvalue: 0.0,
            iterations: 0,
            converged: true,
            rayleigh_residual: 0.0,
        });
    }
    x.iter_mut().for_each(|v| *v /= nx);

    let mut previous: Option<f64> = None;
    let mut result = PowerIterationResult {
        eigenvalue: 0.0,
        iterations: 0,
        converged: false,
        rayleigh_residual: f64::INFINITY,
    };
    for it in 1..=options.max_iter {
        let y = apply_c(&x)?;
        check_len(n, y.len())?;
        let lambda = metric_inner(&x, &y)?.re;
        let ny = metric_norm(&y)?;
        result.iterations = it;
        result.eigenvalue = lambda.max(0.0);

        if ny == 0.0 {
            result.eigenvalue = 0.0;
            result.converged = true;
            result.rayleigh_residual = 0.0;
            return Ok(result);
        }
        // |y - lambda x|^2 = |y|^2 - lambda^2 for unit x and real lambda
        let gap = (ny * ny - lambda * lambda).max(0.0).sqrt();
        result.rayleigh_residual = gap / lambda.abs().max(f64::MIN_POSITIVE);

        if let Some(prev) = previous {
            if (lambda - prev).abs() <= options.tol * lambda.abs() {
                result.converged = true;
                return Ok(result);
            }
        }
        previous = Some(lambda);
        x = y;
        x.iter_mut().for_each(|v| *v /= ny);
    }
    Ok(result)
}

/// Which eigenvalue method backs a norm estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// [`power_iteration_generalized`].
    Power,
    /// [`lanczos_generalized`].
    #[default]
    Lanczos,
}

impl std::str::FromStr for Estimator {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "power" => Ok(Estimator::Power),
            "lanczos" => Ok(Estimator::Lanczos),
            other => Err(crate::error::Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::Power => "power",
            Estimator::Lanczos => "lanczos",
        })
    }
}

/// Largest eigenvalue of an operator `C` that is self-adjoint and positive
/// semidefinite in the inner product `<x, y>_M = x^H M y`, by Lanczos with
/// full reorthogonalization.
///
/// `apply_metric` applies the Hermitian positive definite `M`. Stops when
/// the Ritz residual `beta_j |z_j|` of the top Ritz pair falls below
/// `tol * theta`; the result reports that relative residual. The basis is
/// kept in memory, so `max_iter` bounds storage at `max_iter` vectors.
pub fn lanczos_generalized<C, M>(
    n: usize,
    mut apply_c: C,
    apply_metric: M,
    options: PowerIterationOptions,
) -> Result<PowerIterationResult>
where
    C: FnMut(&[Complex64]) -> Result<Vector>,
    M: Fn(&[Complex64]) -> Result<Vector>,
{
    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let mut result = PowerIterationResult {
        eigenvalue: 0.0,
        iterations: 0,
        converged: true,
        rayleigh_residual: 0.0,
    };

    let mut v = options.start.build(n);
    let mut mv = apply_metric(&v)?;
    check_len(n, mv.len())?;
    let nv = dot(&v, &mv).re.max(0.0).sqrt();
    if nv == 0.0 {
        return Ok(result);
    }
    v.iter_mut().for_each(|x| *x /= nv);
    mv.iter_mut().for_each(|x| *x /= nv);

    // basis vectors and their images under M
    let mut basis: Vec<Vector> = Vec::new();
    let mut metric_basis: Vec<Vector> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let steps = options.max_iter.min(n).max(1);
    result.converged = false;
    for it in 1..=steps {
        let mut w = apply_c(&v)?;
        check_len(n, w.len())?;
        basis.push(v);
        metric_basis.push(mv);
        let j = basis.len() - 1;

        let mut a = 0.0;
        for _pass in 0..2 {
            for (i, (b, mb)) in basis.iter().zip(&metric_basis).enumerate() {
                let c = dot(mb, &w);
                if i == j {
                    a += c.re;
                }
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        alpha.push(a);
        let mw = apply_metric(&w)?;
        let b = dot(&w, &mw).re.max(0.0).sqrt();

        let (theta, last) = tridiagonal_top_eigenpair(&alpha, &beta);
        result.iterations = it;
        result.eigenvalue = theta.max(0.0);
        let scale = alpha.iter().chain(&beta).fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            result.converged = true;
            result.rayleigh_residual = 0.0;
            return Ok(result);
        }
        let residual = b * last.abs();
        result.rayleigh_residual = residual / theta.abs().max(f64::MIN_POSITIVE);
        // b tiny relative to T: the Krylov space is invariant
        if residual <= options.tol * theta.abs() || b <= 1e-14 * scale {
            result.converged = true;
            return Ok(result);
        }
        beta.push(b);
        v = w.into_iter().map(|x| x / b).collect();
        mv = mw.into_iter().map(|x| x / b).collect();
    }
    Ok(result)
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`, and the last component of its unit
/// eigenvector. Implicit QL with Wilkinson shifts, accumulating only the
/// last row of the eigenvector matrix.
pub(crate) fn tridiagonal_top_eigenpair(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    debug_assert!(n >= 1 && off.len() + 1 >= n);
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.iter().take(n - 1).copied().chain(std::iter::once(0.0)).collect();
    let mut z = vec![0.0; n];
    z[n - 1] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let top = (0..n).fold(0, |best, i| if d[i] > d[best] { i } else { best });
    (d[top], z[top])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        Ok(x.iter().zip(y).map(|(a, b)| a.conj() * b).sum())
    }

    #[test]
    fn diagonal_operator() {
        let d = [1.0, 3.0, 2.0];
        let res = power_iteration_generalized(
            3,
            |x| Ok(x.iter().zip(d).map(|(v, s)| v * s).collect()),
            euclid,
            PowerIterationOptions::default(),
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.eigenvalue - 3.0).abs() < 1e-7);
    }

    #[test]
    fn zero_operator() {
        let res = power_iteration_generalized(
            4,
            |x| Ok(vec![Complex64::default(); x.len()]),
            euclid,
            PowerIterationOptions::default(),
        )
        .unwrap();
        assert_eq!(res.eigenvalue, 0.0);
        assert!(res.converged);
    }

    #[test]
    fn unconverged_is_flagged() {
        let d = [1.0, 0.999, 0.5];
        let res = power_iteration_generalized(
            3,
            |x| Ok(x.iter().zip(d).map(|(v, s)| v * s).collect()),
            euclid,
            PowerIterationOptions { tol: 1e-14, max_iter: 5, start: StartVector::Seeded(3) },
        )
        .unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 5);
    }

    #[test]
    fn seeded_start_is_deterministic() {
        assert_eq!(StartVector::Seeded(7).build(5), StartVector::Seeded(7).build(5));
        assert_ne!(StartVector::Seeded(7).build(5), StartVector::Seeded(8).build(5));
    }
    fn euclid_apply(x: &[Complex64]) -> Result<Vector> {
        Ok(x.to_vec())
    }

    #[test]
    fn tridiagonal_two_by_two() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3, top vector (1, 1)/sqrt 2
        let (theta, last) = tridiagonal_top_eigenpair(&[2.0, 2.0], &[1.0]);
        assert!((theta - 3.0).abs() < 1e-14);
        assert!((last.abs() - 0.5f64.sqrt()).abs() < 1e-14);
        let (theta, last) = tridiagonal_top_eigenpair(&[5.0], &[]);
        assert_eq!((theta, last), (5.0, 1.0));
    }

    #[test]
    fn tridiagonal_laplacian() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(j pi / (n + 1))
        let n = 40;
        let (theta, _) = tridiagonal_top_eigenpair(&vec![2.0; n], &vec![-1.0; n - 1]);
        let exact = 2.0 - 2.0 * (n as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((theta - exact).abs() < 1e-12);
    }

    #[test]
    fn lanczos_diagonal_operator() {
        let d: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 * 0.1).collect();
        let res = lanczos_generalized(
            50,
            |x| Ok(x.iter().zip(&d).map(|(v, s)| v * s).collect()),
            euclid_apply,
            PowerIterationOptions { start: StartVector::Seeded(1), ..Default::default() },
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.eigenvalue - 5.9).abs() < 1e-10);
        assert!(res.iterations <= 50);
    }

    #[test]
    fn lanczos_zero_and_rank_one() {
        let res = lanczos_generalized(
            4,
            |x| Ok(vec![Complex64::default(); x.len()]),
            euclid_apply,
            PowerIterationOptions::default(),
        )
        .unwrap();
        assert_eq!(res.eigenvalue, 0.0);
        assert!(res.converged);
        // x -> u (u^H x) with |u|^2 = 3
        let res = lanczos_generalized(
            3,
            |x| {
                let c: Complex64 = x.iter().sum();
                Ok(vec![c; 3])
            },
            euclid_apply,
            PowerIterationOptions { start: StartVector::Seeded(5), ..Default::default() },
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.eigenvalue - 3.0).abs() < 1e-12);
    }

    #[test]
    fn estimator_names() {
        assert_eq!("power".parse::<Estimator>().unwrap(), Estimator::Power);
        assert_eq!(Estimator::Lanczos.to_string(), "lanczos");
        assert!("qr".parse::<Estimator>().is_err());
    }
}
