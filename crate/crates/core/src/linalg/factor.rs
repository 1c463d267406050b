//! Direct solvers for the assembled systems.
//!
//! The structured meshes number nodes lexicographically, so every matrix
//! has a narrow band. Band LU with partial pivoting handles the complex
//! symmetric Helmholtz matrices, band Cholesky handles the real SPD metric
//! matrix, and small systems fall back to dense LU.

use num_complex::Complex64;

use super::sparse::CsrMatrix;
use crate::error::{check_len, Error, Result};

/// Systems below this size are factorized densely.
pub const DENSE_FALLBACK_LIMIT: usize = 400;

/// Relative pivot threshold for declaring a matrix singular.
const PIVOT_TOLERANCE: f64 = 1e-14;

/// A factorized square matrix.
#[derive(Debug, Clone)]
pub enum Factorization {
    BandLu(BandLu),
    DenseLu(DenseLu),
    Cholesky(BandCholesky),
}

impl Factorization {
    pub fn dim(&self) -> usize {
        match self {
            Factorization::BandLu(f) => f.n,
            Factorization::DenseLu(f) => f.n,
            Factorization::Cholesky(f) => f.n,
        }
    }

    /// Solves `M y = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.dim(), b.len())?;
        let mut y = b.to_vec();
        match self {
            Factorization::BandLu(f) => f.solve_in_place(&mut y),
            Factorization::DenseLu(f) => f.solve_in_place(&mut y),
            Factorization::Cholesky(f) => f.solve_in_place(&mut y),
        }
        Ok(y)
    }

    /// Solves `conj(M) y = b`, which is `M^H y = b` for complex symmetric `M`.
    pub fn solve_conj(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let conj: Vec<Complex64> = b.iter().map(|v| v.conj()).collect();
        let mut y = self.solve(&conj)?;
        y.iter_mut().for_each(|v| *v = v.conj());
        Ok(y)
    }
}

/// Factorizes a general square matrix: band LU with partial pivoting, or
/// dense LU below [`DENSE_FALLBACK_LIMIT`] unknowns.
pub fn band_factorize(m: &CsrMatrix) -> Result<Factorization> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    if m.nrows() < DENSE_FALLBACK_LIMIT {
        DenseLu::factorize(m).map(Factorization::DenseLu)
    } else {
        BandLu::factorize(m).map(Factorization::BandLu)
    }
}

/// Cholesky factorization of a real symmetric positive definite matrix.
/// The solve acts on real and imaginary parts of complex right-hand sides.
pub fn real_spd_factorize(m: &CsrMatrix) -> Result<Factorization> {
    BandCholesky::factorize(m).map(Factorization::Cholesky)
}

/// Band LU with row interchanges inside the band.
///
/// Row `r` is stored densely over columns `r - kl ..= r + kl + ku`, wide
/// enough to hold the fill produced by pivoting. Multipliers of step `j`
/// stay at their physical rows and are never permuted afterwards, so the
/// solve replays the interchanges and eliminations in order.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    rows: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factorize(m: &CsrMatrix) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::NotSquare { nrows: n, ncols: m.ncols() });
        }
        let (kl, ku) = m.bandwidth();
        let width = 2 * kl + ku + 1;
        let mut rows = vec![Complex64::default(); n * width];
        for i in 0..n {
            for (j, v) in m.row(i) {
                rows[i * width + (j + kl - i)] = v;
            }
        }
        let scale = m.max_abs();
        let threshold = PIVOT_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        let mut pivots = vec![0usize; n];
        // column offset of `col` inside stored row `row`
        let at = |row: usize, col: usize| row * width + (col + kl - row);

        for j in 0..n {
            let last_row = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = rows[at(j, j)].norm();
            for r in j + 1..=last_row {
                let mag = rows[at(r, j)].norm();
                if mag > best {
                    best = mag;
                    p = r;
                }
            }
            if best < threshold || scale == 0.0 {
                return Err(Error::Singular { pivot: j, magnitude: best });
            }
            pivots[j] = p;
            let last_col = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=last_col {
                    rows.swap(at(j, c), at(p, c));
                }
            }
            let pivot = rows[at(j, j)];
            let inv = pivot.inv();
            let span = last_col - j;
            for r in j + 1..=last_row {
                let lr = rows[at(r, j)] * inv;
                rows[at(r, j)] = lr;
                if lr == Complex64::default() {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(at(r, j + 1));
                let src = &head[at(j, j + 1)..at(j, j + 1) + span];
                for (dst, &s) in tail[..span].iter_mut().zip(src) {
                    *dst -= lr * s;
                }
            }
        }
        Ok(Self { n, kl, ku, width, rows, pivots })
    }

    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku, width) = (self.n, self.kl, self.ku, self.width);
        let at = |row: usize, col: usize| row * width + (col + kl - row);
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj == Complex64::default() {
                continue;
            }
            for r in j + 1..=(j + kl).min(n - 1) {
                b[r] -= self.rows[at(r, j)] * bj;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            let last = (i + kl + ku).min(n - 1);
            let base = at(i, i);
            for (off, c) in (i + 1..=last).enumerate() {
                acc -= self.rows[base + 1 + off] * b[c];
            }
            b[i] = acc / self.rows[base];
        }
    }
}

/// Dense LU with partial pivoting, row-major.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl DenseLu {
    pub fn factorize(m: &CsrMatrix) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::NotSquare { nrows: n, ncols: m.ncols() });
        }
        let mut lu = vec![Complex64::default(); n * n];
        for i in 0..n {
            for (j, v) in m.row(i) {
                lu[i * n + j] = v;
            }
        }
        let scale = m.max_abs();
        let threshold = PIVOT_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        let mut pivots = vec![0usize; n];
        for j in 0..n {
            let (p, best) = (j..n)
                .map(|r| (r, lu[r * n + j].norm()))
                .fold((j, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < threshold || scale == 0.0 {
                return Err(Error::Singular { pivot: j, magnitude: best.max(0.0) });
            }
            pivots[j] = p;
            if p != j {
                for c in 0..n {
                    lu.swap(j * n + c, p * n + c);
                }
            }
            let inv = lu[j * n + j].inv();
            for r in j + 1..n {
                let lr = lu[r * n + j] * inv;
                lu[r * n + j] = lr;
                if lr == Complex64::default() {
                    continue;
                }
                for c in j + 1..n {
                    let u = lu[j * n + c];
                    lu[r * n + c] -= lr * u;
                }
            }
        }
        Ok(Self { n, lu, pivots })
    }

    fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for j in 0..n {
            b.swap(j, self.pivots[j]);
        }
        for i in 0..n {
            let mut acc = b[i];
            for c in 0..i {
                acc -= self.lu[i * n + c] * b[c];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in i + 1..n {
                acc -= self.lu[i * n + c] * b[c];
            }
            b[i] = acc / self.lu[i * n + i];
        }
    }
}

/// Band Cholesky `M = L L^T` of a real SPD matrix. Row `i` of `L` is
/// stored over columns `i - kd ..= i`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    kd: usize,
    rows: Vec<f64>,
}

impl BandCholesky {
    pub fn factorize(m: &CsrMatrix) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::NotSquare { nrows: n, ncols: m.ncols() });
        }
        if !m.is_real() {
            return Err(Error::InvalidInput(
                "Cholesky factorization needs a real matrix".into(),
            ));
        }
        let (lower, upper) = m.bandwidth();
        let kd = lower.max(upper);
        let w = kd + 1;
        let mut rows = vec![0.0f64; n * w];
        for i in 0..n {
            for (j, v) in m.row(i) {
                if j <= i {
                    rows[i * w + (j + kd - i)] = v.re;
                }
            }
        }
        for i in 0..n {
            let start = i.saturating_sub(kd);
            for j in start..=i {
                // dot of L[i, start'..j] and L[j, start'..j]
                let lo = start.max(j.saturating_sub(kd));
                let mut acc = rows[i * w + (j + kd - i)];
                let li = i * w + (lo + kd - i);
                let lj = j * w + (lo + kd - j);
                for t in 0..j - lo {
                    acc -= rows[li + t] * rows[lj + t];
                }
                if j == i {
                    if acc <= 0.0 || !acc.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    rows[i * w + kd] = acc.sqrt();
                } else {
                    rows[i * w + (j + kd - i)] = acc / rows[j * w + kd];
                }
            }
        }
        Ok(Self { n, kd, rows })
    }

    fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        for i in 0..n {
            let lo = i.saturating_sub(kd);
            let mut acc = b[i];
            let base = i * w + (lo + kd - i);
            for (t, c) in (lo..i).enumerate() {
                acc -= b[c] * self.rows[base + t];
            }
            b[i] = acc / self.rows[i * w + kd];
        }
        for i in (0..n).rev() {
            let yi = b[i] / self.rows[i * w + kd];
            b[i] = yi;
            let lo = i.saturating_sub(kd);
            let base = i * w + (lo + kd - i);
            for (t, c) in (lo..i).enumerate() {
                b[c] -= yi * self.rows[base + t];
            }
        }
    }
}
