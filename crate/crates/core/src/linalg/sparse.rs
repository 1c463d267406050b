use std::io::Write;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

/// Complex matrix in compressed sparse row format.
///
/// Column indices are strictly increasing within each row. Duplicate
/// triplets are summed on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, Complex64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidInput(format!(
                    "triplet ({i}, {j}) outside a {nrows}x{ncols} matrix"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, then sort and merge columns within each row
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![Complex64::default(); triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut scratch: Vec<(usize, Complex64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            scratch.sort_by_key(|&(c, _)| c);
            for &(c, v) in &scratch {
                if col_indices.len() > row_offsets[i] && *col_indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Stored entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(p) => self.values[range.start + p],
            Err(_) => Complex64::default(),
        }
    }

    /// `y = M x`.
    pub fn spmv(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = vec![Complex64::default(); self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_len(self.ncols, x.len())?;
        check_len(self.nrows, y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for p in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[p] * x[self.col_indices[p]];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// `y = conj(M)^T x`.
    pub fn spmv_conjugate_transpose(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.nrows, x.len())?;
        let mut y = vec![Complex64::default(); self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            for p in self.row_offsets[i]..self.row_offsets[i + 1] {
                y[self.col_indices[p]] += self.values[p].conj() * xi;
            }
        }
        Ok(y)
    }

    /// True when every stored `(i, j, v)` has a stored partner `(j, i, v)`
    /// with bitwise equal value.
    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        (0..self.nrows).all(|i| {
            self.row(i).all(|(j, v)| {
                let range = self.row_offsets[j]..self.row_offsets[j + 1];
                match self.col_indices[range.clone()].binary_search(&i) {
                    Ok(p) => self.values[range.start + p] == v,
                    Err(_) => false,
                }
            })
        })
    }

    /// True when all imaginary parts are exactly zero.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Lower and upper bandwidth of the stored profile.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for i in 0..self.nrows {
            let range = self.row_offsets[i]..self.row_offsets[i + 1];
            if range.is_empty() {
                continue;
            }
            let first = self.col_indices[range.start];
            let last = self.col_indices[range.end - 1];
            lower = lower.max(i.saturating_sub(first));
            upper = upper.max(last.saturating_sub(i));
        }
        (lower, upper)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Dense row-major copy. Meant for small matrices only.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut dense = vec![vec![Complex64::default(); self.ncols]; self.nrows];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        dense
    }

    /// Writes the stored entries as `i j re im` lines, 0-based.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                writeln!(out, "{i} {j} {:e} {:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}
