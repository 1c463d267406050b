//! The ORAS preconditioner
//!
//! ```text
//! B⁻¹ = Σ_ℓ R̃_ℓᵀ A_ℓ⁻¹ R_ℓ
//! ```
//!
//! where `A_ℓ` is the Helmholtz matrix of subdomain `ℓ` with the impedance
//! condition imposed on its whole boundary, together with the operators
//! used to study the preconditioned Richardson iteration: the error
//! propagation matrix `E = I - B⁻¹A`, its adjoint, the block operator
//! `T = (R - Q) R̃ᵀ` on concatenated local vectors, and the norms `‖Eˢ‖`
//! in the k-weighted H¹ norm.
//!
//! Everything is matrix-free on top of the factorized subdomain matrices.
//! Subdomain contributions are accumulated in ascending `ℓ`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::decomposition::Cover;
use crate::error::{check_len, Error, Result};
use crate::fem::{apply_helmholtz, assemble_helmholtz, assemble_metric_dk, FeSpace};
use crate::linalg::{
    band_factorize, gmres, inner, lanczos_generalized, power_iteration_generalized,
    real_spd_factorize, CsrMatrix, Estimator, Factorization, GmresResult, PowerIterationOptions,
    Vector,
};

/// Error and residual norms along a Richardson run, one entry per iterate
/// starting with the initial guess.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    /// `‖uⁿ - u*‖_{1,k}` against the direct solution `u*`.
    pub error_norms: Vec<f64>,
    /// Euclidean `‖f - A uⁿ‖`.
    pub residual_norms: Vec<f64>,
}

/// Estimate of `‖Eˢ‖` in the k-weighted H¹ norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub power: usize,
    pub norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub rayleigh_residual: f64,
}

#[derive(Debug)]
pub struct OrasOperator {
    space: FeSpace,
    k: f64,
    matrix: CsrMatrix,
    cover: Cover,
    local_matrices: Vec<CsrMatrix>,
    local_factors: Vec<Factorization>,
    metric: OnceLock<CsrMatrix>,
    metric_factor: OnceLock<Factorization>,
    global_factor: OnceLock<Factorization>,
}

impl OrasOperator {
    /// Assembles the global impedance matrix and factorizes every local
    /// matrix `A_ℓ`. The cover must carry partition-of-unity weights.
    pub fn new(space: FeSpace, k: f64, cover: Cover) -> Result<Self> {
        check_len(space.n_dofs(), cover.n_global())?;
        for l in 0..cover.len() {
            cover.weights(l)?;
        }
        let matrix = assemble_helmholtz(&space, k, space.mesh().boundary_edges())?;
        let mut local_matrices = Vec::with_capacity(cover.len());
        let mut local_factors = Vec::with_capacity(cover.len());
        for s in cover.subdomains() {
            let tag = |e: Error| Error::Subdomain { subdomain: s.id, source: Box::new(e) };
            let a_local = assemble_helmholtz(&s.local_space, k, s.boundary_edges()).map_err(tag)?;
            local_factors.push(band_factorize(&a_local).map_err(tag)?);
            local_matrices.push(a_local);
        }
        Ok(Self {
            space,
            k,
            matrix,
            cover,
            local_matrices,
            local_factors,
            metric: OnceLock::new(),
            metric_factor: OnceLock::new(),
            global_factor: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    /// Global Helmholtz matrix `A`.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn local_matrix(&self, l: usize) -> &CsrMatrix {
        &self.local_matrices[l]
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }

    /// Metric matrix `D_k`, assembled on first use.
    pub fn metric(&self) -> Result<&CsrMatrix> {
        if let Some(m) = self.metric.get() {
            return Ok(m);
        }
        let m = assemble_metric_dk(&self.space, self.k)?;
        Ok(self.metric.get_or_init(|| m))
    }

    fn metric_factor(&self) -> Result<&Factorization> {
        if let Some(f) = self.metric_factor.get() {
            return Ok(f);
        }
        let f = real_spd_factorize(self.metric()?)?;
        Ok(self.metric_factor.get_or_init(|| f))
    }

    fn global_factor(&self) -> Result<&Factorization> {
        if let Some(f) = self.global_factor.get() {
            return Ok(f);
        }
        let f = band_factorize(&self.matrix)?;
        Ok(self.global_factor.get_or_init(|| f))
    }

    /// Direct solution of `A u = f`.
    pub fn direct_solve(&self, f: &[Complex64]) -> Result<Vector> {
        self.global_factor()?.solve(f)
    }

    /// `‖v‖_{1,k} = sqrt(v^H D_k v)`.
    pub fn energy_norm(&self, v: &[Complex64]) -> Result<f64> {
        let dv = self.metric()?.spmv(v)?;
        Ok(inner(v, &dv).re.max(0.0).sqrt())
    }

    fn local_solve(&self, l: usize, rhs: &[Complex64]) -> Result<Vector> {
        self.local_factors[l].solve(rhs).map_err(|e| Error::Subdomain { subdomain: l, source: Box::new(e) })
    }

    fn local_solve_adjoint(&self, l: usize, rhs: &[Complex64]) -> Result<Vector> {
        self.local_factors[l]
            .solve_conj(rhs)
            .map_err(|e| Error::Subdomain { subdomain: l, source: Box::new(e) })
    }

    /// `B⁻¹ r = Σ_ℓ R̃_ℓᵀ A_ℓ⁻¹ R_ℓ r`.
    pub fn apply_b_inverse(&self, r: &[Complex64]) -> Result<Vector> {
        check_len(self.n_dofs(), r.len())?;
        let mut out = vec![Complex64::default(); self.n_dofs()];
        for l in 0..self.cover.len() {
            let local = self.local_solve(l, &self.cover.restrict(l, r)?)?;
            self.cover.add_prolong_weighted(l, &local, &mut out)?;
        }
        Ok(out)
    }

    /// `(B⁻¹)^H r = Σ_ℓ R_ℓᵀ (A_ℓ⁻¹)^H R̃_ℓ r`.
    pub fn apply_b_inverse_adjoint(&self, r: &[Complex64]) -> Result<Vector> {
        check_len(self.n_dofs(), r.len())?;
        let mut out = vec![Complex64::default(); self.n_dofs()];
        for l in 0..self.cover.len() {
            let local = self.local_solve_adjoint(l, &self.cover.restrict_weighted(l, r)?)?;
            self.cover.add_prolong_nodewise(l, &local, &mut out)?;
        }
        Ok(out)
    }

    /// `E v = v - B⁻¹ A v`.
    pub fn apply_e(&self, v: &[Complex64]) -> Result<Vector> {
        let av = self.matrix.spmv(v)?;
        let correction = self.apply_b_inverse(&av)?;
        Ok(v.iter().zip(correction).map(|(a, b)| a - b).collect())
    }

    /// `E^H v = v - A^H (B⁻¹)^H v`, with `A^H = conj(A)` by complex symmetry.
    pub fn apply_e_adjoint(&self, v: &[Complex64]) -> Result<Vector> {
        let w = self.apply_b_inverse_adjoint(v)?;
        let aw = self.matrix.spmv_conjugate_transpose(&w)?;
        Ok(v.iter().zip(aw).map(|(a, b)| a - b).collect())
    }

    /// `Eˢ v`.
    pub fn apply_e_power(&self, v: &[Complex64], s: usize) -> Result<Vector> {
        let mut x = v.to_vec();
        for _ in 0..s {
            x = self.apply_e(&x)?;
        }
        Ok(x)
    }

    /// Block operator `T = (R - Q) R̃ᵀ` on concatenated local vectors:
    /// with `g = Σ_ℓ R̃_ℓᵀ w_ℓ`, `(T w)_ℓ = R_ℓ g - A_ℓ⁻¹ R_ℓ A g`.
    pub fn apply_t_block(&self, w: &[Complex64]) -> Result<Vector> {
        check_len(self.cover.block_len(), w.len())?;
        let offsets = self.cover.block_offsets();
        let g = self.prolong_blocks(w)?;
        let ag = self.matrix.spmv(&g)?;
        let mut out = Vec::with_capacity(w.len());
        for l in 0..self.cover.len() {
            let q = self.local_solve(l, &self.cover.restrict(l, &ag)?)?;
            let rg = self.cover.restrict(l, &g)?;
            out.extend(rg.iter().zip(q).map(|(a, b)| a - b));
            debug_assert_eq!(out.len(), offsets[l + 1]);
        }
        Ok(out)
    }

    /// `R v`: the stacked restrictions `(R_1 v; ...; R_N v)`.
    pub fn restrict_blocks(&self, v: &[Complex64]) -> Result<Vector> {
        let mut out = Vec::with_capacity(self.cover.block_len());
        for l in 0..self.cover.len() {
            out.extend(self.cover.restrict(l, v)?);
        }
        Ok(out)
    }

    /// `R̃ᵀ w = Σ_ℓ R̃_ℓᵀ w_ℓ`.
    pub fn prolong_blocks(&self, w: &[Complex64]) -> Result<Vector> {
        check_len(self.cover.block_len(), w.len())?;
        let offsets = self.cover.block_offsets();
        let mut g = vec![Complex64::default(); self.n_dofs()];
        for l in 0..self.cover.len() {
            self.cover.add_prolong_weighted(l, &w[offsets[l]..offsets[l + 1]], &mut g)?;
        }
        Ok(g)
    }

    /// `n_steps` steps of `uⁿ⁺¹ = uⁿ + B⁻¹(f - A uⁿ)`. Returns the iterates
    /// `u¹ ... uⁿ` and the trace measured against the direct solution.
    pub fn richardson(
        &self,
        f: &[Complex64],
        u0: &[Complex64],
        n_steps: usize,
    ) -> Result<(Vec<Vector>, IterationTrace)> {
        if n_steps == 0 {
            return Err(Error::InvalidInput("Richardson needs at least one step".into()));
        }
        check_len(self.n_dofs(), f.len())?;
        check_len(self.n_dofs(), u0.len())?;
        let reference = self.direct_solve(f)?;
        let mut trace = IterationTrace::default();
        let mut record = |u: &[Complex64], r: &[Complex64]| -> Result<()> {
            let e: Vector = u.iter().zip(&reference).map(|(a, b)| a - b).collect();
            trace.error_norms.push(self.energy_norm(&e)?);
            trace.residual_norms.push(crate::linalg::norm2(r));
            Ok(())
        };

        let mut u = u0.to_vec();
        let mut iterates = Vec::with_capacity(n_steps);
        let mut residual = self.residual(f, &u)?;
        record(&u, &residual)?;
        for _ in 0..n_steps {
            let step = self.apply_b_inverse(&residual)?;
            u.iter_mut().zip(step).for_each(|(a, b)| *a += b);
            residual = self.residual(f, &u)?;
            record(&u, &residual)?;
            iterates.push(u.clone());
        }
        Ok((iterates, trace))
    }

    fn residual(&self, f: &[Complex64], u: &[Complex64]) -> Result<Vector> {
        let au = self.matrix.spmv(u)?;
        Ok(f.iter().zip(au).map(|(a, b)| a - b).collect())
    }

    /// One Richardson step in residual-correction form: the residual
    /// functional `F_h - a(uⁿ, ·)` is evaluated element by element, each
    /// local correction `δ_ℓ = A_ℓ⁻¹ R_ℓ(F_h - a(uⁿ, ·))` is solved for, and
    /// `uⁿ⁺¹ = uⁿ + Σ_ℓ R̃_ℓᵀ δ_ℓ`.
    pub fn residual_correction_step(&self, u_n: &[Complex64], f: &[Complex64]) -> Result<Vector> {
        let (u, _) = self.local_corrections(u_n, f)?;
        Ok(u)
    }

    /// The updated iterate together with the local corrections `δ_ℓ`.
    pub fn local_corrections(&self, u_n: &[Complex64], f: &[Complex64]) -> Result<(Vector, Vec<Vector>)> {
        check_len(self.n_dofs(), f.len())?;
        let au = apply_helmholtz(&self.space, self.k, self.space.mesh().boundary_edges(), u_n)?;
        let residual: Vector = f.iter().zip(au).map(|(a, b)| a - b).collect();
        let mut u_next = u_n.to_vec();
        let mut corrections = Vec::with_capacity(self.cover.len());
        for l in 0..self.cover.len() {
            let delta = self.local_solve(l, &self.cover.restrict(l, &residual)?)?;
            self.cover.add_prolong_weighted(l, &delta, &mut u_next)?;
            corrections.push(delta);
        }
        Ok((u_next, corrections))
    }

    /// `‖Eˢ‖ = sqrt(λ_max(D_k⁻¹ (E^H)ˢ D_k Eˢ))` by power iteration in the
    /// `D_k` inner product.
    pub fn norm_e_power(&self, s: usize, options: PowerIterationOptions) -> Result<NormEstimate> {
        self.norm_e_power_with(s, Estimator::Power, options)
    }

    /// As [`Self::norm_e_power`] with a choice of eigenvalue method.
    pub fn norm_e_power_with(
        &self,
        s: usize,
        estimator: Estimator,
        options: PowerIterationOptions,
    ) -> Result<NormEstimate> {
        if s == 0 {
            return Err(Error::InvalidInput("power must be at least 1".into()));
        }
        let metric = self.metric()?;
        let metric_factor = self.metric_factor()?;
        let apply_c = |x: &[Complex64]| -> Result<Vector> {
            let mut y = self.apply_e_power(x, s)?;
            y = metric.spmv(&y)?;
            for _ in 0..s {
                y = self.apply_e_adjoint(&y)?;
            }
            metric_factor.solve(&y)
        };
        let res = match estimator {
            Estimator::Power => {
                let metric_inner = |x: &[Complex64], y: &[Complex64]| -> Result<Complex64> {
                    Ok(inner(x, &metric.spmv(y)?))
                };
                power_iteration_generalized(self.n_dofs(), apply_c, metric_inner, options)?
            }
            Estimator::Lanczos => lanczos_generalized(self.n_dofs(), apply_c, |x| metric.spmv(x), options)?,
        };
        Ok(NormEstimate {
            power: s,
            norm: res.eigenvalue.sqrt(),
            converged: res.converged,
            iterations: res.iterations,
            rayleigh_residual: res.rayleigh_residual,
        })
    }

    /// GMRES on `A u = f` with `B⁻¹` as right preconditioner.
    pub fn gmres_solve(&self, f: &[Complex64], tol: f64, max_iter: usize) -> Result<GmresResult> {
        check_len(self.n_dofs(), f.len())?;
        gmres(|x| self.matrix.spmv(x), |x| self.apply_b_inverse(x), f, tol, max_iter)
    }
}
