use std::collections::HashSet;

use num_complex::Complex64;

use super::problem::ProblemData;
use super::quadrature::{edge_rule, TRIANGLE_RULE};
use super::space::{edge_values, reference_gradients, reference_values, FeSpace};
use crate::error::{check_len, Error, Result};
use crate::linalg::{CsrMatrix, Vector};
use crate::mesh::BoundaryEdge;

/// Element stiffness and mass matrices, row-major `n x n`.
struct ElementMatrices {
    stiffness: Vec<f64>,
    mass: Vec<f64>,
}

/// Affine map of the reference triangle onto triangle `e`.
struct ElementGeometry {
    origin: [f64; 2],
    jac: [[f64; 2]; 2],
    det: f64,
}

impl ElementGeometry {
    fn new(space: &FeSpace, e: usize) -> Self {
        let mesh = space.mesh();
        let [a, b, c] = mesh.triangles()[e].map(|v| mesh.vertices()[v]);
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        Self { origin: a, jac, det }
    }

    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * p[0] + self.jac[0][1] * p[1],
            self.origin[1] + self.jac[1][0] * p[0] + self.jac[1][1] * p[1],
        ]
    }

    /// Physical gradient `J^{-T} g`.
    fn gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let j = &self.jac;
        [
            (j[1][1] * g[0] - j[1][0] * g[1]) / self.det,
            (-j[0][1] * g[0] + j[0][0] * g[1]) / self.det,
        ]
    }

    fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }
}

fn element_matrices(space: &FeSpace, e: usize) -> ElementMatrices {
    let geo = ElementGeometry::new(space, e);
    let p = space.degree();
    let n = space.element_dofs()[e].len();
    let mut stiffness = vec![0.0; n * n];
    let mut mass = vec![0.0; n * n];
    for (q, w) in TRIANGLE_RULE {
        let w = w * geo.area();
        let phi = reference_values(p, q[0], q[1]);
        let grad: Vec<[f64; 2]> = reference_gradients(p, q[0], q[1])
            .into_iter()
            .map(|g| geo.gradient(g))
            .collect();
        for a in 0..n {
            for b in a..n {
                stiffness[a * n + b] += w * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
                mass[a * n + b] += w * phi[a] * phi[b];
            }
        }
    }
    // mirror so that symmetric pairs are bitwise equal
    for a in 0..n {
        for b in 0..a {
            stiffness[a * n + b] = stiffness[b * n + a];
            mass[a * n + b] = mass[b * n + a];
        }
    }
    ElementMatrices { stiffness, mass }
}

/// Boundary mass matrix `∫_e φ_a φ_b ds` on one edge, ordered like
/// [`FeSpace::edge_dofs`].
fn edge_mass(space: &FeSpace, edge: &BoundaryEdge) -> Vec<f64> {
    let mesh = space.mesh();
    let [a, b] = edge.vertices.map(|v| mesh.vertices()[v]);
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let p = space.degree();
    let n = p + 1;
    let mut m = vec![0.0; n * n];
    for (t, w) in edge_rule() {
        let phi = edge_values(p, t);
        for i in 0..n {
            for j in i..n {
                m[i * n + j] += w * len * phi[i] * phi[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            m[i * n + j] = m[j * n + i];
        }
    }
    m
}

fn check_boundary(space: &FeSpace, edges: &[BoundaryEdge]) -> Result<()> {
    let key = |e: &BoundaryEdge| {
        let [a, b] = e.vertices;
        (a.min(b), a.max(b), e.side)
    };
    let known: HashSet<_> = space.mesh().boundary_edges().iter().map(key).collect();
    match edges.iter().find(|e| !known.contains(&key(e))) {
        Some(e) => Err(Error::InvalidInput(format!(
            "edge {:?} ({}) is not a boundary edge of the mesh",
            e.vertices, e.side
        ))),
        None => Ok(()),
    }
}

/// Matrix of the Helmholtz impedance form
/// `a(u, v) = ∫ ∇u·∇v̄ - k² u v̄ - ik ∫_Γ u v̄`, where `Γ` is the union of
/// `impedance_boundary`. Entry `(i, j)` is `a(φ_j, φ_i)`; the matrix is
/// complex symmetric.
pub fn assemble_helmholtz(
    space: &FeSpace,
    k: f64,
    impedance_boundary: &[BoundaryEdge],
) -> Result<CsrMatrix> {
    check_boundary(space, impedance_boundary)?;
    let k2 = k * k;
    let mut triplets = Vec::new();
    for (e, dofs) in space.element_dofs().iter().enumerate() {
        let m = element_matrices(space, e);
        let n = dofs.len();
        for a in 0..n {
            for b in 0..n {
                let v = m.stiffness[a * n + b] - k2 * m.mass[a * n + b];
                triplets.push((dofs[a], dofs[b], Complex64::new(v, 0.0)));
            }
        }
    }
    for edge in impedance_boundary {
        let dofs = space.edge_dofs(edge);
        let m = edge_mass(space, edge);
        let n = dofs.len();
        for a in 0..n {
            for b in 0..n {
                triplets.push((dofs[a], dofs[b], Complex64::new(0.0, -k * m[a * n + b])));
            }
        }
    }
    CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(), &triplets)
}

/// Metric matrix of the k-weighted H¹ inner product,
/// `(D_k)_{pq} = ∫ ∇φ_p·∇φ_q + k² φ_p φ_q`. Real SPD.
pub fn assemble_metric_dk(space: &FeSpace, k: f64) -> Result<CsrMatrix> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
    }
    let k2 = k * k;
    let mut triplets = Vec::new();
    for (e, dofs) in space.element_dofs().iter().enumerate() {
        let m = element_matrices(space, e);
        let n = dofs.len();
        for a in 0..n {
            for b in 0..n {
                let v = m.stiffness[a * n + b] + k2 * m.mass[a * n + b];
                triplets.push((dofs[a], dofs[b], Complex64::new(v, 0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(space.n_dofs(), space.n_dofs(), &triplets)
}

/// Load vector `F(φ_i) = ∫ f φ_i + ∫_Γ g φ_i`.
pub fn assemble_load(
    space: &FeSpace,
    data: &ProblemData,
    impedance_boundary: &[BoundaryEdge],
) -> Result<Vector> {
    check_boundary(space, impedance_boundary)?;
    let p = space.degree();
    let mut load = vec![Complex64::default(); space.n_dofs()];
    for (e, dofs) in space.element_dofs().iter().enumerate() {
        let geo = ElementGeometry::new(space, e);
        for (q, w) in TRIANGLE_RULE {
            let x = geo.map(q);
            let f = data.source(x[0], x[1]) * (w * geo.area());
            for (&d, phi) in dofs.iter().zip(reference_values(p, q[0], q[1])) {
                load[d] += f * phi;
            }
        }
    }
    let mesh = space.mesh();
    for edge in impedance_boundary {
        let dofs = space.edge_dofs(edge);
        let [a, b] = edge.vertices.map(|v| mesh.vertices()[v]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        for (t, w) in edge_rule() {
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let g = data.impedance(x[0], x[1], edge.side) * (w * len);
            for (&d, phi) in dofs.iter().zip(edge_values(p, t)) {
                load[d] += g * phi;
            }
        }
    }
    Ok(load)
}

/// Action of the Helmholtz matrix on `u`, computed element by element
/// without forming the matrix.
pub fn apply_helmholtz(
    space: &FeSpace,
    k: f64,
    impedance_boundary: &[BoundaryEdge],
    u: &[Complex64],
) -> Result<Vector> {
    check_len(space.n_dofs(), u.len())?;
    check_boundary(space, impedance_boundary)?;
    let k2 = k * k;
    let mut out = vec![Complex64::default(); space.n_dofs()];
    for (e, dofs) in space.element_dofs().iter().enumerate() {
        let m = element_matrices(space, e);
        let n = dofs.len();
        for a in 0..n {
            let mut acc = Complex64::default();
            for b in 0..n {
                acc += u[dofs[b]] * (m.stiffness[a * n + b] - k2 * m.mass[a * n + b]);
            }
            out[dofs[a]] += acc;
        }
    }
    for edge in impedance_boundary {
        let dofs = space.edge_dofs(edge);
        let m = edge_mass(space, edge);
        let n = dofs.len();
        for a in 0..n {
            let mut acc = Complex64::default();
            for b in 0..n {
                acc += u[dofs[b]] * m[a * n + b];
            }
            out[dofs[a]] += Complex64::new(0.0, -k) * acc;
        }
    }
    Ok(out)
}

/// `(‖u_h - u‖_{L²}, ‖u‖_{L²})` for a finite element function `u_h` and an
/// exact solution `u`.
pub fn l2_error(
    space: &FeSpace,
    uh: &[Complex64],
    exact: impl Fn(f64, f64) -> Complex64,
) -> Result<(f64, f64)> {
    check_len(space.n_dofs(), uh.len())?;
    let p = space.degree();
    let (mut err, mut norm) = (0.0, 0.0);
    for (e, dofs) in space.element_dofs().iter().enumerate() {
        let geo = ElementGeometry::new(space, e);
        for (q, w) in TRIANGLE_RULE {
            let x = geo.map(q);
            let value: Complex64 = dofs
                .iter()
                .zip(reference_values(p, q[0], q[1]))
                .map(|(&d, phi)| uh[d] * phi)
                .sum();
            let u = exact(x[0], x[1]);
            err += w * geo.area() * (value - u).norm_sqr();
            norm += w * geo.area() * u.norm_sqr();
        }
    }
    Ok((err.sqrt(), norm.sqrt()))
}
