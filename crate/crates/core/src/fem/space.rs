use crate::error::{Error, Result};
use crate::mesh::{BoundaryEdge, RectMesh};

/// Continuous Lagrange space of degree 1 or 2 on a [`RectMesh`].
///
/// Nodes sit on the refined lattice `(degree*nx + 1) x (degree*ny + 1)`,
/// numbered with `x` fastest. Element dofs list the three vertices first,
/// then (degree 2) the midpoints of edges `(0,1)`, `(1,2)`, `(2,0)`.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: RectMesh,
    degree: usize,
    node_coords: Vec<[f64; 2]>,
    element_dofs: Vec<Vec<usize>>,
    boundary_nodes: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: RectMesh, degree: usize) -> Result<Self> {
        if degree != 1 && degree != 2 {
            return Err(Error::InvalidInput(format!("degree must be 1 or 2, got {degree}")));
        }
        let (hx, hy) = mesh.cell_size();
        let row = degree * mesh.nx() + 1;
        let rows = degree * mesh.ny() + 1;
        let origin = mesh.origin();
        let step = [hx / degree as f64, hy / degree as f64];

        let node_coords = (0..rows)
            .flat_map(|j| (0..row).map(move |i| [origin[0] + i as f64 * step[0], origin[1] + j as f64 * step[1]]))
            .collect();

        let lattice = |v: usize| {
            let (i, j) = mesh.vertex_lattice(v);
            (degree * i, degree * j)
        };
        let element_dofs = mesh
            .triangles()
            .iter()
            .map(|t| {
                let corners = t.map(lattice);
                let mut dofs: Vec<usize> = corners.iter().map(|&(i, j)| j * row + i).collect();
                if degree == 2 {
                    for e in 0..3 {
                        let (a, b) = (corners[e], corners[(e + 1) % 3]);
                        dofs.push((a.1 + b.1) / 2 * row + (a.0 + b.0) / 2);
                    }
                }
                dofs
            })
            .collect();

        let boundary_nodes = (0..rows)
            .flat_map(|j| (0..row).map(move |i| (i, j)))
            .filter(|&(i, j)| i == 0 || j == 0 || i == row - 1 || j == rows - 1)
            .map(|(i, j)| j * row + i)
            .collect();

        Ok(Self { mesh, degree, node_coords, element_dofs, boundary_nodes })
    }

    pub fn mesh(&self) -> &RectMesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.node_coords.len()
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn element_dofs(&self) -> &[Vec<usize>] {
        &self.element_dofs
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    /// Nodes per lattice row, `degree*nx + 1`.
    pub fn nodes_per_row(&self) -> usize {
        self.degree * self.mesh.nx() + 1
    }

    /// Lattice coordinates `(i, j)` of node `n`.
    pub fn node_lattice(&self, n: usize) -> (usize, usize) {
        let row = self.nodes_per_row();
        (n % row, n / row)
    }

    /// Global nodes along a boundary edge, in edge-parameter order:
    /// start, end, then the midpoint for degree 2.
    pub fn edge_dofs(&self, edge: &BoundaryEdge) -> Vec<usize> {
        let row = self.nodes_per_row();
        let p = self.degree;
        let ends = edge.vertices.map(|v| {
            let (i, j) = self.mesh.vertex_lattice(v);
            (p * i, p * j)
        });
        let mut dofs: Vec<usize> = ends.iter().map(|&(i, j)| j * row + i).collect();
        if p == 2 {
            dofs.push((ends[0].1 + ends[1].1) / 2 * row + (ends[0].0 + ends[1].0) / 2);
        }
        dofs
    }

    /// Nodal interpolant of `u`.
    pub fn interpolate<T>(&self, u: impl Fn(f64, f64) -> T) -> Vec<T> {
        self.node_coords.iter().map(|x| u(x[0], x[1])).collect()
    }
}

/// Reference basis on the triangle `(0,0), (1,0), (0,1)`.
pub(crate) fn reference_values(degree: usize, xi: f64, eta: f64) -> Vec<f64> {
    let l = [1.0 - xi - eta, xi, eta];
    match degree {
        1 => l.to_vec(),
        _ => vec![
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ],
    }
}

/// Reference gradients `(d/dxi, d/deta)`.
pub(crate) fn reference_gradients(degree: usize, xi: f64, eta: f64) -> Vec<[f64; 2]> {
    let l = [1.0 - xi - eta, xi, eta];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match degree {
        1 => dl.to_vec(),
        _ => {
            let vertex = |i: usize| dl[i].map(|d| (4.0 * l[i] - 1.0) * d);
            let edge = |a: usize, b: usize| [0, 1].map(|c| 4.0 * (dl[a][c] * l[b] + l[a] * dl[b][c]));
            vec![vertex(0), vertex(1), vertex(2), edge(0, 1), edge(1, 2), edge(2, 0)]
        }
    }
}

/// 1D basis on an edge parameterized by `t in [0, 1]`, ordered like
/// [`FeSpace::edge_dofs`].
pub(crate) fn edge_values(degree: usize, t: f64) -> Vec<f64> {
    match degree {
        1 => vec![1.0 - t, t],
        _ => vec![(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        for (nx, ny) in [(1, 1), (3, 2), (5, 4)] {
            let mesh = RectMesh::new([0.0, 0.0], 1.0, 1.0, nx, ny).unwrap();
            for p in [1, 2] {
                let s = FeSpace::new(mesh.clone(), p).unwrap();
                assert_eq!(s.n_dofs(), (p * nx + 1) * (p * ny + 1));
                assert_eq!(s.boundary_nodes().len(), 2 * (p * nx + p * ny));
            }
        }
    }

    #[test]
    fn rejects_degree_three() {
        let mesh = RectMesh::new([0.0, 0.0], 1.0, 1.0, 1, 1).unwrap();
        assert!(FeSpace::new(mesh, 3).is_err());
    }

    #[test]
    fn dofs_match_element_geometry() {
        let mesh = RectMesh::new([0.25, 0.0], 1.5, 1.0, 3, 2).unwrap();
        let s = FeSpace::new(mesh.clone(), 2).unwrap();
        for (t, dofs) in mesh.triangles().iter().zip(s.element_dofs()) {
            let v = t.map(|i| mesh.vertices()[i]);
            for c in 0..3 {
                let x = s.node_coords()[dofs[c]];
                assert!((x[0] - v[c][0]).abs() < 1e-14 && (x[1] - v[c][1]).abs() < 1e-14);
                let m = s.node_coords()[dofs[3 + c]];
                let (a, b) = (v[c], v[(c + 1) % 3]);
                assert!((m[0] - 0.5 * (a[0] + b[0])).abs() < 1e-14);
                assert!((m[1] - 0.5 * (a[1] + b[1])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_is_nodal_and_sums_to_one() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];
        for p in [1usize, 2] {
            let count = if p == 1 { 3 } else { 6 };
            for (a, x) in nodes.iter().take(count).enumerate() {
                let v = reference_values(p, x[0], x[1]);
                for (b, vb) in v.iter().enumerate() {
                    assert!((vb - if a == b { 1.0 } else { 0.0 }).abs() < 1e-15);
                }
            }
            let g = reference_gradients(p, 0.3, 0.2);
            let sum = g.iter().fold([0.0, 0.0], |acc, d| [acc[0] + d[0], acc[1] + d[1]]);
            assert!(sum[0].abs() < 1e-14 && sum[1].abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (xi, eta, eps) = (0.21, 0.37, 1e-6);
        for p in [1usize, 2] {
            let g = reference_gradients(p, xi, eta);
            let fx: Vec<f64> = reference_values(p, xi + eps, eta)
                .iter()
                .zip(reference_values(p, xi - eps, eta))
                .map(|(a, b)| (a - b) / (2.0 * eps))
                .collect();
            let fy: Vec<f64> = reference_values(p, xi, eta + eps)
                .iter()
                .zip(reference_values(p, xi, eta - eps))
                .map(|(a, b)| (a - b) / (2.0 * eps))
                .collect();
            for i in 0..g.len() {
                assert!((g[i][0] - fx[i]).abs() < 1e-8);
                assert!((g[i][1] - fy[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn edge_dofs_follow_edge() {
        let mesh = RectMesh::new([0.0, 0.0], 1.0, 1.0, 2, 2).unwrap();
        let s = FeSpace::new(mesh.clone(), 2).unwrap();
        for e in mesh.boundary_edges() {
            let d = s.edge_dofs(e);
            let [a, b] = e.vertices.map(|v| mesh.vertices()[v]);
            let x = d.iter().map(|&n| s.node_coords()[n]).collect::<Vec<_>>();
            assert_eq!(x[0], a);
            assert_eq!(x[1], b);
            assert!((x[2][0] - 0.5 * (a[0] + b[0])).abs() < 1e-15);
            assert!((x[2][1] - 0.5 * (a[1] + b[1])).abs() < 1e-15);
        }
    }
}
