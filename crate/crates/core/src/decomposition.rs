//! Overlapping covers of a rectangle by element-aligned rectangular
//! subdomains, their nodal partition of unity, and the restriction and
//! prolongation maps between global and local coefficient vectors.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fem::FeSpace;
use crate::linalg::Vector;
use crate::mesh::{BoundaryEdge, RectMesh, Side};

/// Relative tolerance for matching coordinates to mesh lines.
const ALIGN_TOL: f64 = 1e-9;

/// Closed axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        p[0] >= self.x0 - tol && p[0] <= self.x1 + tol && p[1] >= self.y0 - tol && p[1] <= self.y1 + tol
    }
}

/// One overlapping subdomain `Ω_ℓ`.
#[derive(Debug, Clone)]
pub struct Subdomain {
    pub id: usize,
    pub extent: Rect,
    /// Global triangles contained in the closed subdomain.
    pub element_ids: Vec<usize>,
    /// Global indices of the local nodes, ascending (the index set `𝓘_ℓ`).
    pub node_ids: Vec<usize>,
    pub local_space: FeSpace,
    /// Local boundary edges on `∂Ω_ℓ \ ∂Ω`.
    pub interface_edges: Vec<BoundaryEdge>,
    /// Local boundary edges on `∂Ω_ℓ ∩ ∂Ω`.
    pub physical_edges: Vec<BoundaryEdge>,
    /// Interface sides as segments, for the distance function.
    interface_segments: Vec<[[f64; 2]; 2]>,
}

impl Subdomain {
    pub fn n_dofs(&self) -> usize {
        self.node_ids.len()
    }

    /// All local boundary edges (the impedance boundary of the local
    /// problem).
    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        self.local_space.mesh().boundary_edges()
    }

    /// Distance from `p` to `∂Ω_ℓ \ ∂Ω`, or 1 when the subdomain has no
    /// interface.
    pub fn interface_distance(&self, p: [f64; 2]) -> f64 {
        if self.interface_segments.is_empty() {
            return 1.0;
        }
        self.interface_segments
            .iter()
            .map(|s| segment_distance(p, s))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(p: [f64; 2], s: &[[f64; 2]; 2]) -> f64 {
    let [a, b] = *s;
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// A cover `{Ω_ℓ}` of the domain, optionally equipped with nodal
/// partition-of-unity weights `χ_ℓ(x_j)`, `j ∈ 𝓘_ℓ`.
#[derive(Debug, Clone)]
pub struct Cover {
    n_global: usize,
    subdomains: Vec<Subdomain>,
    pou: Option<Vec<Vec<f64>>>,
}

impl Cover {
    /// Builds subdomains from element-aligned boxes (clipped to the domain).
    pub fn from_boxes(space: &FeSpace, boxes: &[Rect]) -> Result<Self> {
        let mesh = space.mesh();
        let (hx, hy) = mesh.cell_size();
        let origin = mesh.origin();
        let far = mesh.far_corner();
        let p = space.degree();
        let global_row = space.nodes_per_row();

        let mut subdomains = Vec::with_capacity(boxes.len());
        for (id, b) in boxes.iter().enumerate() {
            let b = Rect {
                x0: b.x0.max(origin[0]),
                x1: b.x1.min(far[0]),
                y0: b.y0.max(origin[1]),
                y1: b.y1.min(far[1]),
            };
            if !(b.width() > 0.0 && b.height() > 0.0) {
                return Err(Error::InvalidInput(format!("subdomain {id} does not meet the domain")));
            }
            let i0 = grid_index(b.x0 - origin[0], hx, "x", id)?;
            let i1 = grid_index(b.x1 - origin[0], hx, "x", id)?;
            let j0 = grid_index(b.y0 - origin[1], hy, "y", id)?;
            let j1 = grid_index(b.y1 - origin[1], hy, "y", id)?;
            let extent = Rect {
                x0: origin[0] + i0 as f64 * hx,
                x1: origin[0] + i1 as f64 * hx,
                y0: origin[1] + j0 as f64 * hy,
                y1: origin[1] + j1 as f64 * hy,
            };

            let tol = ALIGN_TOL * hx.min(hy);
            let element_ids: Vec<usize> = mesh
                .triangles()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.iter().all(|&v| extent.contains(mesh.vertices()[v], tol)))
                .map(|(e, _)| e)
                .collect();

            let local_mesh = RectMesh::new(
                [extent.x0, extent.y0],
                extent.width(),
                extent.height(),
                i1 - i0,
                j1 - j0,
            )?;
            let local_space = FeSpace::new(local_mesh, p)?;
            let local_row = local_space.nodes_per_row();
            let node_ids: Vec<usize> = (0..local_space.n_dofs())
                .map(|n| {
                    let (li, lj) = (n % local_row, n / local_row);
                    (lj + p * j0) * global_row + li + p * i0
                })
                .collect();

            let on_domain_boundary = |side: Side| match side {
                Side::Left => i0 == 0,
                Side::Right => i1 == mesh.nx(),
                Side::Bottom => j0 == 0,
                Side::Top => j1 == mesh.ny(),
            };
            let (physical_edges, interface_edges): (Vec<_>, Vec<_>) = local_space
                .mesh()
                .boundary_edges()
                .iter()
                .partition(|e| on_domain_boundary(e.side));
            let corners = [
                [extent.x0, extent.y0],
                [extent.x1, extent.y0],
                [extent.x1, extent.y1],
                [extent.x0, extent.y1],
            ];
            let interface_segments = Side::ALL
                .iter()
                .filter(|&&s| !on_domain_boundary(s))
                .map(|s| match s {
                    Side::Bottom => [corners[0], corners[1]],
                    Side::Right => [corners[1], corners[2]],
                    Side::Top => [corners[3], corners[2]],
                    Side::Left => [corners[0], corners[3]],
                })
                .collect();

            subdomains.push(Subdomain {
                id,
                extent,
                element_ids,
                node_ids,
                local_space,
                interface_edges,
                physical_edges,
                interface_segments,
            });
        }
        Ok(Self { n_global: space.n_dofs(), subdomains, pou: None })
    }

    pub fn n_global(&self) -> usize {
        self.n_global
    }

    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn subdomain(&self, l: usize) -> &Subdomain {
        &self.subdomains[l]
    }

    /// Partition-of-unity weights of subdomain `l` in local node order.
    pub fn weights(&self, l: usize) -> Result<&[f64]> {
        self.pou.as_ref().map(|w| w[l].as_slice()).ok_or(Error::MissingWeights)
    }

    /// Total length of the concatenated local vectors, `Σ_ℓ |𝓘_ℓ|`.
    pub fn block_len(&self) -> usize {
        self.subdomains.iter().map(Subdomain::n_dofs).sum()
    }

    /// Offsets of each local block in a concatenated vector.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.len() + 1);
        offsets.push(0);
        for s in &self.subdomains {
            offsets.push(offsets.last().unwrap() + s.n_dofs());
        }
        offsets
    }

    /// Fills the weights `χ_ℓ(x_j) = d_ℓ(x_j) / Σ_m d_m(x_j)`, where `d_ℓ`
    /// is the distance to the interface of `Ω_ℓ` and the sum runs over the
    /// subdomains containing node `j`.
    pub fn build_pou(mut self, space: &FeSpace) -> Result<Self> {
        check_len(self.n_global, space.n_dofs())?;
        let coords = space.node_coords();
        let mut total = vec![0.0f64; self.n_global];
        let mut covered = vec![false; self.n_global];
        let distances: Vec<Vec<f64>> = self
            .subdomains
            .iter()
            .map(|s| {
                s.node_ids
                    .iter()
                    .map(|&j| {
                        covered[j] = true;
                        let d = s.interface_distance(coords[j]);
                        total[j] += d;
                        d
                    })
                    .collect()
            })
            .collect();
        if let Some(node) = covered.iter().position(|c| !c) {
            return Err(Error::NotACover { node });
        }
        if let Some(node) = total.iter().position(|&t| t <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "node {node} lies on the interface of every subdomain containing it"
            )));
        }
        let weights = self
            .subdomains
            .iter()
            .zip(distances)
            .map(|(s, d)| s.node_ids.iter().zip(d).map(|(&j, dj)| dj / total[j]).collect())
            .collect();
        self.pou = Some(weights);
        Ok(self)
    }

    /// `R_ℓ v`: entries of `v` at `𝓘_ℓ`.
    pub fn restrict(&self, l: usize, v: &[Complex64]) -> Result<Vector> {
        check_len(self.n_global, v.len())?;
        Ok(self.subdomains[l].node_ids.iter().map(|&j| v[j]).collect())
    }

    /// `R_ℓ^T v_ℓ`: nodewise extension by zero.
    pub fn prolong_nodewise(&self, l: usize, v_local: &[Complex64]) -> Result<Vector> {
        let mut out = vec![Complex64::default(); self.n_global];
        self.add_prolong_nodewise(l, v_local, &mut out)?;
        Ok(out)
    }

    /// `R̃_ℓ^T v_ℓ = R_ℓ^T (χ_ℓ v_ℓ)`.
    pub fn prolong_weighted(&self, l: usize, v_local: &[Complex64]) -> Result<Vector> {
        let mut out = vec![Complex64::default(); self.n_global];
        self.add_prolong_weighted(l, v_local, &mut out)?;
        Ok(out)
    }

    /// `out += R_ℓ^T v_ℓ`.
    pub fn add_prolong_nodewise(&self, l: usize, v_local: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let nodes = &self.subdomains[l].node_ids;
        check_len(nodes.len(), v_local.len())?;
        check_len(self.n_global, out.len())?;
        for (&j, v) in nodes.iter().zip(v_local) {
            out[j] += v;
        }
        Ok(())
    }

    /// `out += R̃_ℓ^T v_ℓ`.
    pub fn add_prolong_weighted(&self, l: usize, v_local: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let weights = self.weights(l)?;
        let nodes = &self.subdomains[l].node_ids;
        check_len(nodes.len(), v_local.len())?;
        check_len(self.n_global, out.len())?;
        for ((&j, v), &w) in nodes.iter().zip(v_local).zip(weights) {
            out[j] += v * w;
        }
        Ok(())
    }

    /// `R̃_ℓ v = χ_ℓ ⊙ R_ℓ v`, the transpose of the weighted prolongation.
    pub fn restrict_weighted(&self, l: usize, v: &[Complex64]) -> Result<Vector> {
        check_len(self.n_global, v.len())?;
        let weights = self.weights(l)?;
        Ok(self.subdomains[l]
            .node_ids
            .iter()
            .zip(weights)
            .map(|(&j, &w)| v[j] * w)
            .collect())
    }

    /// One line per subdomain: extent, node count, element count.
    pub fn write_summary<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.subdomains {
            let e = s.extent;
            writeln!(
                out,
                "subdomain {}: [{:.6}, {:.6}] x [{:.6}, {:.6}]  nodes {}  elements {}",
                s.id,
                e.x0,
                e.x1,
                e.y0,
                e.y1,
                s.n_dofs(),
                s.element_ids.len()
            )?;
        }
        Ok(())
    }
}

fn grid_index(offset: f64, h: f64, axis: &str, id: usize) -> Result<usize> {
    let t = offset / h;
    let r = t.round();
    if (t - r).abs() > ALIGN_TOL * r.max(1.0) {
        return Err(Error::Alignment(format!(
            "subdomain {id}: {axis}-offset {offset} is not a multiple of the cell size {h}"
        )));
    }
    Ok(r as usize)
}

/// `N` strips of equal width along `x`, each extended by `overlap` on its
/// interior sides.
pub fn strip_cover(space: &FeSpace, n: usize, overlap: f64) -> Result<Cover> {
    if n == 0 {
        return Err(Error::InvalidInput("at least one strip is required".into()));
    }
    check_overlap(overlap)?;
    let mesh = space.mesh();
    let [x0, y0] = mesh.origin();
    let w = mesh.width() / n as f64;
    let boxes: Vec<Rect> = (0..n)
        .map(|l| Rect {
            x0: x0 + l as f64 * w - overlap,
            x1: x0 + (l + 1) as f64 * w + overlap,
            y0,
            y1: y0 + mesh.height(),
        })
        .collect();
    check_nonoverlapping_alignment(mesh, w, mesh.height(), overlap)?;
    Cover::from_boxes(space, &boxes)
}

/// `N x N` squares, each extended by `overlap_fraction` times its width on
/// its interior sides.
pub fn checkerboard_cover(space: &FeSpace, n: usize, overlap_fraction: f64) -> Result<Cover> {
    if n == 0 {
        return Err(Error::InvalidInput("at least one subdomain per direction is required".into()));
    }
    check_overlap(overlap_fraction)?;
    let mesh = space.mesh();
    let [x0, y0] = mesh.origin();
    let (w, h) = (mesh.width() / n as f64, mesh.height() / n as f64);
    let delta = overlap_fraction * w;
    check_nonoverlapping_alignment(mesh, w, h, delta)?;
    let mut boxes = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            boxes.push(Rect {
                x0: x0 + i as f64 * w - delta,
                x1: x0 + (i + 1) as f64 * w + delta,
                y0: y0 + j as f64 * h - delta,
                y1: y0 + (j + 1) as f64 * h + delta,
            });
        }
    }
    Cover::from_boxes(space, &boxes)
}

fn check_overlap(overlap: f64) -> Result<()> {
    if overlap >= 0.0 && overlap.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("overlap must be nonnegative, got {overlap}")))
    }
}

fn check_nonoverlapping_alignment(mesh: &RectMesh, w: f64, h: f64, overlap: f64) -> Result<()> {
    let (hx, hy) = mesh.cell_size();
    for (len, cell, what) in [(w, hx, "subdomain width"), (h, hy, "subdomain height"), (overlap, hx, "overlap"), (overlap, hy, "overlap")] {
        let t = len / cell;
        if (t - t.round()).abs() > ALIGN_TOL * t.round().max(1.0) {
            return Err(Error::Alignment(format!(
                "{what} {len} is not a multiple of the cell size {cell}"
            )));
        }
    }
    Ok(())
}

/// Smallest cell count per unit length `>= base` for which every length in
/// `lengths` is a whole number of cells.
pub fn align_resolution(base: usize, lengths: &[f64]) -> Result<usize> {
    let limit = base.max(1) * 64;
    (base.max(1)..=limit)
        .find(|&n| {
            lengths.iter().all(|&l| {
                let t = l * n as f64;
                (t - t.round()).abs() <= ALIGN_TOL * t.round().max(1.0)
            })
        })
        .ok_or_else(|| {
            Error::Alignment(format!(
                "no resolution between {base} and {limit} cells per unit aligns lengths {lengths:?}"
            ))
        })
}
