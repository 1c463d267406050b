//! Uniform triangulations of axis-aligned rectangles.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};

/// Side of the rectangle a boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        };
        f.write_str(s)
    }
}

/// A boundary edge, oriented counterclockwise around the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub side: Side,
}

/// Uniform conforming triangulation of `[x0, x0+width] x [y0, y0+height]`.
///
/// Vertices are numbered lexicographically with `x` fastest. Every cell is
/// split along its lower-left to upper-right diagonal into two
/// counterclockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMesh {
    origin: [f64; 2],
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl RectMesh {
    pub fn new(origin: [f64; 2], width: f64, height: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "rectangle dimensions must be positive, got {width} x {height}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh(format!(
                "cell counts must be at least 1, got {nx} x {ny}"
            )));
        }
        let hx = width / nx as f64;
        let hy = height / ny as f64;
        let vid = |i: usize, j: usize| j * (nx + 1) + i;

        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([origin[0] + i as f64 * hx, origin[1] + j as f64 * hy]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge { vertices: [vid(i, 0), vid(i + 1, 0)], side: Side::Bottom });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge { vertices: [vid(nx, j), vid(nx, j + 1)], side: Side::Right });
        }
        for i in (0..nx).rev() {
            boundary_edges.push(BoundaryEdge { vertices: [vid(i + 1, ny), vid(i, ny)], side: Side::Top });
        }
        for j in (0..ny).rev() {
            boundary_edges.push(BoundaryEdge { vertices: [vid(0, j + 1), vid(0, j)], side: Side::Left });
        }

        Ok(Self { origin, width, height, nx, ny, vertices, triangles, boundary_edges })
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Cell widths `(hx, hy)`.
    pub fn cell_size(&self) -> (f64, f64) {
        (self.width / self.nx as f64, self.height / self.ny as f64)
    }

    /// Mesh size `h = max(hx, hy)`.
    pub fn h(&self) -> f64 {
        let (hx, hy) = self.cell_size();
        hx.max(hy)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Lattice coordinates `(i, j)` of vertex `v`.
    pub fn vertex_lattice(&self, v: usize) -> (usize, usize) {
        (v % (self.nx + 1), v / (self.nx + 1))
    }

    /// Upper-right corner.
    pub fn far_corner(&self) -> [f64; 2] {
        [self.origin[0] + self.width, self.origin[1] + self.height]
    }

    /// Writes `v x y`, `t i j k` and `b i j side` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(out, "t {} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.boundary_edges {
            writeln!(out, "b {} {} {}", e.vertices[0], e.vertices[1], e.side)?;
        }
        Ok(())
    }
}

/// Cells per unit length for wavenumber `k`: `ceil(1/h)` with
/// `h = mesh_constant * k^(-5/4)`.
///
/// The rate is the one that keeps degree-2 elements free of pollution; the
/// `degree` argument does not change it.
pub fn mesh_size_for_wavenumber(k: f64, _degree: usize, mesh_constant: f64) -> usize {
    let h = mesh_constant * k.powf(-1.25);
    // guard against 1/h landing a hair above an integer
    let cells = 1.0 / h;
    let rounded = cells.round();
    if (cells - rounded).abs() < 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        cells.ceil() as usize
    }
}
