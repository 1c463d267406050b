//! Experiment runners: norms of powers of `E` on strip and checkerboard
//! decompositions, GMRES counts, and the plane-wave solve. The `oras`
//! binary is a thin wrapper over this module.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::decomposition::{align_resolution, checkerboard_cover, strip_cover, Cover};
use crate::error::{Error, Result};
use crate::fem::{assemble_load, l2_error, FeSpace, ProblemData};
use crate::linalg::{Estimator, PowerIterationOptions, StartVector};
use crate::mesh::{mesh_size_for_wavenumber, RectMesh};
use crate::oras::{NormEstimate, OrasOperator};

pub const DEFAULT_MESH_CONSTANT: f64 = 1.3;
pub const DEFAULT_STRIP_OVERLAP: f64 = 1.0 / 6.0;
pub const DEFAULT_CHECKERBOARD_OVERLAP: f64 = 0.25;
pub const DEFAULT_GMRES_TOL: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 7;
pub const GMRES_MAX_ITER: usize = 200;
/// Propagation direction of the manufactured plane wave.
pub const PLANE_WAVE_DIRECTION: [f64; 2] = [0.6, 0.8];

pub const NORM_CSV_HEADER: &str = "geometry,k,N,s,norm,status";
pub const SOLVE_CSV_HEADER: &str = "geometry,k,N,dofs,iters,residual,l2err";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// `N` strips of width 2/3 covering `(0, 2N/3) x (0, 1)`.
    Strip,
    /// `N x N` squares covering the unit square.
    Checkerboard,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Strip => "strip",
            Geometry::Checkerboard => "checkerboard",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strip" => Ok(Geometry::Strip),
            "checkerboard" => Ok(Geometry::Checkerboard),
            other => Err(Error::Config(format!("unknown geometry `{other}`"))),
        }
    }
}

/// Parameters of an experiment. `ks` and `ns` span a grid of cells that
/// are run in order, `k` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub ks: Vec<f64>,
    pub ns: Vec<usize>,
    pub degree: usize,
    pub mesh_constant: f64,
    /// Strip: overlap width. Checkerboard: overlap as a fraction of the
    /// subdomain width. `None` picks the geometry default.
    pub overlap: Option<f64>,
    /// Inclusive range of powers `s`; `None` picks the runner default.
    pub powers: Option<(usize, usize)>,
    pub gmres_tol: f64,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub estimator: Estimator,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::Strip,
            ks: vec![20.0],
            ns: vec![2],
            degree: 2,
            mesh_constant: DEFAULT_MESH_CONSTANT,
            overlap: None,
            powers: None,
            gmres_tol: DEFAULT_GMRES_TOL,
            output_path: None,
            seed: DEFAULT_SEED,
            estimator: Estimator::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.ns.is_empty() {
            return Err(Error::Config("at least one k and one N are required".into()));
        }
        if let Some(k) = self.ks.iter().find(|&&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::Config(format!("k must be positive, got {k}")));
        }
        if self.ns.contains(&0) {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if self.degree != 1 && self.degree != 2 {
            return Err(Error::Config(format!("degree must be 1 or 2, got {}", self.degree)));
        }
        if !(self.mesh_constant > 0.0) {
            return Err(Error::Config(format!("mesh constant must be positive, got {}", self.mesh_constant)));
        }
        if !(self.gmres_tol > 0.0 && self.gmres_tol < 1.0) {
            return Err(Error::Config(format!("gmres tolerance must lie in (0, 1), got {}", self.gmres_tol)));
        }
        if let Some(o) = self.overlap {
            if !(o >= 0.0) {
                return Err(Error::Config(format!("overlap must be nonnegative, got {o}")));
            }
        }
        if let Some((a, b)) = self.powers {
            if a == 0 || b < a {
                return Err(Error::Config(format!("invalid power range {a}..{b}")));
            }
        }
        Ok(())
    }

    pub fn overlap(&self) -> f64 {
        self.overlap.unwrap_or(match self.geometry {
            Geometry::Strip => DEFAULT_STRIP_OVERLAP,
            Geometry::Checkerboard => DEFAULT_CHECKERBOARD_OVERLAP,
        })
    }

    pub fn power_options(&self) -> PowerIterationOptions {
        PowerIterationOptions {
            start: StartVector::Seeded(self.seed),
            ..PowerIterationOptions::default()
        }
    }

    /// Applies `key=value` settings. Keys are the long flag names without
    /// dashes; `k` and `n` accept comma-separated lists and accumulate
    /// over repeated lines.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        let mut ks = Vec::new();
        let mut ns = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: invalid {what} `{value}`", lineno + 1));
            match key {
                "k" => {
                    for v in value.split(',') {
                        ks.push(v.trim().parse().map_err(|_| bad("k"))?);
                    }
                }
                "n" => {
                    for v in value.split(',') {
                        ns.push(v.trim().parse().map_err(|_| bad("n"))?);
                    }
                }
                "geometry" => self.geometry = value.parse()?,
                "degree" => self.degree = value.parse().map_err(|_| bad("degree"))?,
                "mesh-constant" | "mesh_constant" => {
                    self.mesh_constant = value.parse().map_err(|_| bad("mesh constant"))?
                }
                "overlap" => self.overlap = Some(value.parse().map_err(|_| bad("overlap"))?),
                "powers" => self.powers = Some(parse_power_range(value)?),
                "gmres-tol" | "gmres_tol" => self.gmres_tol = value.parse().map_err(|_| bad("gmres tolerance"))?,
                "out" => self.output_path = Some(PathBuf::from(value)),
                "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
                "estimator" => self.estimator = value.parse()?,
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        if !ks.is_empty() {
            self.ks = ks;
        }
        if !ns.is_empty() {
            self.ns = ns;
        }
        Ok(())
    }

    pub fn load_config_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_config_text(&text)
    }
}

/// Parses `a..b` (inclusive) or a single power `a`.
pub fn parse_power_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("invalid power range `{text}`, expected a..b"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let a = text.trim().parse().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

/// Space, cover and operator for one `(geometry, k, N)` cell.
#[derive(Debug)]
pub struct Experiment {
    pub geometry: Geometry,
    pub k: f64,
    pub n: usize,
    /// Cells per unit length after alignment with the subdomain geometry.
    pub cells_per_unit: usize,
    pub operator: OrasOperator,
}

impl Experiment {
    pub fn build(
        geometry: Geometry,
        k: f64,
        n: usize,
        degree: usize,
        mesh_constant: f64,
        overlap: f64,
    ) -> Result<Self> {
        let base = mesh_size_for_wavenumber(k, degree, mesh_constant);
        let (space, cover, cells_per_unit) = match geometry {
            Geometry::Strip => {
                let cells = align_resolution(base, &[2.0 / 3.0, overlap])?;
                let nx = (cells as f64 * 2.0 * n as f64 / 3.0).round() as usize;
                let mesh = RectMesh::new([0.0, 0.0], 2.0 * n as f64 / 3.0, 1.0, nx, cells)?;
                let space = FeSpace::new(mesh, degree)?;
                let cover = strip_cover(&space, n, overlap)?;
                (space, cover, cells)
            }
            Geometry::Checkerboard => {
                let w = 1.0 / n as f64;
                let cells = align_resolution(base, &[w, overlap * w])?;
                let mesh = RectMesh::new([0.0, 0.0], 1.0, 1.0, cells, cells)?;
                let space = FeSpace::new(mesh, degree)?;
                let cover = checkerboard_cover(&space, n, overlap)?;
                (space, cover, cells)
            }
        };
        let cover: Cover = cover.build_pou(&space)?;
        let operator = OrasOperator::new(space, k, cover)?;
        Ok(Self { geometry, k, n, cells_per_unit, operator })
    }

    pub fn from_config(config: &ExperimentConfig, k: f64, n: usize) -> Result<Self> {
        Self::build(config.geometry, k, n, config.degree, config.mesh_constant, config.overlap())
    }

    /// Plane-wave problem data and its load vector.
    pub fn plane_wave_load(&self) -> Result<(ProblemData, Vec<Complex64>)> {
        let data = ProblemData::plane_wave(self.k, PLANE_WAVE_DIRECTION)?;
        let space = self.operator.space();
        let f = assemble_load(space, &data, space.mesh().boundary_edges())?;
        Ok((data, f))
    }

    /// Solves the plane-wave problem with ORAS-preconditioned GMRES.
    pub fn solve_plane_wave(&self, tol: f64) -> Result<SolveSummary> {
        let (data, f) = self.plane_wave_load()?;
        let result = self.operator.gmres_solve(&f, tol, GMRES_MAX_ITER)?;
        let (err, norm) = l2_error(self.operator.space(), &result.solution, |x, y| {
            data.exact(x, y).expect("plane wave has an exact solution")
        })?;
        Ok(SolveSummary {
            geometry: self.geometry,
            k: self.k,
            n: self.n,
            dofs: self.operator.n_dofs(),
            iterations: result.iterations,
            residual: result.final_residual(),
            converged: result.converged(),
            l2_error: err / norm,
            residual_history: result.residual_history,
            solution: result.solution,
        })
    }
}

/// One row of a norm table.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    pub geometry: Geometry,
    pub k: f64,
    /// `N` for strips, `N x N` subdomains for the checkerboard (the column
    /// stores `N`).
    pub n: usize,
    pub estimate: NormEstimate,
}

impl NormRow {
    pub fn s(&self) -> usize {
        self.estimate.power
    }

    pub fn norm(&self) -> f64 {
        self.estimate.norm
    }

    /// `converged`, `clustered` (converged with a large Rayleigh
    /// residual) or `unconverged!`.
    pub fn status(&self) -> &'static str {
        if !self.estimate.converged {
            "unconverged!"
        } else if self.estimate.rayleigh_residual > crate::linalg::RAYLEIGH_RESIDUAL_FLAG {
            "clustered"
        } else {
            "converged"
        }
    }

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{:.6e},{}", self.geometry, self.k, self.n, self.s(), self.norm(), self.status())
    }
}

/// Summary of a preconditioned GMRES solve of the plane-wave problem.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub geometry: Geometry,
    pub k: f64,
    pub n: usize,
    pub dofs: usize,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Relative L² error against the exact plane wave.
    pub l2_error: f64,
    pub residual_history: Vec<f64>,
    pub solution: Vec<Complex64>,
}

impl SolveSummary {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.6e}",
            self.geometry, self.k, self.n, self.dofs, self.iterations, self.residual, self.l2_error
        )
    }
}

fn norm_rows(config: &ExperimentConfig, powers_for: impl Fn(usize) -> Vec<usize>) -> Result<Vec<NormRow>> {
    let mut rows = Vec::new();
    for &k in &config.ks {
        for &n in &config.ns {
            let exp = Experiment::from_config(config, k, n)?;
            let powers = match config.powers {
                Some((a, b)) => (a..=b).collect(),
                None => powers_for(n),
            };
            for s in powers {
                let estimate = exp.operator.norm_e_power_with(s, config.estimator, config.power_options())?;
                rows.push(NormRow { geometry: config.geometry, k, n, estimate });
            }
        }
    }
    Ok(rows)
}

fn require_geometry(config: &ExperimentConfig, geometry: Geometry) -> Result<()> {
    config.validate()?;
    if config.geometry != geometry {
        return Err(Error::Config(format!(
            "this experiment needs geometry `{geometry}`, got `{}`",
            config.geometry
        )));
    }
    Ok(())
}

/// Default powers for the strip table: `1, N-1, N`, plus `N+1` when `N = 2`.
pub fn strip_powers(n: usize) -> Vec<usize> {
    let mut set = BTreeSet::new();
    set.insert(1);
    if n >= 2 {
        set.insert(n - 1);
        set.insert(n);
    }
    if n == 2 {
        set.insert(3);
    }
    set.into_iter().collect()
}

/// Default powers for the checkerboard table: `N²-1` and `N²`.
pub fn checkerboard_powers(n: usize) -> Vec<usize> {
    let s = n * n;
    if s == 1 {
        vec![1]
    } else {
        vec![s - 1, s]
    }
}

/// Norms of powers of `E` on strips.
pub fn run_table1(config: &ExperimentConfig) -> Result<Vec<NormRow>> {
    require_geometry(config, Geometry::Strip)?;
    norm_rows(config, strip_powers)
}

/// Output of [`run_table2`].
#[derive(Debug, Clone)]
pub struct Table2 {
    pub norms: Vec<NormRow>,
    pub gmres: Vec<SolveSummary>,
}

/// Norms of `E^{N²-1}` and `E^{N²}` on the checkerboard, and GMRES counts
/// for the plane-wave problem.
pub fn run_table2(config: &ExperimentConfig) -> Result<Table2> {
    require_geometry(config, Geometry::Checkerboard)?;
    let norms = norm_rows(config, checkerboard_powers)?;
    let mut gmres = Vec::new();
    for &k in &config.ks {
        for &n in &config.ns {
            let exp = Experiment::from_config(config, k, n)?;
            gmres.push(exp.solve_plane_wave(config.gmres_tol)?);
        }
    }
    Ok(Table2 { norms, gmres })
}

/// Output of [`run_fig1`].
#[derive(Debug, Clone)]
pub struct Fig1 {
    pub rows: Vec<NormRow>,
    /// Per `(k, N)`: the smallest `s` with `‖Eˢ‖ < 1`, if any was reached.
    pub first_contracting: Vec<(f64, usize, Option<usize>)>,
}

/// `‖Eˢ‖` for `s = 1..=s_max` on the checkerboard (default `s_max = N²`).
pub fn run_fig1(config: &ExperimentConfig) -> Result<Fig1> {
    require_geometry(config, Geometry::Checkerboard)?;
    let rows = norm_rows(config, |n| (1..=n * n).collect())?;
    let mut first_contracting = Vec::new();
    for &k in &config.ks {
        for &n in &config.ns {
            let first = rows
                .iter()
                .filter(|r| r.k == k && r.n == n && r.norm() < 1.0)
                .map(NormRow::s)
                .min();
            first_contracting.push((k, n, first));
        }
    }
    Ok(Fig1 { rows, first_contracting })
}

/// Plane-wave solves for every `(k, N)` cell.
pub fn run_solve(config: &ExperimentConfig) -> Result<Vec<SolveSummary>> {
    config.validate()?;
    let mut out = Vec::new();
    for &k in &config.ks {
        for &n in &config.ns {
            let exp = Experiment::from_config(config, k, n)?;
            out.push(exp.solve_plane_wave(config.gmres_tol)?);
        }
    }
    Ok(out)
}

/// Mesh and cover summary for every `(k, N)` cell.
pub fn run_describe<W: Write>(config: &ExperimentConfig, mut out: W) -> Result<()> {
    config.validate()?;
    for &k in &config.ks {
        for &n in &config.ns {
            let exp = Experiment::from_config(config, k, n)?;
            let mesh = exp.operator.space().mesh();
            writeln!(
                out,
                "{} k={} N={}: domain [0, {}] x [0, {}], {} x {} cells (h = {:.6}), degree {}, {} dofs",
                exp.geometry,
                k,
                n,
                mesh.width(),
                mesh.height(),
                mesh.nx(),
                mesh.ny(),
                mesh.h(),
                config.degree,
                exp.operator.n_dofs()
            )?;
            exp.operator.cover().write_summary(&mut out)?;
        }
    }
    Ok(())
}

pub fn write_norm_csv<W: Write>(rows: &[NormRow], mut out: W) -> Result<()> {
    writeln!(out, "{NORM_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

pub fn write_solve_csv<W: Write>(rows: &[SolveSummary], mut out: W) -> Result<()> {
    writeln!(out, "{SOLVE_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Writes `x y re im` per node.
pub fn write_solution<W: Write>(space: &FeSpace, u: &[Complex64], mut out: W) -> Result<()> {
    crate::error::check_len(space.n_dofs(), u.len())?;
    for (x, v) in space.node_coords().iter().zip(u) {
        writeln!(out, "{} {} {:e} {:e}", x[0], x[1], v.re, v.im)?;
    }
    Ok(())
}
