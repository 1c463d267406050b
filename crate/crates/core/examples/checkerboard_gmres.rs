//! GMRES iteration counts for the plane-wave problem as the checkerboard is
//! refined, at fixed wavenumber.
//!
//!     cargo run --release --example checkerboard_gmres -- 20

use helmholtz_oras::experiment::{write_solve_csv, Experiment, Geometry};

fn main() -> helmholtz_oras::Result<()> {
    let k: f64 = std::env::args().nth(1).map_or(20.0, |s| s.parse().expect("k"));
    let mut rows = Vec::new();
    for n in [1, 2, 4, 6, 8] {
        let exp = Experiment::build(Geometry::Checkerboard, k, n, 2, 1.3, 0.25)?;
        rows.push(exp.solve_plane_wave(1e-6)?);
    }
    write_solve_csv(&rows, std::io::stdout().lock())
}
