//! Norms of the first few powers of the ORAS error propagation matrix on
//! a row of strips.
//!
//!     cargo run --release --example strip_norms -- 20 2 3 [lanczos|power]

use std::time::Instant;

use helmholtz_oras::experiment::{Experiment, Geometry, DEFAULT_MESH_CONSTANT, DEFAULT_STRIP_OVERLAP};
use helmholtz_oras::linalg::{Estimator, PowerIterationOptions, StartVector};

fn main() -> helmholtz_oras::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: f64 = args.first().map_or(20.0, |s| s.parse().expect("k"));
    let n: usize = args.get(1).map_or(2, |s| s.parse().expect("N"));
    let s_max: usize = args.get(2).map_or(3, |s| s.parse().expect("s_max"));
    let estimator: Estimator = args.get(3).map_or(Ok(Estimator::Lanczos), |s| s.parse())?;

    let start = Instant::now();
    let exp = Experiment::build(Geometry::Strip, k, n, 2, DEFAULT_MESH_CONSTANT, DEFAULT_STRIP_OVERLAP)?;
    println!(
        "k = {k}, N = {n}: {} dofs, {} cells per unit length, setup {:.2?}",
        exp.operator.n_dofs(),
        exp.cells_per_unit,
        start.elapsed()
    );
    let options = PowerIterationOptions { start: StartVector::Seeded(7), ..Default::default() };
    for s in 1..=s_max {
        let t = Instant::now();
        let est = exp.operator.norm_e_power_with(s, estimator, options)?;
        println!(
            "  ‖E^{s}‖ = {:.6}  ({estimator}: {} iterations, converged {}, residual {:.1e}, {:.2?})",
            est.norm,
            est.iterations,
            est.converged,
            est.rayleigh_residual,
            t.elapsed()
        );
    }
    Ok(())
}
