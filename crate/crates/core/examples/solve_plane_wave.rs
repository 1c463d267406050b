//! Solves the plane-wave impedance problem on strips with ORAS-preconditioned
//! GMRES and compares against the exact solution and a direct solve.
//!
//!     cargo run --release --example solve_plane_wave -- 20 3

use helmholtz_oras::experiment::{Experiment, Geometry};

fn main() -> helmholtz_oras::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: f64 = args.first().map_or(20.0, |s| s.parse().expect("k"));
    let n: usize = args.get(1).map_or(3, |s| s.parse().expect("N"));

    let exp = Experiment::build(Geometry::Strip, k, n, 2, 1.3, 1.0 / 6.0)?;
    let summary = exp.solve_plane_wave(1e-8)?;
    println!("{} dofs, GMRES converged: {} in {} iterations", summary.dofs, summary.converged, summary.iterations);
    for (i, r) in summary.residual_history.iter().enumerate().step_by(5) {
        println!("  iteration {i:3}: relative residual {r:.3e}");
    }
    println!("relative L² error against the plane wave: {:.3e}", summary.l2_error);

    let (_, f) = exp.plane_wave_load()?;
    let direct = exp.operator.direct_solve(&f)?;
    let diff: Vec<_> = summary.solution.iter().zip(&direct).map(|(a, b)| a - b).collect();
    println!(
        "‖u_gmres - u_direct‖ / ‖u_direct‖ in the energy norm: {:.3e}",
        exp.operator.energy_norm(&diff)? / exp.operator.energy_norm(&direct)?
    );
    Ok(())
}
