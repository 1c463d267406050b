//! Runs the ORAS-preconditioned Richardson iteration from a zero guess and
//! compares the error contraction with the computed norms of powers of E.
//!
//!     cargo run --release --example richardson_trace -- 20 2

use helmholtz_oras::experiment::{Experiment, Geometry};
use helmholtz_oras::linalg::{Estimator, PowerIterationOptions, StartVector};
use num_complex::Complex64;

fn main() -> helmholtz_oras::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: f64 = args.first().map_or(20.0, |s| s.parse().expect("k"));
    let n: usize = args.get(1).map_or(2, |s| s.parse().expect("N"));
    let exp = Experiment::build(Geometry::Strip, k, n, 2, 1.3, 1.0 / 6.0)?;
    let op = &exp.operator;

    let (_, f) = exp.plane_wave_load()?;
    let u0 = vec![Complex64::default(); op.n_dofs()];
    let steps = 8;
    let (_, trace) = op.richardson(&f, &u0, steps)?;
    let options = PowerIterationOptions { start: StartVector::Seeded(7), ..Default::default() };
    println!("  s   ‖e^s‖/‖e^0‖    ‖E^s‖      residual");
    for s in 1..=steps {
        let bound = op.norm_e_power_with(s, Estimator::Lanczos, options)?.norm;
        println!(
            "{s:3}   {:.4e}   {bound:.4e}   {:.4e}",
            trace.error_norms[s] / trace.error_norms[0],
            trace.residual_norms[s]
        );
    }
    Ok(())
}
