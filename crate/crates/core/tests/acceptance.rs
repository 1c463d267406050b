//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use helmholtz_oras::experiment::{Experiment, Geometry, DEFAULT_MESH_CONSTANT, DEFAULT_STRIP_OVERLAP};
use helmholtz_oras::fem::{assemble_helmholtz, assemble_load, l2_error, FeSpace, ProblemData};
use helmholtz_oras::linalg::{band_factorize, inner, Estimator, PowerIterationOptions, StartVector};
use helmholtz_oras::mesh::RectMesh;
use helmholtz_oras::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

fn strips(k: f64, n: usize) -> Result<Experiment> {
    Experiment::build(Geometry::Strip, k, n, 2, DEFAULT_MESH_CONSTANT, DEFAULT_STRIP_OVERLAP)
}

fn checkerboard(k: f64, n: usize) -> Result<Experiment> {
    Experiment::build(Geometry::Checkerboard, k, n, 2, DEFAULT_MESH_CONSTANT, 0.25)
}

fn norm(exp: &Experiment, s: usize) -> Result<f64> {
    let options = PowerIterationOptions { start: StartVector::Seeded(7), ..Default::default() };
    let est = exp.operator.norm_e_power_with(s, Estimator::Lanczos, options)?;
    if !est.converged {
        eprintln!("  warning: estimate of ‖E^{s}‖ did not converge");
    }
    Ok(est.norm)
}

fn random_vector(n: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn rel_diff(a: &[C], b: &[C]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn identities() -> Result<Outcome> {
    let exp = strips(10.0, 2)?;
    let op = &exp.operator;
    let v = random_vector(op.n_dofs(), 1);

    let pou = rel_diff(&op.prolong_blocks(&op.restrict_blocks(&v)?)?, &v);

    let mut w = op.restrict_blocks(&v)?;
    let mut factor = 0.0f64;
    for s in 1..=4 {
        w = op.apply_t_block(&w)?;
        factor = factor.max(rel_diff(&op.prolong_blocks(&w)?, &op.apply_e_power(&v, s)?));
    }

    let (_, f) = exp.plane_wave_load()?;
    let u = random_vector(op.n_dofs(), 2);
    let r: Vec<C> = op.matrix().spmv(&u)?.iter().zip(&f).map(|(a, b)| b - a).collect();
    let want: Vec<C> = u.iter().zip(op.apply_b_inverse(&r)?).map(|(a, b)| a + b).collect();
    let correction = rel_diff(&op.residual_correction_step(&u, &f)?, &want);

    let y = random_vector(op.n_dofs(), 3);
    let lhs = inner(&op.apply_e(&v)?, &y);
    let rhs = inner(&v, &op.apply_e_adjoint(&y)?);
    let adjoint = (lhs - rhs).norm() / lhs.norm();

    Ok(Outcome {
        pass: pou <= 1e-13 && factor <= 1e-9 && correction <= 1e-12 && adjoint <= 1e-11,
        detail: format!(
            "partition of unity {pou:.1e}, powers through T {factor:.1e}, residual correction {correction:.1e}, adjoint {adjoint:.1e}"
        ),
    })
}

fn strip_decay(e: &[f64]) -> Outcome {
    let drops = [e[0] / e[1], e[1] / e[2]];
    Outcome {
        pass: (3.5..=8.5).contains(&e[0]) && e[1] < 1.0 && e[2] < 0.15 && drops.iter().all(|&d| d >= 4.0),
        detail: format!(
            "‖E‖ = {:.4}, ‖E²‖ = {:.4}, ‖E³‖ = {:.4}, drops {:.1} and {:.1}",
            e[0], e[1], e[2], drops[0], drops[1]
        ),
    }
}

fn k_growth(e20: f64) -> Result<Outcome> {
    let e40 = norm(&strips(40.0, 2)?, 1)?;
    let ratio = e40 / e20;
    Ok(Outcome {
        pass: (1.2..=2.5).contains(&ratio),
        detail: format!("‖E‖ = {e20:.4} at k = 20 and {e40:.4} at k = 40, ratio {ratio:.3}"),
    })
}

fn two_by_two() -> Result<Outcome> {
    let exp = checkerboard(40.0, 2)?;
    let (e3, e4) = (norm(&exp, 3)?, norm(&exp, 4)?);
    Ok(Outcome {
        pass: e4 < 0.5 && e4 < e3,
        detail: format!("‖E³‖ = {e3:.4}, ‖E⁴‖ = {e4:.4}"),
    })
}

fn gmres_count() -> Result<Outcome> {
    let summary = checkerboard(20.0, 8)?.solve_plane_wave(1e-6)?;
    Ok(Outcome {
        pass: summary.converged && (20..=50).contains(&summary.iterations),
        detail: format!(
            "{} iterations, relative residual {:.1e}, {} dofs",
            summary.iterations, summary.residual, summary.dofs
        ),
    })
}

fn first_contraction() -> Result<Outcome> {
    let exp = checkerboard(40.0, 4)?;
    let mut seen = Vec::new();
    let mut first = None;
    for s in 1..=8 {
        let e = norm(&exp, s)?;
        seen.push(format!("{e:.3}"));
        if e < 1.0 {
            first = Some(s);
            break;
        }
    }
    Ok(Outcome {
        pass: first.is_some(),
        detail: match first {
            Some(s) => format!("first s with ‖Eˢ‖ < 1 is {s} (‖Eˢ‖ for s = 1.. : {})", seen.join(", ")),
            None => format!("no s ≤ 8 with ‖Eˢ‖ < 1 ({})", seen.join(", ")),
        },
    })
}

fn convergence_order() -> Result<Outcome> {
    let k = 10.0;
    let data = ProblemData::plane_wave(k, [0.6, 0.8])?;
    let mut errors = Vec::new();
    for n in [16, 32, 64] {
        let space = FeSpace::new(RectMesh::new([0.0, 0.0], 1.0, 1.0, n, n)?, 2)?;
        let edges = space.mesh().boundary_edges();
        let a = assemble_helmholtz(&space, k, edges)?;
        let f = assemble_load(&space, &data, edges)?;
        let u = band_factorize(&a)?.solve(&f)?;
        let (err, norm) = l2_error(&space, &u, |x, y| data.exact(x, y).expect("exact"))?;
        errors.push(err / norm);
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(Outcome {
        pass: orders.iter().all(|&p| p >= 2.8),
        detail: format!(
            "relative L² errors {:.2e}, {:.2e}, {:.2e}; orders {:.2}, {:.2}",
            errors[0], errors[1], errors[2], orders[0], orders[1]
        ),
    })
}

fn sanity() -> Result<Outcome> {
    let exp = strips(10.0, 2)?;
    let op = &exp.operator;
    let (_, f) = exp.plane_wave_load()?;
    let exact = op.direct_solve(&f)?;
    let (iterates, _) = op.richardson(&f, &exact, 3)?;
    let fixed = iterates.iter().map(|u| rel_diff(u, &exact)).fold(0.0, f64::max);

    let single = strips(10.0, 1)?;
    let e1 = norm(&single, 1)?;
    let (_, f1) = single.plane_wave_load()?;
    let gmres = single.operator.gmres_solve(&f1, 1e-6, 10)?;
    Ok(Outcome {
        pass: fixed <= 1e-11 && e1 <= 1e-10 && gmres.converged() && gmres.iterations == 1,
        detail: format!(
            "fixed point drift {fixed:.1e}; one subdomain: ‖E‖ = {e1:.1e}, GMRES {} iteration(s)",
            gmres.iterations
        ),
    })
}

fn many_subdomains() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [6, 8] {
        let exp = checkerboard(20.0, n)?;
        let s = n * n;
        let (a, b) = (norm(&exp, s - 1)?, norm(&exp, s)?);
        pass &= a > 1.0 && b > 1.0;
        parts.push(format!("{n}x{n}: ‖E^{}‖ = {a:.3e}, ‖E^{s}‖ = {b:.3e}", s - 1));
    }
    Ok(Outcome { pass, detail: parts.join("; ") })
}

fn report(label: &str, start: Instant, outcome: Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(o) => {
            println!("{} {label}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            o.pass
        }
        Err(e) => {
            println!("FAIL {label}: error: {e} [{secs:.1}s]");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;

    let t = Instant::now();
    ok &= report("criterion 1, operator identities on 2 strips at k = 10", t, identities());

    let t = Instant::now();
    let k20 = strips(20.0, 2).and_then(|exp| (1..=3).map(|s| norm(&exp, s)).collect::<Result<Vec<f64>>>());
    let e20 = k20.as_ref().map(|e| e[0]).ok();
    ok &= report("criterion 2, decay of ‖Eˢ‖ on 2 strips at k = 20", t, k20.map(|e| strip_decay(&e)));

    let t = Instant::now();
    let growth = match e20 {
        Some(e20) => k_growth(e20),
        None => Err(helmholtz_oras::Error::InvalidInput("k = 20 norms unavailable".into())),
    };
    ok &= report("criterion 3, growth of ‖E‖ from k = 20 to k = 40 on 2 strips", t, growth);

    let t = Instant::now();
    ok &= report("criterion 4, 2x2 checkerboard at k = 40", t, two_by_two());

    let t = Instant::now();
    ok &= report("criterion 5, GMRES iterations on the 8x8 checkerboard at k = 20", t, gmres_count());

    let t = Instant::now();
    ok &= report("criterion 6, first contracting power on the 4x4 checkerboard at k = 40", t, first_contraction());

    let t = Instant::now();
    ok &= report("criterion 7, P2 plane-wave convergence at k = 10", t, convergence_order());

    let t = Instant::now();
    ok &= report("criterion 8, fixed point and single-subdomain collapse", t, sanity());

    let t = Instant::now();
    ok &= report("qualitative, ‖Eˢ‖ > 1 at s = N²-1, N² for 6x6 and 8x8 at k = 20", t, many_subdomains());

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
