//! Assembles and solves an impedance problem with a point-like Gaussian
//! source on a rectangle, without any domain decomposition.
//!
//!     cargo run --release --example custom_problem

use helmholtz_oras::fem::{assemble_helmholtz, assemble_load, FeSpace, ProblemData};
use helmholtz_oras::linalg::band_factorize;
use helmholtz_oras::mesh::{mesh_size_for_wavenumber, RectMesh};
use num_complex::Complex64;

fn main() -> helmholtz_oras::Result<()> {
    let k = 30.0;
    let cells = mesh_size_for_wavenumber(k, 2, 1.3);
    let mesh = RectMesh::new([0.0, 0.0], 2.0, 1.0, 2 * cells, cells)?;
    let space = FeSpace::new(mesh, 2)?;
    let data = ProblemData::new(
        k,
        |x, y| {
            let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
            Complex64::new((-400.0 * r2).exp() * 100.0, 0.0)
        },
        |_, _, _| Complex64::default(),
    )?;
    let edges = space.mesh().boundary_edges();
    let a = assemble_helmholtz(&space, k, edges)?;
    let f = assemble_load(&space, &data, edges)?;
    let u = band_factorize(&a)?.solve(&f)?;

    println!("{} dofs, bandwidth {:?}", space.n_dofs(), a.bandwidth());
    // samples along the horizontal centre line
    let per_row = space.nodes_per_row();
    let mid = space.n_dofs() / per_row / 2;
    for i in (0..per_row).step_by(per_row / 8) {
        let node = mid * per_row + i;
        let [x, y] = space.node_coords()[node];
        println!("u({x:.3}, {y:.3}) = {:.4e}  |u| = {:.4e}", u[node], u[node].norm());
    }
    Ok(())
}
