//! Builds a checkerboard cover, prints its summary and samples the
//! partition of unity along the diagonal.
//!
//!     cargo run --example describe_cover

use helmholtz_oras::decomposition::checkerboard_cover;
use helmholtz_oras::fem::FeSpace;
use helmholtz_oras::mesh::RectMesh;

fn main() -> helmholtz_oras::Result<()> {
    let space = FeSpace::new(RectMesh::new([0.0, 0.0], 1.0, 1.0, 16, 16)?, 2)?;
    let cover = checkerboard_cover(&space, 2, 0.25)?.build_pou(&space)?;
    cover.write_summary(std::io::stdout().lock())?;

    // weights of every subdomain at diagonal nodes
    let per_row = space.nodes_per_row();
    println!("\n     x     {}", (0..cover.len()).map(|l| format!("chi_{l:<5}")).collect::<String>());
    for i in (0..per_row).step_by(4) {
        let node = i * per_row + i;
        let x = space.node_coords()[node][0];
        let mut line = format!("{x:8.4}  ");
        for (l, s) in cover.subdomains().iter().enumerate() {
            let w = match s.node_ids.binary_search(&node) {
                Ok(p) => cover.weights(l)?[p],
                Err(_) => 0.0,
            };
            line.push_str(&format!(" {w:8.4}"));
        }
        println!("{line}");
    }
    Ok(())
}
