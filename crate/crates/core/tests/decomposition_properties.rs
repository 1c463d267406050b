mod common;

use common::*;
use helmholtz_oras::decomposition::{checkerboard_cover, strip_cover, Cover};
use helmholtz_oras::fem::FeSpace;
use helmholtz_oras::mesh::RectMesh;
use proptest::prelude::*;

fn covers(degree: usize) -> Vec<(FeSpace, Cover)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        // 12 cells per unit aligns strips of width 2/3 and overlap 1/6
        let mesh = RectMesh::new([0.0, 0.0], 2.0 * n as f64 / 3.0, 1.0, 8 * n, 12).unwrap();
        let space = FeSpace::new(mesh, degree).unwrap();
        let cover = strip_cover(&space, n, 1.0 / 6.0).unwrap().build_pou(&space).unwrap();
        out.push((space, cover));
    }
    for n in 1..=3 {
        let cells = 8 * n;
        let space = FeSpace::new(RectMesh::new([0.0, 0.0], 1.0, 1.0, cells, cells).unwrap(), degree).unwrap();
        let cover = checkerboard_cover(&space, n, 0.25).unwrap().build_pou(&space).unwrap();
        out.push((space, cover));
    }
    out
}

#[test]
fn local_nodes_sit_on_global_nodes() {
    for degree in [1, 2] {
        for (space, cover) in covers(degree) {
            for s in cover.subdomains() {
                let local = s.local_space.node_coords();
                assert_eq!(local.len(), s.node_ids.len());
                assert!(s.node_ids.windows(2).all(|w| w[0] < w[1]));
                for (x, &g) in local.iter().zip(&s.node_ids) {
                    let y = space.node_coords()[g];
                    assert!((x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn weights_form_a_partition_of_unity() {
    for degree in [1, 2] {
        for (space, cover) in covers(degree) {
            let mut total = vec![0.0; space.n_dofs()];
            for l in 0..cover.len() {
                let w = cover.weights(l).unwrap();
                assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
                for (&g, &x) in cover.subdomain(l).node_ids.iter().zip(w) {
                    total[g] += x;
                }
            }
            assert!(total.iter().all(|t| (t - 1.0).abs() < 1e-14));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weighted_prolongation_inverts_restriction(seed in any::<u64>(), which in 0usize..6, degree in 1usize..=2) {
        let (space, cover) = covers(degree).swap_remove(which);
        let v = random_vector(space.n_dofs(), seed);
        let mut back = vec![C::default(); space.n_dofs()];
        for l in 0..cover.len() {
            cover.add_prolong_weighted(l, &cover.restrict(l, &v).unwrap(), &mut back).unwrap();
        }
        prop_assert!(rel_diff(&back, &v) < 1e-13);
    }
}
