/// Symmetric 6-point rule on the reference triangle, exact for degree 4.
/// Points are barycentric-free `(xi, eta)`; weights sum to 1 (multiply by
/// the triangle area).
pub(crate) const TRIANGLE_RULE: [([f64; 2], f64); 6] = {
    const A: f64 = 0.445_948_490_915_964_9;
    const WA: f64 = 0.223_381_589_678_011_47;
    const B: f64 = 0.091_576_213_509_770_74;
    const WB: f64 = 0.109_951_743_655_321_87;
    [
        ([A, A], WA),
        ([1.0 - 2.0 * A, A], WA),
        ([A, 1.0 - 2.0 * A], WA),
        ([B, B], WB),
        ([1.0 - 2.0 * B, B], WB),
        ([B, 1.0 - 2.0 * B], WB),
    ]
};

/// 3-point Gauss-Legendre rule on `[0, 1]`, exact for degree 5. Weights
/// sum to 1 (multiply by the edge length).
pub(crate) fn edge_rule() -> [(f64, f64); 3] {
    let d = 0.5 * (0.6f64).sqrt();
    [(0.5 - d, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + d, 5.0 / 18.0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of xi^a eta^b over the reference triangle:
    /// a! b! / (a + b + 2)!
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn triangle_rule_exact_to_degree_four() {
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let q: f64 = TRIANGLE_RULE
                    .iter()
                    .map(|(p, w)| w * 0.5 * p[0].powi(a as i32) * p[1].powi(b as i32))
                    .sum();
                assert!((q - monomial_integral(a, b)).abs() < 1e-16, "{a} {b}");
            }
        }
    }

    #[test]
    fn edge_rule_exact_to_degree_five() {
        for d in 0..=5 {
            let q: f64 = edge_rule().iter().map(|(t, w)| w * t.powi(d)).sum();
            assert!((q - 1.0 / (d as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
