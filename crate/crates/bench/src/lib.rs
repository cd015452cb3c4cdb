//! Shared inputs for the criterion benchmarks.

use goluzin_core::{params_from_x0, Complex64, EllipticParams};

/// Parameter packs across the range used by the test suite.
pub fn parameter_grid() -> Vec<EllipticParams> {
    [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&x0| params_from_x0(x0).expect("x0 in (0,1)"))
        .collect()
}

/// Points in the fundamental rectangle, away from the zeros of θ0.
pub fn rectangle_points(p: &EllipticParams, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            Complex64::new(p.k * (2.0 * t - 1.0), 0.5 * p.k_prime * (6.0 * t).sin())
        })
        .collect()
}
