//! Torus geometry, the Green-type function `G(z, ζ)` and the singular
//! function `Q_D` with its Wirtinger derivatives.
//!
//! Coordinates are those of the rectangle `D_D = [−2L, 2L) × (−L'/2, L'/2)`
//! inside the torus with lattice generated by `4L` and `2iL'`. The mirror
//! map is `z ↦ −z` and the reflection across the boundary curves `γ±` is
//! `z ↦ z̄ + iL'`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_rect, QuadResult, QuadratureSpec, Rect};
use crate::theta::{JacobiContext, Modulus};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rectangles and lattice of the torus attached to one parameter pack.
#[derive(Debug, Clone, Copy)]
pub struct TorusGeometry {
    pub params: EllipticParams,
}

impl TorusGeometry {
    pub fn new(params: EllipticParams) -> Self {
        Self { params }
    }

    /// Lattice generators `(4L, 2iL')`.
    pub fn generators(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(4.0 * self.params.quarter_l, 0.0),
            Complex64::new(0.0, 2.0 * self.params.quarter_l_prime),
        )
    }

    /// The rectangle `D = (−2L, 2L) × (−L', L')`.
    pub fn rect_d(&self) -> Rect {
        let (l, lp) = (self.params.quarter_l, self.params.quarter_l_prime);
        Rect::new(-2.0 * l, 2.0 * l, -lp, lp)
    }

    /// The rectangle `D_D = [−2L, 2L) × (−L'/2, L'/2)`.
    pub fn rect_dd(&self) -> Rect {
        let (l, lp) = (self.params.quarter_l, self.params.quarter_l_prime);
        Rect::new(-2.0 * l, 2.0 * l, -0.5 * lp, 0.5 * lp)
    }

    /// Point of `γ±` at parameter `t ∈ [0, 1]`: `−2L + 4Lt ± iL'/2`.
    pub fn gamma(&self, upper: bool, t: f64) -> Complex64 {
        let (l, lp) = (self.params.quarter_l, self.params.quarter_l_prime);
        let y = if upper { 0.5 * lp } else { -0.5 * lp };
        Complex64::new(-2.0 * l + 4.0 * l * t, y)
    }

    /// Representative of `z` in the half-open cell `[−2L, 2L) × [−L', L')`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (wx, wy) = (4.0 * self.params.quarter_l, 2.0 * self.params.quarter_l_prime);
        let re = z.re - wx * ((z.re + 0.5 * wx) / wx).floor();
        let im = z.im - wy * ((z.im + 0.5 * wy) / wy).floor();
        Complex64::new(re, im)
    }

    /// The mirror map `p ↦ p'` in torus coordinates.
    pub fn mirror(&self, z: Complex64) -> Complex64 {
        -z
    }

    /// The reflection `p ↦ p*` across `γ±`.
    pub fn reflect(&self, z: Complex64) -> Complex64 {
        z.conj() + I * self.params.quarter_l_prime
    }
}

/// Closed-form evaluator for `G`, `Q_D`, `∂Q_D` and `∂̄Q_D`.
#[derive(Debug, Clone, Copy)]
pub struct GreenEvaluator {
    pub geometry: TorusGeometry,
    pub ctx_kappa: JacobiContext,
    pub b_const: Complex64,
    e_over_k: f64,
    ep_over_kp: f64,
    pi_m_over_k: f64,
    two_m_over_kp: f64,
}

impl GreenEvaluator {
    pub fn new(params: EllipticParams) -> Self {
        Self::with_context(JacobiContext::new(params, Modulus::Kappa))
    }

    /// Uses a caller-supplied `κ` context (for non-default truncation settings).
    pub fn with_context(ctx_kappa: JacobiContext) -> Self {
        let p = ctx_kappa.params;
        let x0 = p.x0;
        Self {
            geometry: TorusGeometry::new(p),
            ctx_kappa,
            b_const: I * FRAC_1_SQRT_2 * (x0 * (1.0 - x0.powi(4))).sqrt(),
            e_over_k: p.e / p.k,
            ep_over_kp: p.e_prime / p.k_prime,
            pi_m_over_k: PI * p.m / p.k,
            two_m_over_kp: 2.0 * p.m / p.k_prime,
        }
    }

    pub fn params(&self) -> &EllipticParams {
        &self.geometry.params
    }

    /// `G(z, ζ)`; returns `±∞` at the logarithmic singularities `z ≡ ±ζ`.
    pub fn green_g(&self, z: Complex64, zeta: Complex64) -> Result<f64> {
        let p = self.params();
        let (m, kp) = (p.m, p.k_prime);
        let ikp = I * kp;
        let ctx = &self.ctx_kappa;
        let zb = z.conj();
        let num = ctx.ln_abs_theta0(m * z - m * zeta + ikp)? + ctx.ln_abs_theta0(m * zb + m * zeta)?;
        let den = ctx.ln_abs_theta0(m * z + m * zeta - ikp)? + ctx.ln_abs_theta0(m * zb - m * zeta)?;
        let log_part = if num == den {
            // both infinite only when ζ ≡ −ζ, where the formula is undefined anyway
            0.0
        } else {
            -(num - den)
        };
        Ok(log_part - self.pi_m_over_k * (self.two_m_over_kp * zeta.im - 1.0) * z.im)
    }

    /// `Q_D(z) = ∂_ζ G(z, ζ)` at `ζ = 0`.
    pub fn q_d(&self, z: Complex64) -> Result<Complex64> {
        let p = self.params();
        let (m, k, kp) = (p.m, p.k, p.k_prime);
        let ctx = &self.ctx_kappa;
        let first = ctx.jacobi_z(m * z + I * kp).map_err(|e| relabel(e, z))?;
        let second = ctx.jacobi_z(m * z.conj()).map_err(|e| relabel(e, z))?;
        Ok(m * first - m * second + I * (PI * m / (k * kp)) * (m * z.im) + I * (self.pi_m_over_k / 2.0))
    }

    /// Holomorphic derivative `∂_z Q_D = M²(−1/sn²(Mz; κ) + E'/K')`.
    pub fn dz_q_d(&self, z: Complex64) -> Result<Complex64> {
        let m = self.params().m;
        let sn = self.ctx_kappa.sn(m * z).map_err(|e| relabel(e, z))?;
        let sn_sq = sn * sn;
        if sn_sq.norm() < 1e-26 {
            return Err(Error::Pole { at: z });
        }
        Ok(m * m * (-1.0 / sn_sq + self.ep_over_kp))
    }

    /// Anti-holomorphic derivative `∂̄_z Q_D = M²(−dn²(Mz̄; κ) + E/K − π/(2KK'))`.
    pub fn dzbar_q_d(&self, z: Complex64) -> Result<Complex64> {
        let p = self.params();
        let m = p.m;
        let dn = self.ctx_kappa.dn(m * z.conj()).map_err(|e| relabel(e, z))?;
        Ok(m * m * (-dn * dn + self.e_over_k - PI / (2.0 * p.k * p.k_prime)))
    }

    /// `∫_{D_D} |∂̄Q_D|² dA` by adaptive cubature.
    pub fn kernel_norm_integral(&self, quad: &QuadratureSpec) -> Result<QuadResult> {
        let rect = self.geometry.rect_dd();
        integrate_rect(
            |x, y| self.dzbar_q_d(Complex64::new(x, y)).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
            rect,
            &QuadratureSpec { singular_points: vec![], ..quad.clone() },
        )
    }

    /// Closed form `πM²E'/K'` of [`Self::kernel_norm_integral`].
    pub fn kernel_norm_closed_form(&self) -> f64 {
        let m = self.params().m;
        PI * m * m * self.ep_over_kp
    }

    /// `πM²E'/(|b|²K') = π(1+x0²)E'/(2x0(1−x0²)K')`.
    pub fn scaled_kernel_norm(&self) -> f64 {
        let x0 = self.params().x0;
        PI * (1.0 + x0 * x0) * self.ep_over_kp / (2.0 * x0 * (1.0 - x0 * x0))
    }
}

/// Pole signals from the theta layer refer to a rescaled argument; report `z` instead.
fn relabel(e: Error, z: Complex64) -> Error {
    match e {
        Error::Pole { .. } => Error::Pole { at: z },
        other => other,
    }
}

/// Central-difference Wirtinger derivatives `(∂f, ∂̄f)` with step `h`.
pub fn wirtinger_fd<F>(f: F, z: Complex64, h: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let dy = (f(z + I * h)? - f(z - I * h)?) / (2.0 * h);
    Ok(((dx - I * dy) / 2.0, (dx + I * dy) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::params_from_x0;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ev(x0: f64) -> GreenEvaluator {
        GreenEvaluator::new(params_from_x0(x0).unwrap())
    }

    #[test]
    fn b_constant_modulus() {
        for x0 in [0.2, 0.5, 0.8] {
            let e = ev(x0);
            assert!((e.b_const.norm_sqr() - x0 * (1.0 - x0.powi(4)) / 2.0).abs() < 1e-15);
            assert_eq!(e.b_const.re, 0.0);
        }
    }

    #[test]
    fn geometry_reduction_and_maps() {
        let e = ev(0.5);
        let g = e.geometry;
        let (w1, w2) = g.generators();
        let z = c(0.3, -0.2);
        assert!((g.reduce(z + 3.0 * w1 - 5.0 * w2) - z).norm() < 1e-12);
        let r = g.reduce(c(100.0, -73.0));
        let d = g.rect_d();
        assert!(r.re >= d.x0 && r.re < d.x1 && r.im >= d.y0 && r.im < d.y1);
        assert_eq!(g.mirror(z), -z);
        // the reflection fixes γ+ pointwise and γ− modulo the lattice
        let upper = g.gamma(true, 0.3);
        assert!((g.reflect(upper) - upper).norm() < 1e-15);
        let lower = g.gamma(false, 0.3);
        assert!((g.reduce(g.reflect(lower)) - lower).norm() < 1e-12);
    }

    #[test]
    fn green_symmetry_and_oddness() {
        let e = ev(0.5);
        let zeta = c(0.4, 0.1);
        for z in [c(0.2, -0.3), c(-1.1, 0.5), c(2.0, 0.05)] {
            let g = e.green_g(z, zeta).unwrap();
            assert!((g - e.green_g(zeta, z).unwrap()).abs() < 1e-10);
            assert!((e.green_g(-z, zeta).unwrap() + g).abs() < 1e-10);
        }
    }

    #[test]
    fn green_vanishes_on_gamma() {
        let e = ev(0.4);
        let zeta = c(-0.7, 0.2);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            for upper in [true, false] {
                let z = e.geometry.gamma(upper, t);
                assert!(e.green_g(z, zeta).unwrap().abs() < 1e-10, "t={t} upper={upper}");
                assert!(e.q_d(z).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn green_is_lattice_periodic() {
        let e = ev(0.3);
        let (w1, w2) = e.geometry.generators();
        let zeta = c(0.5, -0.2);
        let z = c(0.9, 0.3);
        let g = e.green_g(z, zeta).unwrap();
        assert!((e.green_g(z + w1, zeta).unwrap() - g).abs() < 1e-10);
        assert!((e.green_g(z + w2, zeta).unwrap() - g).abs() < 1e-10);
        assert!((e.green_g(z - w2, zeta).unwrap() - g).abs() < 1e-10);
    }

    #[test]
    fn green_singularities_are_extended_reals() {
        let e = ev(0.5);
        let zeta = c(0.4, 0.1);
        // the displayed formula gives −log|z−ζ| at ζ and +log|z+ζ| at −ζ
        assert_eq!(e.green_g(zeta, zeta).unwrap(), f64::INFINITY);
        assert_eq!(e.green_g(-zeta, zeta).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn q_d_residue_and_oddness() {
        let e = ev(0.5);
        for z in [c(0.3, 0.1), c(-1.0, 0.4)] {
            assert!((e.q_d(-z).unwrap() + e.q_d(z).unwrap()).norm() < 1e-10);
        }
        for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
            // z·Q_D(z) = 1 + O(z): Richardson on two radii removes the linear term
            let f = |r: f64| dir * r * e.q_d(dir * r).unwrap();
            let extrapolated = 2.0 * f(1e-4) - f(2e-4);
            assert!((extrapolated - 1.0).norm() < 1e-6, "{dir}");
        }
        assert!(matches!(e.q_d(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(e.dz_q_d(c(0.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn q_d_matches_zeta_derivative_of_green() {
        let e = ev(0.5);
        let h = 1e-5 * e.params().quarter_l;
        for z in [c(0.6, 0.2), c(-1.3, -0.5), c(2.5, 0.1)] {
            let (d, _) = wirtinger_fd(|w| e.green_g(z, w).map(|g| c(g, 0.0)), c(0.0, 0.0), h).unwrap();
            assert!((d - e.q_d(z).unwrap()).norm() < 1e-6, "z={z}: {d} vs {}", e.q_d(z).unwrap());
        }
    }

    #[test]
    fn wirtinger_closed_forms_match_differences() {
        let e = ev(0.45);
        let h = 1e-5 * e.params().quarter_l;
        for k in 0..10 {
            let t = k as f64 / 10.0;
            let z = c(-1.73 + 3.7 * t, 0.35 + 0.6 * (2.0 * PI * t).sin());
            let (d, db) = wirtinger_fd(|w| e.q_d(w), z, h).unwrap();
            assert!((d - e.dz_q_d(z).unwrap()).norm() < 1e-6, "∂ at {z}");
            assert!((db - e.dzbar_q_d(z).unwrap()).norm() < 1e-6, "∂̄ at {z}: {db} vs {}", e.dzbar_q_d(z).unwrap());
        }
    }

    #[test]
    fn dzbar_at_origin() {
        let e = ev(0.5);
        let p = *e.params();
        let v = e.dzbar_q_d(c(0.0, 0.0)).unwrap();
        assert!((v.re + p.m * p.m * p.e_prime / p.k_prime).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
        let via_legendre = -p.m * p.m * (1.0 - p.e / p.k + PI / (2.0 * p.k * p.k_prime));
        assert!((via_legendre - v.re).abs() < 1e-12);
    }

    #[test]
    fn kernel_norm_closed_form() {
        let e = ev(0.5);
        let quad = QuadratureSpec::with_tolerances(1e-9, 1e-14);
        let r = e.kernel_norm_integral(&quad).unwrap();
        let exact = e.kernel_norm_closed_form();
        assert!((r.value / exact - 1.0).abs() < 1e-6, "{} vs {exact}", r.value);
        let scaled = r.value / e.b_const.norm_sqr();
        assert!((scaled / e.scaled_kernel_norm() - 1.0).abs() < 1e-6);
    }
}
