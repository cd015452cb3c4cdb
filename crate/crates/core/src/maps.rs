//! Coordinate bridges between the torus rectangle, the sphere, the unit disk
//! and the exterior disk, plus branch-tracked square roots.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::catalog::{MapClass, UnivalentMap};
use crate::elliptic::{params_from_x0, x0_from_zeta_abs, EllipticParams};
use crate::error::{Error, Result};
use crate::quadrature::integrate_line;
use crate::theta::JacobiContext;

const ZERO_GUARD: f64 = 1e-13;

/// Maps attached to a base point `ζ` of the exterior disk.
#[derive(Debug, Clone, Copy)]
pub struct BridgeMaps {
    pub params: EllipticParams,
    pub ctx_l: JacobiContext,
    pub zeta: Complex64,
}

impl BridgeMaps {
    pub fn new(zeta: Complex64) -> Result<Self> {
        let params = params_from_x0(x0_from_zeta_abs(zeta.norm())?)?;
        Ok(Self { params, ctx_l: JacobiContext::x0_squared(params), zeta })
    }

    pub fn x0(&self) -> f64 {
        self.params.x0
    }

    /// `σ(z) = x0·sn(z + L; x0²)`; a pole of `sn` is reported as [`Error::Pole`].
    pub fn sigma(&self, z: Complex64) -> Result<Complex64> {
        let sn = self
            .ctx_l
            .sn(z + self.params.quarter_l)
            .map_err(|e| match e {
                Error::Pole { .. } => Error::Pole { at: z },
                other => other,
            })?;
        Ok(self.params.x0 * sn)
    }

    /// `τ(w) = ∫₀^{w/x0} dt/(√(1−t²)√(1−x0⁴t²)) − L` along the straight path.
    ///
    /// The principal square roots are continuous on that path except when
    /// `w` is real with `|w| > x0`, which is reported as a branch cut. The
    /// limit from the upper half-plane is available as [`Self::tau_upper`].
    pub fn tau(&self, w: Complex64) -> Result<Complex64> {
        if w.im == 0.0 && w.re.abs() > self.params.x0 {
            return Err(Error::BranchCut { at: w });
        }
        self.tau_integral(w)
    }

    /// `τ` continued from `ℂ₊`, defined on the cut as the boundary limit.
    pub fn tau_upper(&self, w: Complex64) -> Result<Complex64> {
        if w.im < 0.0 {
            return Err(Error::Domain(format!("tau_upper needs Im w ≥ 0, got {w}")));
        }
        if w.im == 0.0 && w.re.abs() > self.params.x0 {
            let l = self.params.quarter_l;
            return if w.re > 0.0 {
                self.tau_on_cut(w.re)
            } else {
                // τ + L is odd, and real coefficients turn the ℂ₊ limit at −x into the ℂ₋ limit at x
                Ok(-(self.tau_on_cut(-w.re)? + l).conj() - l)
            };
        }
        self.tau_integral(w)
    }

    /// `ℂ₊` boundary value of `τ` at real `x > x0`, integrated from `τ(x0) = 0` along the axis.
    fn tau_on_cut(&self, x: f64) -> Result<Complex64> {
        let x0 = self.params.x0;
        let far = 1.0 / x0;
        let tol = 1e-14;
        // on (x0, 1/x0] the integrand is i/(x0√(t²/x0²−1)√(1−x0²t²)); t = x0 + (x−x0)sin²(πu/2)
        let top = x.min(far);
        let span = top - x0;
        let near_part = |u: f64| -> Complex64 {
            let (sn, cs) = (0.5 * PI * u).sin_cos();
            let d1 = span * sn * sn;
            let d2 = (far - top) + span * cs * cs;
            let t = x0 + d1;
            let jac = span * PI * sn * cs;
            Complex64::new(jac / (x0 * (d1 * (t + x0)).sqrt() * (d2 * (far + t)).sqrt()), 0.0)
        };
        let (inner, _) = integrate_line(near_part, 0.0, 1.0, tol, 40)?;
        let mut value = Complex64::new(0.0, inner.re);
        if x > far {
            // past 1/x0 the second root turns imaginary and τ' is real and negative; t = 1/x0 + (x−1/x0)u²
            let span = x - far;
            let far_part = |u: f64| -> Complex64 {
                let d = span * u * u;
                let t = far + d;
                let jac = 2.0 * span * u;
                Complex64::new(jac / (x0 * ((t - x0) * (t + x0)).sqrt() * (d * (t + far)).sqrt()), 0.0)
            };
            let (outer, _) = integrate_line(far_part, 0.0, 1.0, tol * span.max(1.0), 40)?;
            value -= outer.re;
        }
        Ok(value)
    }

    fn tau_integral(&self, w: Complex64) -> Result<Complex64> {
        let x0 = self.params.x0;
        let l = self.params.l;
        let v = w / x0;
        if v.norm() == 0.0 {
            return Ok(Complex64::new(-self.params.quarter_l, 0.0));
        }
        // s = 1 − (1−u)² absorbs inverse square-root behaviour at the far end
        let integrand = |u: f64| -> Complex64 {
            let one_minus_u = 1.0 - u;
            let one_minus_s = one_minus_u * one_minus_u;
            // 1 ∓ s·v written so that they stay accurate when v ≈ ±1 (and likewise for l·v)
            let a = ((1.0 - v) + one_minus_s * v) * ((1.0 + v) - one_minus_s * v);
            let lv = l * v;
            let b = ((1.0 - lv) + one_minus_s * lv) * ((1.0 + lv) - one_minus_s * lv);
            v * 2.0 * one_minus_u / (a.sqrt() * b.sqrt())
        };
        let (value, _) = integrate_line(integrand, 0.0, 1.0, 1e-14 * v.norm().max(1.0), 40)?;
        Ok(value - self.params.quarter_l)
    }

    /// `τ'(w) = 1/(x0·√(1−w²/x0²)·√(1−x0²w²))` with principal roots.
    ///
    /// On the real cut `|w| > x0` this returns the limit from `ℂ₊`.
    pub fn tau_prime(&self, w: Complex64) -> Result<Complex64> {
        let x0 = self.params.x0;
        let w = if w.im == 0.0 && w.re.abs() > x0 { Complex64::new(w.re, 1e-200) } else { w };
        let v = w / x0;
        let a = (1.0 - v) * (1.0 + v);
        let b = (1.0 - x0 * w) * (1.0 + x0 * w);
        if a.norm() < ZERO_GUARD || b.norm() < ZERO_GUARD {
            return Err(Error::Pole { at: w });
        }
        Ok(1.0 / (x0 * a.sqrt() * b.sqrt()))
    }

    /// `η(z) = (|ζ| − x0ζ̄z)/(ζ̄z − x0|ζ|)`, exterior disk → unit disk.
    pub fn eta(&self, z: Complex64) -> Result<Complex64> {
        let x0 = self.params.x0;
        let a = self.zeta.norm();
        let zb = self.zeta.conj();
        if z.is_infinite() {
            return Ok(Complex64::new(-x0, 0.0));
        }
        let den = zb * z - x0 * a;
        if den.norm() < ZERO_GUARD {
            return Err(Error::Pole { at: z });
        }
        Ok((a - x0 * zb * z) / den)
    }

    /// `η⁻¹(w) = (ζ/|ζ|)(1 + x0w)/(w + x0)`.
    pub fn eta_inv(&self, w: Complex64) -> Result<Complex64> {
        let x0 = self.params.x0;
        let den = w + x0;
        if den.norm() < ZERO_GUARD {
            return Err(Error::Pole { at: w });
        }
        Ok(self.zeta / self.zeta.norm() * (1.0 + x0 * w) / den)
    }

    /// The disk map `φ` built from `ψ ∈ Σ`, normalised by `φ(x0) = 0`,
    /// `φ'(x0) = 1` and `φ(−x0) = ∞`.
    ///
    /// `φ(w) = −(1+x0²)²/((1−x0²)|ζ|ζψ'(ζ)) · (ψ(η⁻¹(w)) − ψ(ζ))`.
    pub fn phi_from_psi(&self, psi: &UnivalentMap) -> Result<UnivalentMap> {
        if psi.class != MapClass::Sigma {
            return Err(Error::Domain(format!("{} is not a Σ map", psi.name)));
        }
        let x0 = self.params.x0;
        let (psi_zeta, dpsi_zeta, _) = psi.jet(self.zeta);
        if !dpsi_zeta.is_finite() || dpsi_zeta.norm() == 0.0 {
            return Err(Error::Domain(format!("ψ'(ζ) must be finite and nonzero, got {dpsi_zeta}")));
        }
        let t = 1.0 + x0 * x0;
        let factor = -(t * t) / ((1.0 - x0 * x0) * self.zeta.norm() * self.zeta * dpsi_zeta);
        Ok(UnivalentMap::transported(psi, self.zeta / self.zeta.norm(), x0, factor, psi_zeta))
    }
}

/// Square roots continued from a base point where the branch is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTracker {
    pub base_point: Complex64,
    pub base_value: Complex64,
}

/// Values produced by a closed-loop continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopContinuation {
    pub values: Vec<Complex64>,
    /// Set when the continuation returns to the start with the opposite sign.
    pub monodromy: bool,
}

impl BranchTracker {
    pub fn new(base_point: Complex64, base_value: Complex64) -> Self {
        Self { base_point, base_value }
    }

    fn step(prev: Complex64, arg: Complex64, at: Complex64) -> Result<Complex64> {
        if arg.norm() < ZERO_GUARD {
            return Err(Error::BranchAmbiguity { at, value: arg });
        }
        let r = arg.sqrt();
        Ok(if (r - prev).norm_sqr() <= (r + prev).norm_sqr() { r } else { -r })
    }

    /// Continues `√arg` along a sequence of samples; `args[0]` is the base node.
    pub fn sqrt_along(&self, args: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(args.len());
        let mut prev = self.base_value;
        for (k, a) in args.iter().enumerate() {
            let g = Self::step(prev, *a, Complex64::new(k as f64, 0.0))?;
            out.push(g);
            prev = g;
        }
        Ok(out)
    }

    /// Continues `√arg` over a row-major `rows × cols` grid whose node
    /// `(0, 0)` is the base point: along the first column, then along each row.
    pub fn sqrt_continued(&self, args: &[Complex64], rows: usize, cols: usize) -> Result<Vec<Complex64>> {
        if args.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::Domain(format!("grid of {rows}×{cols} needs {} values, got {}", rows * cols, args.len())));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); args.len()];
        let node = |i: usize, j: usize| Complex64::new(i as f64, j as f64);
        let mut prev = self.base_value;
        for i in 0..rows {
            let first = Self::step(prev, args[i * cols], node(i, 0))?;
            out[i * cols] = first;
            prev = first;
            let mut left = first;
            for j in 1..cols {
                let g = Self::step(left, args[i * cols + j], node(i, j))?;
                out[i * cols + j] = g;
                left = g;
            }
        }
        Ok(out)
    }

    /// Continues `√arg` around a closed loop (`args` should not repeat the start).
    pub fn sqrt_around_loop(&self, args: &[Complex64]) -> Result<LoopContinuation> {
        let values = self.sqrt_along(args)?;
        let last = *values.last().unwrap_or(&self.base_value);
        let closing = Self::step(last, args.first().copied().unwrap_or(self.base_value * self.base_value), Complex64::new(0.0, 0.0))?;
        let monodromy = (closing + values.first().copied().unwrap_or(self.base_value)).norm()
            < (closing - values.first().copied().unwrap_or(self.base_value)).norm();
        Ok(LoopContinuation { values, monodromy })
    }

    /// `√f(z)` continued from the base point to `target` along the log-polar
    /// path `exp((1−t)·log z₀ + t·log z)`, which stays in `|z| > 1` whenever
    /// both ends do.
    pub fn continue_to<F>(&self, f: F, target: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let start = self.base_point.ln();
        let mut delta = target.ln() - start;
        // shortest angular way round
        let two_pi = 2.0 * std::f64::consts::PI;
        delta.im -= two_pi * (delta.im / two_pi).round();
        self.continue_along(f, |t| (start + delta * t).exp(), target)
    }

    /// `√f(z)` continued along the straight segment from the base point to `target`.
    pub fn continue_straight<F>(&self, f: F, target: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let start = self.base_point;
        self.continue_along(f, |t| start + (target - start) * t, target)
    }

    /// `√f` continued along `path(t)`, `t ∈ [0, 1]`, with `path(0)` the base
    /// point. Steps are halved until consecutive samples of `f` differ by
    /// less than half their size, so the nearest-sign rule cannot jump sheets.
    pub fn continue_along<F, P>(&self, f: F, path: P, target: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
        P: Fn(f64) -> Complex64,
    {
        const MAX_STEP: f64 = 1.0 / 8.0;
        let mut t = 0.0;
        let mut prev_arg = self.base_value * self.base_value;
        let mut prev = self.base_value;
        let mut h = MAX_STEP;
        let mut guard = 0;
        while t < 1.0 {
            guard += 1;
            if guard > 10_000 {
                return Err(Error::BranchAmbiguity { at: path(t), value: prev_arg });
            }
            let t1 = (t + h).min(1.0);
            let z1 = if t1 == 1.0 { target } else { path(t1) };
            let a1 = f(z1);
            if !a1.is_finite() || a1.norm() < ZERO_GUARD {
                return Err(Error::BranchAmbiguity { at: z1, value: a1 });
            }
            if (a1 / prev_arg - 1.0).norm() > 0.5 && h > 1e-12 {
                h *= 0.5;
                continue;
            }
            prev = Self::step(prev, a1, z1)?;
            prev_arg = a1;
            t = t1;
            h = (2.0 * h).min(MAX_STEP);
        }
        Ok(prev)
    }
}

/// `√(1 − (ζ̄z)⁻¹)` with the principal branch, valid for `|z|, |ζ| > 1`.
pub fn principal_sqrt_one_minus(zeta: Complex64, z: Complex64) -> Complex64 {
    (1.0 - 1.0 / (zeta.conj() * z)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::by_name;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_special_points() {
        let b = BridgeMaps::new(c(2.0, 0.0)).unwrap();
        let (x0, l) = (b.x0(), b.params.quarter_l);
        assert!((b.sigma(c(0.0, 0.0)).unwrap() - x0).norm() < 1e-13);
        assert!(b.sigma(c(-l, 0.0)).unwrap().norm() < 1e-13);
        assert!((b.sigma(c(-2.0 * l, 0.0)).unwrap() + x0).norm() < 1e-13);
    }

    #[test]
    fn tau_special_points() {
        let b = BridgeMaps::new(c(1.5, 0.5)).unwrap();
        let (x0, l, lp) = (b.x0(), b.params.quarter_l, b.params.quarter_l_prime);
        assert!(b.tau(c(x0, 0.0)).unwrap().norm() < 1e-12);
        assert!((b.tau(c(-x0, 0.0)).unwrap() + 2.0 * l).norm() < 1e-12);
        assert!((b.tau(c(0.0, 0.0)).unwrap() + l).norm() < 1e-15);
        assert!((b.tau_upper(c(1.0 / x0, 0.0)).unwrap() - c(0.0, lp)).norm() < 1e-10);
        assert!(matches!(b.tau(c(0.9, 0.0)), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn sigma_inverts_tau() {
        let b = BridgeMaps::new(c(2.0, 0.0)).unwrap();
        for w in [c(0.1, 0.2), c(-0.7, 0.4), c(1.5, -2.0), c(0.2, -0.01), c(-3.0, 0.5)] {
            let z = b.tau(w).unwrap();
            assert!((b.sigma(z).unwrap() - w).norm() < 1e-9, "{w}");
        }
    }

    #[test]
    fn tau_prime_against_differences() {
        let b = BridgeMaps::new(c(1.7, 0.0)).unwrap();
        let h = 1e-5;
        for w in [c(0.1, 0.3), c(-0.4, -0.6), c(2.0, 1.0)] {
            let fd = (b.tau(w + h).unwrap() - b.tau(w - h).unwrap()) / (2.0 * h);
            assert!((fd - b.tau_prime(w).unwrap()).norm() < 1e-6, "{w}");
        }
    }

    #[test]
    fn eta_pair() {
        let b = BridgeMaps::new(c(1.5, 0.5)).unwrap();
        let x0 = b.x0();
        assert!((b.eta(b.zeta).unwrap() - x0).norm() < 1e-14);
        assert!((b.eta(c(f64::INFINITY, 0.0)).unwrap() + x0).norm() < 1e-15);
        for z in [c(3.0, -1.0), c(-1.1, 0.2), c(0.0, 5.0)] {
            assert!((b.eta_inv(b.eta(z).unwrap()).unwrap() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_normalisation() {
        for (name, zeta) in [("joukowski", c(2.0, 0.0)), ("identity", c(1.5, 0.0)), ("b1:0.7", c(1.5, 0.5))] {
            let b = BridgeMaps::new(zeta).unwrap();
            let phi = b.phi_from_psi(&by_name(name).unwrap()).unwrap();
            let x0 = b.x0();
            assert!(phi.value(c(x0, 0.0)).norm() < 1e-14, "{name}");
            assert!((phi.d1(c(x0, 0.0)) - 1.0).norm() < 1e-12, "{name}");
            assert!(phi.value(c(-x0 + 1e-9, 0.0)).norm() > 1e6, "{name}");
        }
    }

    #[test]
    fn tracker_basics() {
        let t = BranchTracker::new(c(0.0, 0.0), c(1.0, 0.0));
        let out = t.sqrt_continued(&[c(1.0, 0.0); 6], 2, 3).unwrap();
        assert!(out.iter().all(|g| (*g - 1.0).norm() < 1e-15));
        let circle: Vec<Complex64> =
            (0..64).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0)).collect();
        assert!(t.sqrt_around_loop(&circle).unwrap().monodromy);
        let shifted: Vec<Complex64> = circle.iter().map(|u| 3.0 + u).collect();
        let t3 = BranchTracker::new(c(4.0, 0.0), c(2.0, 0.0));
        assert!(!t3.sqrt_around_loop(&shifted).unwrap().monodromy);
        assert!(matches!(t.sqrt_along(&[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::BranchAmbiguity { .. })));
    }
}
