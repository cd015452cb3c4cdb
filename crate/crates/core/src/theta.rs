//! Jacobi's theta function `θ0`, the `Z` function and `sn`, `cn`, `dn`.
//!
//! With quarter periods `Q` (real) and `Q'` (imaginary) and nome
//! `h = exp(−πQ'/Q)`,
//!
//! ```text
//! ϑ0(u) = 1 + 2 Σ_{n≥1} (−1)ⁿ h^{n²} cos(2πnu),     θ0(z) = ϑ0(z / 2Q)
//! ```
//!
//! Arguments are first reduced into the strip `|Im z| ≤ Q'` using the exact
//! quasi-periodicity `θ0(z + 2iQ') = −h⁻¹ e^{−πiz/Q} θ0(z)`; the multiplier
//! is carried as a complex logarithm so quotients such as `sn` never form
//! the (possibly huge) factors explicitly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which of the two moduli of the parameter pack a context evaluates at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    /// `k = κ` with quarter periods `K`, `K'`.
    Kappa,
    /// `k = x0²` with quarter periods `L`, `L'`.
    X0Squared,
}

/// Evaluator for the theta quotients at one fixed modulus.
#[derive(Debug, Clone, Copy)]
pub struct JacobiContext {
    pub params: EllipticParams,
    pub modulus: Modulus,
    pub truncation_tol: f64,
    pub max_terms: usize,
    k: f64,
    kp: f64,
    quarter: f64,
    quarter_prime: f64,
    nome: f64,
}

/// Theta value split as `base · exp(log_factor)`; `base` is the series value
/// at the reduced argument and `scale` the sum of the term magnitudes.
#[derive(Debug, Clone, Copy)]
struct ThetaParts {
    base: Complex64,
    log_factor: Complex64,
    scale: f64,
}

/// Lattice shift bringing `z` into `|Re z| ≤ Q`, `|Im z| ≤ Q'` for θ0.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    z: Complex64,
    m: i64,
}

/// Residuals of the two `x0²` shift identities returned by [`JacobiContext::sn_shift_identities`].
#[derive(Debug, Clone, Copy)]
pub struct ShiftResiduals {
    /// `sn(u+iL')·x0²·sn(u) − 1`
    pub imaginary_shift: Complex64,
    /// `sn(u+L) − cn(u)/dn(u)`
    pub real_shift: Complex64,
}

impl JacobiContext {
    pub const DEFAULT_TOL: f64 = 1e-15;
    pub const DEFAULT_MAX_TERMS: usize = 64;
    /// `|θ0| < POLE_THRESHOLD · scale` is reported as a pole of the quotient.
    pub const POLE_THRESHOLD: f64 = 1e-13;

    pub fn new(params: EllipticParams, modulus: Modulus) -> Self {
        Self::with_truncation(params, modulus, Self::DEFAULT_TOL, Self::DEFAULT_MAX_TERMS)
    }

    pub fn with_truncation(
        params: EllipticParams,
        modulus: Modulus,
        truncation_tol: f64,
        max_terms: usize,
    ) -> Self {
        let (k, kp, quarter, quarter_prime, nome) = match modulus {
            Modulus::Kappa => (params.kappa, params.kappa_prime, params.k, params.k_prime, params.nome_h),
            Modulus::X0Squared => (
                params.l,
                params.l_prime,
                params.quarter_l,
                params.quarter_l_prime,
                params.nome_l(),
            ),
        };
        Self { params, modulus, truncation_tol, max_terms, k, kp, quarter, quarter_prime, nome }
    }

    pub fn kappa(params: EllipticParams) -> Self {
        Self::new(params, Modulus::Kappa)
    }

    pub fn x0_squared(params: EllipticParams) -> Self {
        Self::new(params, Modulus::X0Squared)
    }

    pub fn modulus_value(&self) -> f64 {
        self.k
    }

    pub fn complementary_modulus(&self) -> f64 {
        self.kp
    }

    /// Real quarter period (`K` or `L`).
    pub fn quarter(&self) -> f64 {
        self.quarter
    }

    /// Imaginary quarter period (`K'` or `L'`).
    pub fn quarter_prime(&self) -> f64 {
        self.quarter_prime
    }

    pub fn nome(&self) -> f64 {
        self.nome
    }

    fn reduce(&self, z: Complex64) -> Reduced {
        let two_q = 2.0 * self.quarter;
        let two_qp = 2.0 * self.quarter_prime;
        let m = (z.im / two_qp).round();
        let re = z.re - two_q * (z.re / two_q).round();
        Reduced { z: Complex64::new(re, z.im - m * two_qp), m: m as i64 }
    }

    /// `ln` of the quasi-periodicity multiplier, `θ0(z_r + 2imQ') = θ0(z_r)·exp(·)`.
    fn log_multiplier(&self, r: &Reduced) -> Complex64 {
        let m = r.m as f64;
        Complex64::new(-m * m * self.nome.ln(), m * PI) - I * PI * m * r.z / self.quarter
    }

    /// Truncated series for ϑ0 and, optionally, its u-derivative at a reduced argument.
    fn series(&self, u: Complex64, with_derivative: bool) -> Result<(Complex64, Complex64, f64)> {
        let h = self.nome;
        let mut value = Complex64::new(1.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut scale = 1.0;
        let im = u.im.abs();
        let mut n = 1usize;
        loop {
            if n > self.max_terms {
                return Err(Error::Truncation { u, max_terms: self.max_terms });
            }
            let nf = n as f64;
            let weight = 2.0 * h.powf(nf * nf);
            let bound = weight * (2.0 * PI * nf * im).cosh() * if with_derivative { 2.0 * PI * nf } else { 1.0 };
            if !bound.is_finite() {
                return Err(Error::Overflow { u });
            }
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let arg = 2.0 * PI * nf * u;
            value += sign * weight * arg.cos();
            if with_derivative {
                deriv -= sign * weight * 2.0 * PI * nf * arg.sin();
            }
            scale += weight * (2.0 * PI * nf * im).cosh();
            if bound < self.truncation_tol * scale {
                break;
            }
            n += 1;
        }
        Ok((value, deriv, scale))
    }

    fn parts(&self, z: Complex64) -> Result<ThetaParts> {
        let r = self.reduce(z);
        let u = r.z / (2.0 * self.quarter);
        let (base, _, scale) = self.series(u, false)?;
        Ok(ThetaParts { base, log_factor: self.log_multiplier(&r), scale })
    }

    /// `θ0(z)`.
    pub fn theta0(&self, z: Complex64) -> Result<Complex64> {
        let p = self.parts(z)?;
        if p.log_factor.re > 700.0 {
            return Err(Error::Overflow { u: z / (2.0 * self.quarter) });
        }
        Ok(p.base * p.log_factor.exp())
    }

    /// `ln|θ0(z)|`, `−∞` at the zeros (within the pole threshold); never overflows.
    pub fn ln_abs_theta0(&self, z: Complex64) -> Result<f64> {
        let p = self.parts(z)?;
        let a = p.base.norm();
        Ok(if a < Self::POLE_THRESHOLD * p.scale { f64::NEG_INFINITY } else { a.ln() + p.log_factor.re })
    }

    /// `θ0'(z)` by term-wise differentiation.
    pub fn theta0_prime(&self, z: Complex64) -> Result<Complex64> {
        let theta = self.theta0(z)?;
        let zf = self.z_unchecked(z)?;
        Ok(theta * zf)
    }

    fn z_unchecked(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z);
        let u = r.z / (2.0 * self.quarter);
        let (value, deriv, _) = self.series(u, true)?;
        Ok(deriv / (2.0 * self.quarter) / value - (r.m as f64) * PI * I / self.quarter)
    }

    /// Jacobi's `Z(z) = θ0'(z)/θ0(z)`.
    pub fn jacobi_z(&self, z: Complex64) -> Result<Complex64> {
        let r = self.reduce(z);
        let u = r.z / (2.0 * self.quarter);
        let (value, deriv, scale) = self.series(u, true)?;
        if value.norm() < Self::POLE_THRESHOLD * scale {
            return Err(Error::Pole { at: z });
        }
        Ok(deriv / (2.0 * self.quarter) / value - (r.m as f64) * PI * I / self.quarter)
    }

    /// `θ0(a)/θ0(b)` computed without forming either factor.
    fn theta_ratio(&self, num: Complex64, den: Complex64, pole_at: Complex64) -> Result<Complex64> {
        let pn = self.parts(num)?;
        let pd = self.parts(den)?;
        if pd.base.norm() < Self::POLE_THRESHOLD * pd.scale {
            return Err(Error::Pole { at: pole_at });
        }
        Ok(pn.base / pd.base * (pn.log_factor - pd.log_factor).exp())
    }

    /// `h^{1/4}·e^{−iπz/(2Q)}`, the common prefactor of `sn` and `cn`.
    fn prefactor(&self, z: Complex64) -> Complex64 {
        (-(PI / (4.0 * self.quarter)) * (self.quarter_prime + 2.0 * I * z)).exp()
    }

    /// `(sn, cn, dn)` at this context's modulus:
    ///
    /// ```text
    /// sn = i·P/√k · θ0(z−iQ')/θ0(z),   cn = √(k'/k)·P · θ0(z−Q−iQ')/θ0(z),   dn = √k' · θ0(z−Q)/θ0(z)
    /// ```
    ///
    /// with `P = h^{1/4} e^{−iπz/(2Q)}`.
    pub fn sn_cn_dn(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let q = self.quarter;
        let qp = self.quarter_prime;
        let pre = self.prefactor(z);
        let sn = I * pre / self.k.sqrt() * self.theta_ratio(z - I * qp, z, z)?;
        let cn = (self.kp / self.k).sqrt() * pre * self.theta_ratio(z - q - I * qp, z, z)?;
        let dn = self.kp.sqrt() * self.theta_ratio(z - q, z, z)?;
        Ok((sn, cn, dn))
    }

    pub fn sn(&self, z: Complex64) -> Result<Complex64> {
        let qp = self.quarter_prime;
        Ok(I * self.prefactor(z) / self.k.sqrt() * self.theta_ratio(z - I * qp, z, z)?)
    }

    pub fn dn(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.kp.sqrt() * self.theta_ratio(z - self.quarter, z, z)?)
    }

    /// `[sn(Mz;κ)]²` through the `x0²` quotient `ξ = cn(z;x0²)/dn(z;x0²)`.
    ///
    /// Works from either context of the same parameter pack; the `x0²`
    /// evaluator is rebuilt with this context's truncation settings.
    pub fn landen_sn_sq(&self, z: Complex64) -> Result<Complex64> {
        let ctx_l = Self::with_truncation(self.params, Modulus::X0Squared, self.truncation_tol, self.max_terms);
        let (_, cn, dn) = ctx_l.sn_cn_dn(z)?;
        if dn.norm() < Self::POLE_THRESHOLD {
            return Err(Error::Pole { at: z });
        }
        let xi = cn / dn;
        let kp = self.params.kappa_prime;
        let den = (1.0 + kp) - (1.0 - kp) * xi;
        if den.norm() < Self::POLE_THRESHOLD {
            return Err(Error::Pole { at: z });
        }
        Ok((1.0 - xi) / den)
    }

    /// Residuals of `sn(u+iL')=1/(x0²sn(u))` and `sn(u+L)=cn(u)/dn(u)` at modulus `x0²`.
    pub fn sn_shift_identities(&self, u: Complex64) -> Result<ShiftResiduals> {
        let ctx = Self::with_truncation(self.params, Modulus::X0Squared, self.truncation_tol, self.max_terms);
        let l = ctx.quarter;
        let lp = ctx.quarter_prime;
        let (sn, cn, dn) = ctx.sn_cn_dn(u)?;
        let sn_shift_i = ctx.sn(u + I * lp)?;
        let sn_shift_r = ctx.sn(u + l)?;
        Ok(ShiftResiduals {
            imaginary_shift: sn_shift_i * self.params.l * sn - 1.0,
            real_shift: sn_shift_r - cn / dn,
        })
    }
}
