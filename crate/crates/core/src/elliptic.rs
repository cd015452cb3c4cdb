//! Complete elliptic integrals and the parameter pack derived from `x0`.
//!
//! `K` and `E` are evaluated with the arithmetic-geometric mean. The moduli
//! used by the torus construction are
//!
//! ```text
//! κ = 2x0/(1+x0²),  κ' = (1−x0²)/(1+x0²),  l = x0²,  l' = √(1−x0⁴),  M = 1/(1+κ')
//! ```
//!
//! and the complementary modulus is always formed from its closed form
//! rather than from `√(1−k²)`, which keeps `K'` accurate when `κ` is small.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 64;

/// Returns `(K, E)` for the modulus `k` whose complement `kp` is supplied.
///
/// Both arguments must satisfy `k² + kp² = 1`; only `kp > 0` is checked.
fn agm_pair(k: f64, kp: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = kp;
    let mut c = k;
    let mut pow2 = 0.5_f64;
    let mut sum = pow2 * c * c;
    for _ in 0..AGM_MAX_ITER {
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = a_next;
        b = b_next;
        pow2 *= 2.0;
        sum += pow2 * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    let big_k = FRAC_PI_2 / a;
    (big_k, big_k * (1.0 - sum))
}

fn complement(lambda: f64) -> f64 {
    ((1.0 - lambda) * (1.0 + lambda)).sqrt()
}

/// Complete elliptic integral of the first kind,
/// `K(λ) = ∫₀¹ dt / √((1−λ²t²)(1−t²))`, for `0 ≤ λ < 1`.
pub fn complete_k(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("K(λ) requires 0 ≤ λ < 1, got {lambda}")));
    }
    Ok(agm_pair(lambda, complement(lambda)).0)
}

/// Complete elliptic integral of the second kind,
/// `E(λ) = ∫₀¹ √((1−λ²t²)/(1−t²)) dt`, for `0 ≤ λ ≤ 1`.
pub fn complete_e(lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("E(λ) requires 0 ≤ λ ≤ 1, got {lambda}")));
    }
    if lambda == 1.0 {
        return Ok(1.0);
    }
    Ok(agm_pair(lambda, complement(lambda)).1)
}

/// The full set of moduli and complete integrals attached to a point `x0 ∈ (0,1)`.
///
/// `K, K', E, E'` belong to the modulus `κ`, `L, L'` to `l = x0²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticParams {
    pub x0: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub l: f64,
    pub l_prime: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_prime")]
    pub k_prime: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_prime")]
    pub e_prime: f64,
    #[serde(rename = "L")]
    pub quarter_l: f64,
    #[serde(rename = "L_prime")]
    pub quarter_l_prime: f64,
    pub nome_h: f64,
    pub zeta_abs: f64,
}

/// Builds the parameter pack for `0 < x0 < 1`.
pub fn params_from_x0(x0: f64) -> Result<EllipticParams> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain(format!("x0 must lie in (0,1), got {x0}")));
    }
    let x0_sq = x0 * x0;
    let denom = 1.0 + x0_sq;
    let kappa = 2.0 * x0 / denom;
    let kappa_prime = (1.0 - x0_sq) / denom;
    let l = x0_sq;
    let l_prime = ((1.0 - x0_sq) * (1.0 + x0_sq)).sqrt();
    let m = 1.0 / (1.0 + kappa_prime);

    let (k, e) = agm_pair(kappa, kappa_prime);
    let (k_prime, e_prime) = agm_pair(kappa_prime, kappa);
    let (quarter_l, _) = agm_pair(l, l_prime);
    let (quarter_l_prime, _) = agm_pair(l_prime, l);

    Ok(EllipticParams {
        x0,
        kappa,
        kappa_prime,
        l,
        l_prime,
        m,
        k,
        k_prime,
        e,
        e_prime,
        quarter_l,
        quarter_l_prime,
        nome_h: (-PI * k_prime / k).exp(),
        zeta_abs: denom / (2.0 * x0),
    })
}

/// Inverse of `|ζ| = (1+x0²)/(2x0)` on `(0,1)`: `x0 = |ζ| − √(|ζ|²−1)`.
pub fn x0_from_zeta_abs(zeta_abs: f64) -> Result<f64> {
    if !(zeta_abs > 1.0) || !zeta_abs.is_finite() {
        return Err(Error::Domain(format!("|ζ| must exceed 1, got {zeta_abs}")));
    }
    // 1/(a + √(a²−1)) avoids the cancellation in a − √(a²−1)
    Ok(1.0 / (zeta_abs + ((zeta_abs - 1.0) * (zeta_abs + 1.0)).sqrt()))
}

impl EllipticParams {
    /// Parameter pack for a base point with modulus `|ζ|`, so that `κ = 1/|ζ|`.
    pub fn from_zeta_abs(zeta_abs: f64) -> Result<Self> {
        params_from_x0(x0_from_zeta_abs(zeta_abs)?)
    }

    /// `EK' + E'K − KK' − π/2`.
    pub fn legendre_residual(&self) -> f64 {
        self.e * self.k_prime + self.e_prime * self.k - self.k * self.k_prime - FRAC_PI_2
    }

    /// `(K − 2ML, K' − ML')`.
    pub fn landen_residuals(&self) -> (f64, f64) {
        (
            self.k - 2.0 * self.m * self.quarter_l,
            self.k_prime - self.m * self.quarter_l_prime,
        )
    }

    /// `E'/K'`, the ratio that sets every sharp constant downstream.
    pub fn e_over_k_prime(&self) -> f64 {
        self.e_prime / self.k_prime
    }

    /// `E/K` at the modulus `κ`.
    pub fn e_over_k(&self) -> f64 {
        self.e / self.k
    }

    /// Nome of the `x0²` modulus, `exp(−πL'/L)`, which equals `h²`.
    pub fn nome_l(&self) -> f64 {
        (-PI * self.quarter_l_prime / self.quarter_l).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert!((complete_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((complete_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(complete_e(1.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(complete_k(1.0), Err(Error::Domain(_))));
        assert!(matches!(complete_k(-0.1), Err(Error::Domain(_))));
        assert!(matches!(complete_e(1.5), Err(Error::Domain(_))));
        assert!(matches!(complete_e(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(params_from_x0(0.0), Err(Error::Domain(_))));
        assert!(matches!(params_from_x0(1.0), Err(Error::Domain(_))));
        assert!(matches!(x0_from_zeta_abs(1.0), Err(Error::Domain(_))));
        assert!(matches!(x0_from_zeta_abs(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn half_gives_rational_pack() {
        let p = params_from_x0(0.5).unwrap();
        assert!((p.kappa - 0.8).abs() < 1e-15);
        assert!((p.kappa_prime - 0.6).abs() < 1e-15);
        assert!((p.l - 0.25).abs() < 1e-15);
        assert!((p.m - 0.625).abs() < 1e-15);
        assert!((p.zeta_abs - 1.25).abs() < 1e-15);
    }

    #[test]
    fn zeta_two() {
        let x0 = x0_from_zeta_abs(2.0).unwrap();
        assert!((x0 - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert!(((1.0 + x0 * x0) / (2.0 * x0) - 2.0).abs() < 1e-14);
        let p = params_from_x0(x0).unwrap();
        assert!((p.kappa - 0.5).abs() < 1e-15);
    }

    #[test]
    fn x0_matches_corrected_closed_form() {
        for &a in &[1.01_f64, 1.25, 1.5, 2.0, 3.0, 10.0] {
            let s = (1.0 - 1.0 / (a * a)).sqrt();
            let expected = ((1.0 - s) / (1.0 + s)).sqrt();
            assert!((x0_from_zeta_abs(a).unwrap() - expected).abs() < 1e-14, "{a}");
        }
    }
}
