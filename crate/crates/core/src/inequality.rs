//! Verifiers for the area-type estimates and the pointwise bounds they imply.
//!
//! Every verifier returns a [`VerificationReport`] with the two sides of the
//! inequality, their ratio, an error estimate and a status derived from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use crate::catalog::{format_complex, gronwall_sum, MapClass, UnivalentMap};
use crate::elliptic::{params_from_x0, EllipticParams};
use crate::error::{Error, Result};
use crate::green::GreenEvaluator;
use crate::maps::{BranchTracker, BridgeMaps};
use crate::quadrature::{integrate_disk, integrate_exterior_disk, integrate_rect, QuadratureSpec, SingularPoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance for equality in closed-form pointwise checks.
pub const POINTWISE_EQUALITY_TOL: f64 = 1e-10;
/// Floor of the equality tolerance for quadrature-based checks.
pub const AREA_EQUALITY_TOL: f64 = 5e-3;
/// Radius of the ring used to evaluate `Ψ` next to the diagonal.
pub const DIAGONAL_BLEND_RADIUS: f64 = 1e-4;
/// Number of Gronwall coefficients summed by [`gronwall_check`].
pub const GRONWALL_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// Area-type estimate in exterior-disk coordinates.
    AreaSigma,
    /// Area-type estimate in unit-disk coordinates.
    AreaDisk,
    /// Area-type estimate on the torus rectangle.
    AreaTorus,
    /// Goluzin's pointwise bound on `ψ''/ψ'`.
    Goluzin,
    /// Koebe–Bieberbach bound on `φ''/φ'`.
    KoebeBieberbach,
    /// Grönwall's area theorem.
    Gronwall,
    /// Pointwise bound on `|Ψ(ζ, ζ)|`.
    Pointwise,
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityId::AreaSigma => "area_sigma",
            InequalityId::AreaDisk => "area_disk",
            InequalityId::AreaTorus => "area_torus",
            InequalityId::Goluzin => "goluzin",
            InequalityId::KoebeBieberbach => "koebe_bieberbach",
            InequalityId::Gronwall => "gronwall",
            InequalityId::Pointwise => "pointwise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Equality,
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Equality => "equality",
            Status::Violated => "violated",
        })
    }
}

impl Status {
    /// Equality when `|lhs/rhs − 1| ≤ equality_tol`, otherwise holds when
    /// `lhs ≤ rhs + error`, otherwise violated.
    pub fn classify(lhs: f64, rhs: f64, error: f64, equality_tol: f64) -> Self {
        let ratio = lhs / rhs;
        if (ratio - 1.0).abs() <= equality_tol {
            Status::Equality
        } else if lhs <= rhs + error {
            Status::Holds
        } else {
            Status::Violated
        }
    }
}

/// Echo of the inputs of one verification.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub map: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inequality: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub error_estimate: f64,
    pub status: Status,
    pub inputs: ReportInputs,
    /// Secondary quantities (alternative forms, cross-checks).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn new(inequality: InequalityId, lhs: f64, rhs: f64, error: f64, equality_tol: f64, inputs: ReportInputs) -> Self {
        Self {
            inequality,
            lhs,
            rhs,
            ratio: lhs / rhs,
            error_estimate: error,
            status: Status::classify(lhs, rhs, error, equality_tol),
            inputs,
            details: BTreeMap::new(),
        }
    }

    fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}

fn area_equality_tol(rhs: f64, error: f64) -> f64 {
    AREA_EQUALITY_TOL.max(3.0 * error / rhs)
}

/// Taylor polynomial of an analytic function recovered from samples on a
/// circle, used where the function has a removable singularity at the centre.
#[derive(Debug, Clone)]
struct RingBlend {
    center: Complex64,
    radius: f64,
    coeffs: Vec<Complex64>,
}

impl RingBlend {
    const NODES: usize = 16;

    fn new<F>(center: Complex64, radius: f64, f: F, c0: Option<Complex64>) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let n = Self::NODES;
        let samples = (0..n)
            .map(|j| f(center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64)))
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let s: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64))
                    .sum();
                s / (n as f64 * radius.powi(k as i32))
            })
            .collect();
        if let Some(c0) = c0 {
            coeffs[0] = c0;
        }
        Ok(Self { center, radius, coeffs })
    }

    fn covers(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let d = z - self.center;
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * d + c)
    }
}

/// Evaluator of the kernel `Ψ(z, ζ)` for a `Σ` map:
///
/// ```text
/// Ψ = √A·ψ'(z)/(ψ(z)−ψ(ζ)) − √B/(z−ζ) + (E'/K')/(√(1−|ζ|⁻²)·√(1−(ζ̄z)⁻¹)·z)
/// A = ψ'(ζ)(z−ζ)/(ψ(z)−ψ(ζ)),   B = (1−(ζ̄z)⁻¹)/(1−|ζ|⁻²)
/// ```
///
/// `√A` is continued from `A(ζ) = 1`; the other roots are principal.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    pub psi: UnivalentMap,
    pub zeta: Complex64,
    pub params: EllipticParams,
    pub e_over_k_prime: f64,
    sqrt_a_sign: f64,
    psi_zeta: Complex64,
    dpsi_zeta: Complex64,
    d2psi_zeta: Complex64,
    sqrt_c: f64,
    blend: Option<RingBlend>,
}

impl PsiEvaluator {
    pub fn new(psi: &UnivalentMap, zeta: Complex64) -> Result<Self> {
        Self::with_sqrt_a_sign(psi, zeta, 1.0)
    }

    /// Evaluator whose `√A` branch starts from `sign` instead of `+1`.
    pub fn with_sqrt_a_sign(psi: &UnivalentMap, zeta: Complex64, sign: f64) -> Result<Self> {
        if psi.class != MapClass::Sigma {
            return Err(Error::Domain(format!("{} is not a Σ map", psi.name)));
        }
        let params = EllipticParams::from_zeta_abs(zeta.norm())?;
        let (psi_zeta, dpsi_zeta, d2psi_zeta) = psi.jet(zeta);
        if !(dpsi_zeta.is_finite() && d2psi_zeta.is_finite()) || dpsi_zeta.norm() == 0.0 {
            return Err(Error::Domain(format!("ψ'(ζ) must be finite and nonzero at ζ = {zeta}")));
        }
        let mut ev = Self {
            psi: psi.clone(),
            zeta,
            params,
            e_over_k_prime: params.e_over_k_prime(),
            sqrt_a_sign: sign.signum(),
            psi_zeta,
            dpsi_zeta,
            d2psi_zeta,
            sqrt_c: (1.0 - 1.0 / zeta.norm_sqr()).sqrt(),
            blend: None,
        };
        if sign > 0.0 {
            let c0 = ev.psi_at_diagonal();
            let blend = RingBlend::new(zeta, DIAGONAL_BLEND_RADIUS, |z| ev.psi_field_raw(z), Some(c0))?;
            ev.blend = Some(blend);
        }
        Ok(ev)
    }

    /// `√A(z)` on the branch with `√A(ζ) = ±1`.
    pub fn sqrt_a(&self, z: Complex64) -> Result<Complex64> {
        let zeta = self.zeta;
        let root = if let Some(b) = self.psi.laurent_b() {
            // A = (1 − b/ζ²)/(1 − b/(zζ)); the denominator stays in |u − 1| < 1
            (1.0 - b / (zeta * zeta)).sqrt() / (1.0 - b / (z * zeta)).sqrt()
        } else {
            let a = |w: Complex64| self.dpsi_zeta * (w - zeta) / (self.psi.value(w) - self.psi_zeta);
            BranchTracker::new(zeta, Complex64::new(1.0, 0.0)).continue_to(a, z)?
        };
        Ok(self.sqrt_a_sign * root)
    }

    /// `Ψ(z, ζ)` from the three-term formula, without diagonal blending.
    pub fn psi_field_raw(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() > 1.0) {
            return Err(Error::Domain(format!("Ψ is defined for |z| > 1, got {z}")));
        }
        let zeta = self.zeta;
        let (v, d1, _) = self.psi.jet(z);
        let diff = v - self.psi_zeta;
        if diff.norm() == 0.0 {
            return Err(Error::Pole { at: z });
        }
        let u = (1.0 - 1.0 / (zeta.conj() * z)).sqrt();
        let first = self.sqrt_a(z)? * d1 / diff;
        let second = u / self.sqrt_c / (z - zeta);
        let third = self.e_over_k_prime / (self.sqrt_c * u * z);
        Ok(first - second + third)
    }

    /// `Ψ(z, ζ)`; inside a small disk around `ζ` the value comes from a
    /// Taylor polynomial anchored at [`Self::psi_at_diagonal`].
    pub fn psi_field(&self, z: Complex64) -> Result<Complex64> {
        match &self.blend {
            Some(b) if b.covers(z) => Ok(b.eval(z)),
            _ => self.psi_field_raw(z),
        }
    }

    /// Closed form of `Ψ(ζ, ζ)`.
    pub fn psi_at_diagonal(&self) -> Complex64 {
        let zeta = self.zeta;
        let a2 = zeta.norm_sqr();
        self.d2psi_zeta / (4.0 * self.dpsi_zeta) - 1.0 / (2.0 * zeta) - (2.0 - a2) / (2.0 * (a2 - 1.0) * zeta)
            + self.e_over_k_prime * a2 / ((a2 - 1.0) * zeta)
    }

    /// `(E'/K')·|ζ|/(|ζ|²−1)`, the bound on `|Ψ(ζ, ζ)|`.
    pub fn pointwise_bound(&self) -> f64 {
        let a = self.zeta.norm();
        self.e_over_k_prime * a / (a * a - 1.0)
    }

    /// `2π(E'/K')|ζ|/(|ζ|²−1)`, the right side of the area estimate.
    pub fn area_bound(&self) -> f64 {
        2.0 * PI * self.pointwise_bound()
    }

    fn inputs(&self, spec: Option<&QuadratureSpec>) -> ReportInputs {
        ReportInputs {
            map: self.psi.name.clone(),
            zeta: Some(format_complex(self.zeta)),
            x0: Some(self.params.x0),
            rel_tol: spec.map(|s| s.rel_tol),
            abs_tol: spec.map(|s| s.abs_tol),
            ..ReportInputs::default()
        }
    }
}

/// Holds the first error raised inside a quadrature integrand.
struct ErrorSlot(OnceLock<Error>);

impl ErrorSlot {
    fn new() -> Self {
        Self(OnceLock::new())
    }

    fn value(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let _ = self.0.set(e);
                0.0
            }
        }
    }

    fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// `∫_{|z|>1} |Ψ(z,ζ)|²/|z−ζ| dA ≤ 2π(E'/K')|ζ|/(|ζ|²−1)`.
pub fn verify_area_sigma(psi: &UnivalentMap, zeta: Complex64, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let ev = PsiEvaluator::new(psi, zeta)?;
    let slot = ErrorSlot::new();
    let quad = QuadratureSpec { singular_points: vec![SingularPoint::inverse_distance(zeta)], ..spec.clone() };
    let r = integrate_exterior_disk(
        |z| slot.value(ev.psi_field(z).map(|p| p.norm_sqr() / (z - zeta).norm())),
        &quad,
    )?;
    slot.check()?;
    let rhs = ev.area_bound();
    let mut report = VerificationReport::new(
        InequalityId::AreaSigma,
        r.value,
        rhs,
        r.error,
        area_equality_tol(rhs, r.error),
        ev.inputs(Some(spec)),
    );
    report.details.insert("cells".into(), r.cells as f64);
    Ok(report)
}

/// Integrand of the disk form, built from a disk map `φ` normalised at `x0`.
struct DiskIntegrand<'a> {
    phi: &'a UnivalentMap,
    x0: f64,
    c1: f64,
    c2: f64,
    blend: Option<RingBlend>,
}

impl<'a> DiskIntegrand<'a> {
    const BLEND_RADIUS: f64 = 1e-3;

    fn new(phi: &'a UnivalentMap, params: &EllipticParams) -> Result<Self> {
        let x0 = params.x0;
        let q = 1.0 - x0.powi(4);
        let mut me = Self {
            phi,
            x0,
            c1: (1.0 + x0 * x0) * (2.0 * x0).sqrt() / q.sqrt(),
            c2: params.e_over_k_prime() * (1.0 + x0 * x0).powi(2) / (2.0 * x0 * q).sqrt(),
            blend: None,
        };
        let centre = Complex64::new(x0, 0.0);
        me.blend = Some(RingBlend::new(centre, Self::BLEND_RADIUS, |w| me.bracket_raw(w), None)?);
        Ok(me)
    }

    /// `S(w) = √((w²−x0²)/φ(w))` with `S(x0) = +√(2x0)`.
    fn s(&self, w: Complex64) -> Result<Complex64> {
        let x0 = self.x0;
        let r = |u: Complex64| (u - x0) / ((u + x0) * self.phi.value(u));
        let base = Complex64::new(1.0 / (2.0 * x0).sqrt(), 0.0);
        let root = BranchTracker::new(Complex64::new(x0, 0.0), base).continue_straight(r, w)?;
        Ok((w + x0) * root)
    }

    fn bracket_raw(&self, w: Complex64) -> Result<Complex64> {
        let x0 = self.x0;
        let (v, d1, _) = self.phi.jet(w);
        let term1 = d1 * self.s(w)? / v;
        let term2 = self.c1 * ((1.0 - x0 * w) / (1.0 + x0 * w)).sqrt() / (w - x0);
        let term3 = self.c2 / (1.0 - x0 * x0 * w * w).sqrt();
        Ok(term1 - term2 - term3)
    }

    fn bracket(&self, w: Complex64) -> Result<Complex64> {
        match &self.blend {
            Some(b) if b.covers(w) => Ok(b.eval(w)),
            _ => self.bracket_raw(w),
        }
    }

    fn density(&self, w: Complex64) -> Result<f64> {
        Ok(self.bracket(w)?.norm_sqr() / (w * w - self.x0 * self.x0).norm())
    }
}

/// Disk form of the area estimate for a map `φ` with `φ(x0) = 0`,
/// `φ'(x0) = 1` and a pole at `−x0`:
/// `∫_𝔻 |φ'S/φ − C1√((1−x0w)/(1+x0w))/(w−x0) − C2/√(1−x0²w²)|² dA/|w²−x0²|`
/// against `π(E'/K')(1+x0²)/(x0(1−x0²))`.
pub fn verify_area_disk(phi: &UnivalentMap, x0: f64, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let params = params_from_x0(x0)?;
    let at = Complex64::new(x0, 0.0);
    let (v, d1, _) = phi.jet(at);
    if v.norm() > 1e-8 || (d1 - 1.0).norm() > 1e-8 {
        return Err(Error::Domain(format!("{} is not normalised by φ(x0) = 0, φ'(x0) = 1", phi.name)));
    }
    let integrand = DiskIntegrand::new(phi, &params)?;
    let slot = ErrorSlot::new();
    let quad = QuadratureSpec {
        singular_points: vec![
            SingularPoint::inverse_distance(at),
            SingularPoint::inverse_distance(Complex64::new(-x0, 0.0)),
        ],
        ..spec.clone()
    };
    let r = integrate_disk(|w| slot.value(integrand.density(w)), &quad)?;
    slot.check()?;
    let rhs = PI * params.e_over_k_prime() * (1.0 + x0 * x0) / (x0 * (1.0 - x0 * x0));
    let inputs = ReportInputs {
        map: phi.name.clone(),
        x0: Some(x0),
        rel_tol: Some(spec.rel_tol),
        abs_tol: Some(spec.abs_tol),
        ..ReportInputs::default()
    };
    Ok(VerificationReport::new(InequalityId::AreaDisk, r.value, rhs, r.error, area_equality_tol(rhs, r.error), inputs))
}

/// Torus-coordinate form of the area estimate at the parameter of `ζ`:
/// `∫_{D_D} |Ψ_T|² dA ≤ πM²E'/(|b|²K')` with
/// `Ψ_T(z) = ±i·φ'(w)S(w)√(1−x0²w²)/(2φ(w)) − ∂Q_D(z)/b`, `w = σ(z)`,
/// and the sign fixed so the double poles at `z = 0` cancel.
pub fn verify_area_torus(psi: &UnivalentMap, zeta: Complex64, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let bridge = BridgeMaps::new(zeta)?;
    let params = bridge.params;
    let x0 = params.x0;
    let phi = bridge.phi_from_psi(psi)?;
    let disk = DiskIntegrand { phi: &phi, x0, c1: 0.0, c2: 0.0, blend: None };
    let green = GreenEvaluator::new(params);
    let b = green.b_const;

    let holomorphic_part = |z: Complex64| -> Result<Complex64> {
        let w = bridge.sigma(z)?;
        let (v, d1, _) = phi.jet(w);
        Ok(I * d1 * disk.s(w)? * (1.0 - x0 * x0 * w * w).sqrt() / (2.0 * v))
    };
    // pick the sign that cancels the double pole of ∂Q_D at the origin
    let probe = Complex64::new(0.05, 0.02);
    let t = holomorphic_part(probe)?;
    let d = green.dz_q_d(probe)? / b;
    let sign = if (t - d).norm() < (-t - d).norm() { 1.0 } else { -1.0 };
    let field = |z: Complex64| -> Result<Complex64> { Ok(sign * holomorphic_part(z)? - green.dz_q_d(z)? / b) };

    let origin = Complex64::new(0.0, 0.0);
    let blend = RingBlend::new(origin, 0.03, field, None)?;
    let slot = ErrorSlot::new();
    let quad = QuadratureSpec { singular_points: vec![SingularPoint::new(origin, 0.0)], ..spec.clone() };
    let r = integrate_rect(
        |x, y| {
            let z = Complex64::new(x, y);
            let v = if blend.covers(z) { Ok(blend.eval(z)) } else { field(z) };
            slot.value(v.map(|p| p.norm_sqr()))
        },
        green.geometry.rect_dd(),
        &quad,
    )?;
    slot.check()?;
    let rhs = green.scaled_kernel_norm();
    let inputs = ReportInputs {
        map: psi.name.clone(),
        zeta: Some(format_complex(zeta)),
        x0: Some(x0),
        rel_tol: Some(spec.rel_tol),
        abs_tol: Some(spec.abs_tol),
        ..ReportInputs::default()
    };
    Ok(VerificationReport::new(InequalityId::AreaTorus, r.value, rhs, r.error, area_equality_tol(rhs, r.error), inputs)
        .with_detail("sign", sign))
}

/// Goluzin's bound at `|z| > 1`, with `E, K` at modulus `1/|z|`:
///
/// ```text
/// |ψ''/ψ' + (4|z|²−2)/(z(|z|²−1)) − (4z̄/(|z|²−1))·E/K| ≤ (4|z|/(|z|²−1))(1 − E/K)
/// ```
///
/// The details carry the weaker `E'/K'` form, evaluated both with `E'/K'`
/// directly and through the Legendre relation.
pub fn goluzin_bound(psi: &UnivalentMap, z: Complex64) -> Result<VerificationReport> {
    if psi.class != MapClass::Sigma {
        return Err(Error::Domain(format!("{} is not a Σ map", psi.name)));
    }
    let p = EllipticParams::from_zeta_abs(z.norm())?;
    let a2 = z.norm_sqr();
    let e_over_k = p.e_over_k();
    let pre = psi.pre_schwarzian(z);
    let centre = (4.0 * a2 - 2.0) / (z * (a2 - 1.0)) - 4.0 * z.conj() / (a2 - 1.0) * e_over_k;
    let lhs = (pre + centre).norm();
    let rhs = 4.0 * z.norm() / (a2 - 1.0) * (1.0 - e_over_k);

    let weak = |ratio: f64| -> (f64, f64) {
        let l = (z * pre - 2.0 + 2.0 * (a2 - 2.0) / (a2 - 1.0) + 4.0 * ratio * a2 / (a2 - 1.0)).norm();
        (l, ratio * 4.0 * a2 / (a2 - 1.0))
    };
    let (weak_lhs, weak_rhs) = weak(p.e_over_k_prime());
    let (bridge_lhs, bridge_rhs) = weak(1.0 - e_over_k + PI / (2.0 * p.k * p.k_prime));

    let inputs = ReportInputs { map: psi.name.clone(), z: Some(format_complex(z)), ..ReportInputs::default() };
    Ok(VerificationReport::new(InequalityId::Goluzin, lhs, rhs, 0.0, POINTWISE_EQUALITY_TOL, inputs)
        .with_detail("weak_form_lhs", weak_lhs)
        .with_detail("weak_form_rhs", weak_rhs)
        .with_detail("weak_form_bridge_residual", (weak_lhs - bridge_lhs).abs().max((weak_rhs - bridge_rhs).abs())))
}

/// `|φ''/φ' − 2z̄/(1−|z|²)| ≤ 4/(1−|z|²)` for `φ ∈ S`, `|z| < 1`.
pub fn koebe_bieberbach_bound(phi: &UnivalentMap, z: Complex64) -> Result<VerificationReport> {
    if phi.class != MapClass::S {
        return Err(Error::Domain(format!("{} is not an S map", phi.name)));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("need |z| < 1, got {z}")));
    }
    let d = 1.0 - z.norm_sqr();
    let lhs = (phi.pre_schwarzian(z) - 2.0 * z.conj() / d).norm();
    let rhs = 4.0 / d;
    let inputs = ReportInputs { map: phi.name.clone(), z: Some(format_complex(z)), ..ReportInputs::default() };
    Ok(VerificationReport::new(InequalityId::KoebeBieberbach, lhs, rhs, 0.0, POINTWISE_EQUALITY_TOL, inputs))
}

/// Grönwall's area theorem `Σ n|b_n|² ≤ 1`, computed from the coefficients
/// and from `(1/π)∫_{|z|>1} |ψ'−1|² dA`. The routes must agree to `1e-6`.
pub fn gronwall_check(psi: &UnivalentMap, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let coefficient_route = gronwall_sum(psi, GRONWALL_TERMS)?;
    let quad = QuadratureSpec { singular_points: vec![], ..spec.clone() };
    let r = integrate_exterior_disk(|z| (psi.d1(z) - 1.0).norm_sqr() / PI, &quad)?;
    let gap = (r.value - coefficient_route).abs();
    if gap > 1e-6 {
        return Err(Error::NonConvergence { partial: r.value, error: gap });
    }
    let inputs = ReportInputs {
        map: psi.name.clone(),
        rel_tol: Some(spec.rel_tol),
        abs_tol: Some(spec.abs_tol),
        ..ReportInputs::default()
    };
    let error = r.error.max(gap);
    Ok(VerificationReport::new(InequalityId::Gronwall, coefficient_route, 1.0, error, 1e-6, inputs)
        .with_detail("integral_route", r.value)
        .with_detail("coefficient_route", coefficient_route))
}

/// `|Ψ(ζ, ζ)| ≤ (E'/K')·|ζ|/(|ζ|²−1)`.
pub fn pointwise_from_area(ev: &PsiEvaluator) -> VerificationReport {
    let lhs = ev.psi_at_diagonal().norm();
    let rhs = ev.pointwise_bound();
    VerificationReport::new(InequalityId::Pointwise, lhs, rhs, 0.0, POINTWISE_EQUALITY_TOL, ev.inputs(None))
}

/// The pointwise bound sharpened by a computed area ratio: Cauchy–Schwarz
/// gives `|Ψ(ζ, ζ)| ≤ √ratio · (E'/K')|ζ|/(|ζ|²−1)`.
pub fn pointwise_refined(ev: &PsiEvaluator, area: &VerificationReport) -> VerificationReport {
    let lhs = ev.psi_at_diagonal().norm();
    let scale = (area.ratio + area.error_estimate / area.rhs).sqrt();
    let rhs = scale * ev.pointwise_bound();
    let err = 0.5 * area.error_estimate / area.rhs * ev.pointwise_bound() / scale.max(1e-300);
    VerificationReport::new(InequalityId::Pointwise, lhs, rhs, err, POINTWISE_EQUALITY_TOL, ev.inputs(None))
        .with_detail("area_ratio", area.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::by_name;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn status_policy() {
        assert_eq!(Status::classify(1.0, 1.0, 0.0, 1e-10), Status::Equality);
        assert_eq!(Status::classify(0.5, 1.0, 0.0, 1e-10), Status::Holds);
        assert_eq!(Status::classify(1.1, 1.0, 0.0, 1e-10), Status::Violated);
        assert_eq!(Status::classify(1.1, 1.0, 0.2, 1e-10), Status::Holds);
    }

    #[test]
    fn diagonal_matches_limit() {
        for (name, zeta) in [("joukowski", c(2.0, 0.0)), ("b1:0.7", c(1.5, 0.5)), ("pole:0.5", c(1.8, -0.4))] {
            let ev = PsiEvaluator::new(&by_name(name).unwrap(), zeta).unwrap();
            let d = ev.psi_at_diagonal();
            let near = ev.psi_field_raw(zeta + c(3e-4, 2e-4)).unwrap();
            assert!((near - d).norm() < 1e-3, "{name}: {near} vs {d}");
            assert!((ev.psi_field(zeta).unwrap() - d).norm() < 1e-14, "{name}");
            let edge = zeta + Complex64::from_polar(0.9 * DIAGONAL_BLEND_RADIUS, 0.7);
            let (blended, raw) = (ev.psi_field(edge).unwrap(), ev.psi_field_raw(edge).unwrap());
            // both sides carry ~1e-8 of cancellation noise at this distance
            assert!((blended - raw).norm() < 1e-7, "{name}: {blended} vs {raw}");
        }
    }

    #[test]
    fn tracker_agrees_with_closed_form_root() {
        let psi = by_name("b1:0.7").unwrap();
        let zeta = c(1.3, 0.9);
        let ev = PsiEvaluator::new(&psi, zeta).unwrap();
        let a = |w: Complex64| ev.dpsi_zeta * (w - zeta) / (psi.value(w) - ev.psi_zeta);
        for z in [c(-1.5, 0.1), c(0.0, -3.0), c(10.0, 10.0)] {
            let tracked = BranchTracker::new(zeta, c(1.0, 0.0)).continue_to(a, z).unwrap();
            assert!((tracked - ev.sqrt_a(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn flipped_root_breaks_diagonal_limit() {
        let psi = by_name("joukowski").unwrap();
        let zeta = c(2.0, 0.0);
        let good = PsiEvaluator::new(&psi, zeta).unwrap();
        let bad = PsiEvaluator::with_sqrt_a_sign(&psi, zeta, -1.0).unwrap();
        let z = zeta + c(1e-3, 0.0);
        assert!((good.psi_field(z).unwrap() - good.psi_at_diagonal()).norm() < 1e-2);
        assert!((bad.psi_field(z).unwrap() - good.psi_at_diagonal()).norm() > 1.0);
        // the second and third terms do not depend on the branch of √A
        let far = c(-3.0, 1.0);
        let (v, d1, _) = psi.jet(far);
        let first = good.sqrt_a(far).unwrap() * d1 / (v - good.psi_zeta);
        let sum = good.psi_field(far).unwrap() + bad.psi_field(far).unwrap();
        assert!((sum - (2.0 * good.psi_field(far).unwrap() - 2.0 * first)).norm() < 1e-12);
    }

    #[test]
    fn joukowski_pointwise_equality() {
        for t in [1.2, 1.5, 2.0, 3.0] {
            let ev = PsiEvaluator::new(&by_name("joukowski").unwrap(), c(t, 0.0)).unwrap();
            let r = pointwise_from_area(&ev);
            assert!((r.ratio - 1.0).abs() < 1e-10);
            assert_eq!(r.status, Status::Equality);
        }
    }

    #[test]
    fn goluzin_joukowski_equality() {
        for t in [1.2, 1.5, 2.0, 3.0] {
            let r = goluzin_bound(&by_name("joukowski").unwrap(), c(t, 0.0)).unwrap();
            assert!((r.lhs - r.rhs).abs() < 1e-10 * r.rhs, "{t}");
            assert!(r.details["weak_form_bridge_residual"] < 1e-12);
        }
    }

    #[test]
    fn koebe_equality_on_reals() {
        let k = UnivalentMap::koebe();
        for t in [0.0, 0.3, 0.6, 0.9] {
            let r = koebe_bieberbach_bound(&k, c(t, 0.0)).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-10);
        }
        assert!((k.d2(c(0.0, 0.0)).norm() - 4.0).abs() < 1e-15);
        let id = koebe_bieberbach_bound(&UnivalentMap::disk_identity(), c(0.5, 0.0)).unwrap();
        assert!((id.lhs - 4.0 / 3.0).abs() < 1e-15 && (id.rhs - 16.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn identity_pointwise_is_strict() {
        let ev = PsiEvaluator::new(&by_name("identity").unwrap(), c(2.0, 0.0)).unwrap();
        let r = pointwise_from_area(&ev);
        assert_eq!(r.status, Status::Holds);
        assert_eq!(r.inequality.to_string(), "pointwise");
    }
}
