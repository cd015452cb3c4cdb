//! Closed-form univalent maps used as test inputs.
//!
//! Class `Σ` maps live on the exterior disk with `ψ(z) = z + b0 + b1/z + …`;
//! class `S` maps live on the unit disk with `φ(0) = 0`, `φ'(0) = 1`. A third
//! tag, [`MapClass::Disk`], marks maps produced by
//! [`crate::maps::BridgeMaps::phi_from_psi`], which are univalent on the unit
//! disk but normalised at `x0` instead of the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Radius of the circle used to extract Laurent coefficients.
pub const CONTOUR_RADIUS: f64 = 2.0;
/// Number of trapezoidal nodes on that circle.
pub const CONTOUR_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapClass {
    Sigma,
    S,
    Disk,
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapClass::Sigma => "sigma",
            MapClass::S => "s",
            MapClass::Disk => "disk",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `z + b/z`
    Laurent { b: Complex64 },
    /// `z²/(z + c)`
    PoleShift { c: Complex64 },
    /// `z/(1 − z)²`
    Koebe,
    /// `z` on the unit disk
    DiskIdentity,
    /// `F·(ψ(η⁻¹(w)) − ψ(ζ))` with `η⁻¹(w) = u(1 + x0w)/(w + x0)`
    Transported {
        psi: Box<UnivalentMap>,
        unit: Complex64,
        x0: f64,
        factor: Complex64,
        psi_zeta: Complex64,
    },
}

/// A univalent map with exact first and second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivalentMap {
    pub name: String,
    pub class: MapClass,
    /// Whether the complement of the image has zero area.
    pub full_mapping: bool,
    /// `b0, b1, …` for `Σ`, `a1, a2, …` for `S`, when known in closed form.
    pub coefficients: Option<Vec<Complex64>>,
    kind: Kind,
}

impl UnivalentMap {
    /// `ψ(z) = z + b/z`, univalent on `|z| > 1` for `|b| ≤ 1`.
    pub fn laurent(name: impl Into<String>, b: Complex64) -> Result<Self> {
        if !(b.norm() <= 1.0 + 1e-15) {
            return Err(Error::Domain(format!("z + b/z is univalent on |z|>1 only for |b| ≤ 1, got {b}")));
        }
        Ok(Self {
            name: name.into(),
            class: MapClass::Sigma,
            full_mapping: (b.norm() - 1.0).abs() < 1e-15,
            coefficients: Some(vec![Complex64::new(0.0, 0.0), b]),
            kind: Kind::Laurent { b },
        })
    }

    /// `ψ(z) = z²/(z + c)`, univalent on `|z| > 1` for `|c| ≤ 1/2`.
    ///
    /// Its Laurent series is infinite, so coefficients are left to contour
    /// extraction.
    pub fn pole_shift(name: impl Into<String>, c: Complex64) -> Result<Self> {
        if !(c.norm() <= 0.5 + 1e-15) {
            return Err(Error::Domain(format!("z²/(z+c) is only registered for |c| ≤ 1/2, got {c}")));
        }
        Ok(Self {
            name: name.into(),
            class: MapClass::Sigma,
            full_mapping: false,
            coefficients: None,
            kind: Kind::PoleShift { c },
        })
    }

    pub fn koebe() -> Self {
        Self {
            name: "koebe".into(),
            class: MapClass::S,
            full_mapping: true,
            coefficients: Some((1..=16).map(|n| Complex64::new(n as f64, 0.0)).collect()),
            kind: Kind::Koebe,
        }
    }

    pub fn disk_identity() -> Self {
        Self {
            name: "disk-identity".into(),
            class: MapClass::S,
            full_mapping: false,
            coefficients: Some(vec![ONE]),
            kind: Kind::DiskIdentity,
        }
    }

    pub(crate) fn transported(
        psi: &UnivalentMap,
        unit: Complex64,
        x0: f64,
        factor: Complex64,
        psi_zeta: Complex64,
    ) -> Self {
        Self {
            name: format!("phi[{}]", psi.name),
            class: MapClass::Disk,
            full_mapping: psi.full_mapping,
            coefficients: None,
            kind: Kind::Transported { psi: Box::new(psi.clone()), unit, x0, factor, psi_zeta },
        }
    }

    /// The coefficient `b` when the map is `z + b/z`.
    pub fn laurent_b(&self) -> Option<Complex64> {
        match self.kind {
            Kind::Laurent { b } => Some(b),
            _ => None,
        }
    }

    /// `(f, f', f'')` at `z`. Non-finite values mark poles.
    pub fn jet(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        match &self.kind {
            Kind::Laurent { b } => {
                let inv = 1.0 / z;
                let inv2 = inv * inv;
                (z + b * inv, ONE - b * inv2, 2.0 * b * inv2 * inv)
            }
            Kind::PoleShift { c } => {
                // z²/(z+c) = z − c + c²/(z+c)
                let u = 1.0 / (z + c);
                let c2 = c * c;
                (z - c + c2 * u, ONE - c2 * u * u, 2.0 * c2 * u * u * u)
            }
            Kind::Koebe => {
                let d = 1.0 / (ONE - z);
                let d2 = d * d;
                (z * d2, (ONE + z) * d2 * d, (4.0 + 2.0 * z) * d2 * d2)
            }
            Kind::DiskIdentity => (z, ONE, Complex64::new(0.0, 0.0)),
            Kind::Transported { psi, unit, x0, factor, psi_zeta } => {
                let den = 1.0 / (z + x0);
                let zeta_z = unit * (1.0 + x0 * z) * den;
                let d1 = unit * (x0 * x0 - 1.0) * den * den;
                let d2 = -2.0 * d1 * den;
                let (v, p1, p2) = psi.jet(zeta_z);
                (factor * (v - psi_zeta), factor * p1 * d1, factor * (p2 * d1 * d1 + p1 * d2))
            }
        }
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.jet(z).0
    }

    pub fn d1(&self, z: Complex64) -> Complex64 {
        self.jet(z).1
    }

    pub fn d2(&self, z: Complex64) -> Complex64 {
        self.jet(z).2
    }

    /// `f''/f'`, the pre-Schwarzian.
    pub fn pre_schwarzian(&self, z: Complex64) -> Complex64 {
        let (_, d1, d2) = self.jet(z);
        d2 / d1
    }

    /// Laurent coefficients `b0..=b_{n_max}` of a `Σ` map, closed form when
    /// available and otherwise by the trapezoidal rule on `|z| = 2`.
    pub fn laurent_coefficients(&self, n_max: usize) -> Result<Vec<Complex64>> {
        if self.class != MapClass::Sigma {
            return Err(Error::Domain(format!("{} is not a Σ map", self.name)));
        }
        if let Some(c) = &self.coefficients {
            let mut out = c.clone();
            out.resize(n_max + 1, Complex64::new(0.0, 0.0));
            return Ok(out);
        }
        let r = CONTOUR_RADIUS;
        let samples: Vec<Complex64> = (0..CONTOUR_NODES)
            .map(|j| {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / CONTOUR_NODES as f64);
                self.value(z) - z
            })
            .collect();
        let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        Ok((0..=n_max)
            .map(|n| {
                let sum: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, s)| s * Complex64::from_polar(1.0, 2.0 * PI * (n * j) as f64 / CONTOUR_NODES as f64))
                    .sum();
                let b = sum * r.powi(n as i32) / CONTOUR_NODES as f64;
                // rounding in the samples is amplified by rⁿ; anything below that is noise
                let noise = 64.0 * f64::EPSILON * scale * r.powi(n as i32);
                if b.norm() <= noise {
                    Complex64::new(0.0, 0.0)
                } else {
                    b
                }
            })
            .collect())
    }
}

/// `Σ n|b_n|²` over `1 ≤ n ≤ n_max`.
///
/// Fails with a non-convergence signal when the extracted coefficients have
/// not decayed by `n_max`.
pub fn gronwall_sum(map: &UnivalentMap, n_max: usize) -> Result<f64> {
    let b = map.laurent_coefficients(n_max)?;
    let terms: Vec<f64> = b.iter().enumerate().skip(1).map(|(n, c)| n as f64 * c.norm_sqr()).collect();
    let sum: f64 = terms.iter().sum();
    if map.coefficients.is_none() {
        let tail: f64 = terms.iter().rev().take(3).sum();
        if tail > 1e-10 * sum.max(1.0) {
            return Err(Error::NonConvergence { partial: sum, error: tail });
        }
    }
    Ok(sum)
}

/// Formats `z` as `a+bi`, the literal form accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i` and `polar:r@θ`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim().replace(' ', "");
    if let Some(rest) = t.strip_prefix("polar:") {
        let (r, a) = rest
            .split_once('@')
            .ok_or_else(|| Error::Domain(format!("expected polar:r@theta, got `{s}`")))?;
        let r: f64 = r.parse().map_err(|_| Error::Domain(format!("bad modulus in `{s}`")))?;
        let a: f64 = a.parse().map_err(|_| Error::Domain(format!("bad angle in `{s}`")))?;
        return Ok(Complex64::from_polar(r, a));
    }
    let bad = || Error::Domain(format!("cannot parse complex number `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(body) = t.strip_suffix(['i', 'j']) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| bad())?,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad())
}

/// The built-in test maps.
pub fn catalog() -> Vec<UnivalentMap> {
    let laurent = |name: &str, b: Complex64| UnivalentMap::laurent(name, b).expect("catalog entry");
    vec![
        laurent("identity", Complex64::new(0.0, 0.0)),
        laurent("joukowski", ONE),
        laurent("joukowski-rot60", Complex64::from_polar(1.0, PI / 3.0)),
        laurent("joukowski-rot90", Complex64::new(0.0, 1.0)),
        laurent("b1:0.3", Complex64::new(0.3, 0.0)),
        laurent("b1:0.7", Complex64::new(0.7, 0.0)),
        UnivalentMap::pole_shift("pole:0.5", Complex64::new(0.5, 0.0)).expect("catalog entry"),
        UnivalentMap::koebe(),
        UnivalentMap::disk_identity(),
    ]
}

/// Looks a map up by name; `b1:<complex>` and `pole:<complex>` build new ones.
pub fn by_name(name: &str) -> Result<UnivalentMap> {
    if let Some(m) = catalog().into_iter().find(|m| m.name == name) {
        return Ok(m);
    }
    let unknown = || Error::UnknownMap(name.to_string());
    if let Some(arg) = name.strip_prefix("b1:") {
        let b = parse_complex(arg).map_err(|_| unknown())?;
        return UnivalentMap::laurent(name, b);
    }
    if let Some(arg) = name.strip_prefix("pole:") {
        let c = parse_complex(arg).map_err(|_| unknown())?;
        return UnivalentMap::pole_shift(name, c);
    }
    Err(unknown())
}

impl FromStr for UnivalentMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        by_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn catalog_contents() {
        let names: Vec<String> = catalog().into_iter().map(|m| m.name).collect();
        for n in ["identity", "joukowski", "joukowski-rot60", "joukowski-rot90", "b1:0.3", "b1:0.7", "koebe", "disk-identity"] {
            assert!(names.iter().any(|m| m == n), "{n}");
        }
        assert!(by_name("joukowski").unwrap().full_mapping);
        assert!(!by_name("identity").unwrap().full_mapping);
        assert!(!by_name("b1:0.7").unwrap().full_mapping);
        assert!(by_name("koebe").unwrap().full_mapping);
    }

    #[test]
    fn closed_form_gronwall_sums() {
        assert!((gronwall_sum(&by_name("b1:0.7").unwrap(), 20).unwrap() - 0.49).abs() < 1e-15);
        assert!((gronwall_sum(&by_name("joukowski").unwrap(), 20).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gronwall_sum(&by_name("identity").unwrap(), 20).unwrap(), 0.0);
    }

    #[test]
    fn contour_extraction_matches_series() {
        // z²/(z+c) has Σ n|b_n|² = |c|⁴/(1−|c|²)²
        let m = by_name("pole:0.5").unwrap();
        let s = gronwall_sum(&m, 40).unwrap();
        assert!((s - 1.0 / 9.0).abs() < 1e-10, "{s}");
        let b = m.laurent_coefficients(3).unwrap();
        assert!((b[0] + 0.5).norm() < 1e-13);
        assert!((b[1] - 0.25).norm() < 1e-13);
        assert!((b[2] + 0.125).norm() < 1e-13);
    }

    #[test]
    fn koebe_pre_schwarzian() {
        let k = UnivalentMap::koebe();
        for z in [c(0.3, 0.1), c(-0.5, 0.4), c(0.0, -0.7)] {
            let expected = (4.0 + 2.0 * z) / (1.0 - z * z);
            assert!((k.pre_schwarzian(z) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn by_name_errors() {
        assert!(matches!(by_name("nope"), Err(Error::UnknownMap(_))));
        assert!(matches!(by_name("b1:zz"), Err(Error::UnknownMap(_))));
        assert!(matches!(by_name("b1:1.5"), Err(Error::Domain(_))));
        let m = by_name("b1:0.2+0.1i").unwrap();
        assert_eq!(m.coefficients.unwrap()[1], c(0.2, 0.1));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5+0.5i").unwrap(), c(1.5, 0.5));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2e+1i").unwrap(), c(1e-3, -20.0));
        assert_eq!(parse_complex(" 3 - 4i ").unwrap(), c(3.0, -4.0));
        assert!((parse_complex("polar:2@0").unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!(parse_complex("abc").is_err());
        for z in [c(1.5, 0.5), c(-0.1, -3e-20), c(2.0, 0.0), c(1.0 / 3.0, -2.0 / 7.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }
}
