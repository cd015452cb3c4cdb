//! Quick invariant suite behind the `selftest` subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use goluzin_core::catalog::{by_name, catalog};
use goluzin_core::green::wirtinger_fd;
use goluzin_core::inequality::{
    gronwall_check, goluzin_bound, koebe_bieberbach_bound, pointwise_from_area, verify_area_disk, verify_area_sigma,
    verify_area_torus,
};
use goluzin_core::{
    params_from_x0, BridgeMaps, Complex64, GreenEvaluator, JacobiContext, MapClass, PsiEvaluator, QuadratureSpec,
    Status,
};

use crate::output::CheckResult;

type Check = fn(&QuadratureSpec) -> Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn elliptic_identities(_: &QuadratureSpec) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for i in 1..=19 {
        let p = params_from_x0(0.05 * i as f64).map_err(fail)?;
        let (a, b) = p.landen_residuals();
        worst = worst.max(p.legendre_residual()).max(a / p.k).max(b / p.k);
    }
    ensure(worst < 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn jacobi_identities(_: &QuadratureSpec) -> Result<String, String> {
    let p = params_from_x0(0.4).map_err(fail)?;
    let ctx = JacobiContext::kappa(p);
    let k = ctx.modulus_value();
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let z = c(ctx.quarter() * (0.19 * i as f64 - 0.9), ctx.quarter_prime() * (0.17 * j as f64 - 0.8));
            let (sn, cn, dn) = ctx.sn_cn_dn(z).map_err(fail)?;
            worst = worst.max((sn * sn + cn * cn - 1.0).norm()).max((dn * dn + k * k * sn * sn - 1.0).norm());
        }
    }
    ensure(worst < 1e-10, || format!("residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn shift_identities(_: &QuadratureSpec) -> Result<String, String> {
    let p = params_from_x0(0.6).map_err(fail)?;
    let r = JacobiContext::x0_squared(p).sn_shift_identities(c(0.3, 0.2)).map_err(fail)?;
    let worst = r.imaginary_shift.norm().max(r.real_shift.norm());
    ensure(worst < 1e-9, || format!("residual {worst:e}"))?;
    Ok(format!("residual {worst:.2e}"))
}

fn green_properties(_: &QuadratureSpec) -> Result<String, String> {
    let ev = GreenEvaluator::new(params_from_x0(0.5).map_err(fail)?);
    let (w1, w2) = ev.geometry.generators();
    let zeta = c(0.4, 0.1);
    let mut worst: f64 = 0.0;
    for z in [c(0.9, -0.2), c(-1.3, 0.3), c(2.0, 0.1)] {
        let g = ev.green_g(z, zeta).map_err(fail)?;
        for other in [ev.green_g(zeta, z), ev.green_g(z + w1, zeta), ev.green_g(z + w2, zeta)] {
            worst = worst.max((g - other.map_err(fail)?).abs());
        }
        worst = worst.max((g + ev.green_g(-z, zeta).map_err(fail)?).abs());
    }
    for t in [0.1, 0.5, 0.9] {
        worst = worst.max(ev.green_g(ev.geometry.gamma(true, t), zeta).map_err(fail)?.abs());
    }
    ensure(worst < 1e-10, || format!("residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn q_d_derivatives(_: &QuadratureSpec) -> Result<String, String> {
    let ev = GreenEvaluator::new(params_from_x0(0.45).map_err(fail)?);
    let p = *ev.params();
    let mut worst: f64 = 0.0;
    for z in [c(0.7, 0.4), c(-1.2, -0.3), c(1.9, 0.6)] {
        let (d, db) = wirtinger_fd(|w| ev.q_d(w), z, 1e-5 * p.quarter_l).map_err(fail)?;
        worst = worst
            .max((d - ev.dz_q_d(z).map_err(fail)?).norm())
            .max((db - ev.dzbar_q_d(z).map_err(fail)?).norm());
    }
    let origin = (ev.dzbar_q_d(c(0.0, 0.0)).map_err(fail)?.re + p.m * p.m * p.e_prime / p.k_prime).abs();
    ensure(worst < 1e-6 && origin < 1e-10, || format!("fd {worst:e}, origin {origin:e}"))?;
    Ok(format!("fd {worst:.2e}, origin {origin:.2e}"))
}

fn kernel_norm(spec: &QuadratureSpec) -> Result<String, String> {
    let ev = GreenEvaluator::new(params_from_x0(0.5).map_err(fail)?);
    let r = ev.kernel_norm_integral(spec).map_err(fail)?;
    let rel = (r.value / ev.kernel_norm_closed_form() - 1.0).abs();
    ensure(rel < 1e-6, || format!("relative {rel:e}"))?;
    Ok(format!("relative {rel:.2e}"))
}

fn landen_sn_sq(_: &QuadratureSpec) -> Result<String, String> {
    let bridge = BridgeMaps::new(c(2.0, 0.0)).map_err(fail)?;
    let p = bridge.params;
    let ctx = JacobiContext::kappa(p);
    let mut worst: f64 = 0.0;
    for w in [c(0.5, 0.5), c(-1.0, 0.3), c(2.0, -1.0), c(0.1, -0.2)] {
        let sn = ctx.sn(p.m * bridge.tau(w).map_err(fail)?).map_err(fail)?;
        let expected = (1.0 + p.x0 * p.x0) * (w - p.x0) / (2.0 * p.x0 * (p.x0 * w - 1.0));
        worst = worst.max((sn * sn - expected).norm());
    }
    ensure(worst < 1e-8, || format!("residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn pointwise_bounds(_: &QuadratureSpec) -> Result<String, String> {
    let jouk = by_name("joukowski").map_err(fail)?;
    for t in [1.2, 1.5, 2.0, 3.0] {
        let r = goluzin_bound(&jouk, c(t, 0.0)).map_err(fail)?;
        ensure(r.status == Status::Equality, || format!("joukowski at {t}: {}", r.ratio))?;
    }
    let id = by_name("identity").map_err(fail)?;
    let r = goluzin_bound(&id, c(2.0, 0.0)).map_err(fail)?;
    ensure(r.status == Status::Holds, || format!("identity at 2: {}", r.ratio))?;
    let koebe = by_name("koebe").map_err(fail)?;
    for t in [0.0, 0.3, 0.6, 0.9] {
        let r = koebe_bieberbach_bound(&koebe, c(t, 0.0)).map_err(fail)?;
        ensure(r.status == Status::Equality, || format!("koebe at {t}: {}", r.ratio))?;
    }
    let mut pairs = 0;
    for m in catalog().into_iter().filter(|m| m.class == MapClass::Sigma) {
        for zeta in [c(1.25, 0.0), c(0.0, 2.0), Complex64::from_polar(3.0, PI / 4.0)] {
            let r = pointwise_from_area(&PsiEvaluator::new(&m, zeta).map_err(fail)?);
            ensure(r.status != Status::Violated, || format!("{} at {zeta}", m.name))?;
            pairs += 1;
        }
    }
    Ok(format!("goluzin, koebe and {pairs} diagonal checks"))
}

fn gronwall(spec: &QuadratureSpec) -> Result<String, String> {
    let mut gap: f64 = 0.0;
    for name in ["joukowski", "b1:0.7", "pole:0.5"] {
        let r = gronwall_check(&by_name(name).map_err(fail)?, spec).map_err(fail)?;
        gap = gap.max((r.details["integral_route"] - r.details["coefficient_route"]).abs());
    }
    Ok(format!("route gap {gap:.2e}"))
}

fn area_equality(spec: &QuadratureSpec) -> Result<String, String> {
    let full = verify_area_sigma(&by_name("joukowski").map_err(fail)?, c(2.0, 0.0), spec).map_err(fail)?;
    ensure(full.status == Status::Equality, || format!("joukowski ratio {}", full.ratio))?;
    let id = verify_area_sigma(&by_name("identity").map_err(fail)?, c(2.0, 0.0), spec).map_err(fail)?;
    ensure(id.ratio < 1.0 - 3.0 * id.error_estimate / id.rhs, || format!("identity ratio {}", id.ratio))?;
    Ok(format!("joukowski {:.6}, identity {:.6}", full.ratio, id.ratio))
}

fn coordinate_forms(spec: &QuadratureSpec) -> Result<String, String> {
    let psi = by_name("b1:0.7").map_err(fail)?;
    let zeta = c(1.5, 0.5);
    let sigma = verify_area_sigma(&psi, zeta, spec).map_err(fail)?;
    let bridge = BridgeMaps::new(zeta).map_err(fail)?;
    let phi = bridge.phi_from_psi(&psi).map_err(fail)?;
    let disk = verify_area_disk(&phi, bridge.x0(), spec).map_err(fail)?;
    let torus = verify_area_torus(&psi, zeta, spec).map_err(fail)?;
    let gap = (sigma.ratio - disk.ratio).abs().max((sigma.ratio - torus.ratio).abs());
    ensure(gap < 1e-3, || format!("ratios {} {} {}", sigma.ratio, disk.ratio, torus.ratio))?;
    Ok(format!("ratio {:.6}, largest gap {gap:.2e}", sigma.ratio))
}

const CHECKS: [(&str, Check); 11] = [
    ("elliptic identities", elliptic_identities),
    ("jacobi identities", jacobi_identities),
    ("sn shift identities", shift_identities),
    ("green function", green_properties),
    ("Q_D derivatives", q_d_derivatives),
    ("kernel norm", kernel_norm),
    ("Landen sn² identity", landen_sn_sq),
    ("pointwise bounds", pointwise_bounds),
    ("gronwall", gronwall),
    ("area equality", area_equality),
    ("coordinate forms agree", coordinate_forms),
];

pub fn run_all(spec: &QuadratureSpec) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let outcome = check(spec);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            log::info!("selftest {name}: {}", if passed { "pass" } else { "fail" });
            CheckResult { check: name.to_string(), passed, detail, seconds }
        })
        .collect()
}
