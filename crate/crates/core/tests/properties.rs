use std::f64::consts::PI;

use proptest::prelude::*;

use goluzin_core::catalog::{by_name, format_complex, parse_complex};
use goluzin_core::inequality::{goluzin_bound, koebe_bieberbach_bound, pointwise_from_area};
use goluzin_core::quadrature::integrate_rect;
use goluzin_core::{
    params_from_x0, x0_from_zeta_abs, BranchTracker, BridgeMaps, Complex64, JacobiContext, PsiEvaluator,
    QuadratureSpec, Rect, Status, UnivalentMap,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exterior_point() -> impl Strategy<Value = Complex64> {
    (1.05f64..6.0, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeta_abs_round_trip(a in 1.01f64..20.0) {
        let x0 = x0_from_zeta_abs(a).unwrap();
        let p = params_from_x0(x0).unwrap();
        prop_assert!((p.zeta_abs - a).abs() < 1e-12 * a);
        prop_assert!((p.kappa - 1.0 / a).abs() < 1e-14);
        prop_assert!(p.e < p.k);
    }

    #[test]
    fn sn_cn_dn_identities(x0 in 0.1f64..0.9, s in 0.0f64..1.0, t in -0.9f64..0.9) {
        let p = params_from_x0(x0).unwrap();
        for ctx in [JacobiContext::kappa(p), JacobiContext::x0_squared(p)] {
            let k = ctx.modulus_value();
            let z = c((2.0 * s - 1.0) * ctx.quarter(), t * ctx.quarter_prime());
            let (sn, cn, dn) = ctx.sn_cn_dn(z).unwrap();
            prop_assert!((sn * sn + cn * cn - 1.0).norm() < 1e-10);
            prop_assert!((dn * dn + k * k * sn * sn - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn landen_routes_agree(x0 in 0.15f64..0.85, s in -0.9f64..0.9, t in -0.4f64..0.4) {
        let p = params_from_x0(x0).unwrap();
        let ctx = JacobiContext::kappa(p);
        let z = c(s * 2.0 * p.quarter_l, t * p.quarter_l_prime);
        let direct = ctx.sn(p.m * z).unwrap();
        let landen = ctx.landen_sn_sq(z).unwrap();
        prop_assert!((direct * direct - landen).norm() < 1e-9 * landen.norm().max(1.0));
    }

    #[test]
    fn eta_round_trip(zeta in exterior_point(), z in exterior_point()) {
        let b = BridgeMaps::new(zeta).unwrap();
        let w = b.eta(z).unwrap();
        prop_assert!(w.norm() < 1.0);
        prop_assert!((b.eta_inv(w).unwrap() - z).norm() < 1e-12 * z.norm());
    }

    #[test]
    fn sqrt_continuation_squares_back(rows in 1usize..8, cols in 1usize..8, zeta in exterior_point()) {
        let args: Vec<Complex64> = (0..rows * cols)
            .map(|k| {
                let z = zeta * (1.0 + 0.1 * (k / cols) as f64) + c(0.05 * (k % cols) as f64, 0.0);
                1.0 - 1.0 / (zeta.conj() * z)
            })
            .collect();
        let base = args[0].sqrt();
        let out = BranchTracker::new(zeta, base).sqrt_continued(&args, rows, cols).unwrap();
        for (g, a) in out.iter().zip(&args) {
            prop_assert!((g * g - a).norm() < 1e-12);
            // the argument stays in |u − 1| < 1, so continuation is the principal root
            prop_assert!((g - a.sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_literals_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = c(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn goluzin_bound_holds(b_abs in 0.0f64..1.0, b_arg in -PI..PI, z in exterior_point()) {
        let psi = UnivalentMap::laurent("b1", Complex64::from_polar(b_abs, b_arg)).unwrap();
        let r = goluzin_bound(&psi, z).unwrap();
        prop_assert!(r.status != Status::Violated, "{} > {}", r.lhs, r.rhs);
    }

    #[test]
    fn pointwise_bound_holds(b_abs in 0.0f64..1.0, b_arg in -PI..PI, zeta in exterior_point()) {
        let psi = UnivalentMap::laurent("b1", Complex64::from_polar(b_abs, b_arg)).unwrap();
        let r = pointwise_from_area(&PsiEvaluator::new(&psi, zeta).unwrap());
        prop_assert!(r.status != Status::Violated, "{} > {}", r.lhs, r.rhs);
    }

    #[test]
    fn koebe_bieberbach_holds(r in 0.0f64..0.95, t in -PI..PI) {
        let koebe = by_name("koebe").unwrap();
        let rep = koebe_bieberbach_bound(&koebe, Complex64::from_polar(r, t)).unwrap();
        prop_assert!(rep.status != Status::Violated);
    }

    #[test]
    fn quadrature_is_deterministic_and_exact(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0);
        let f = |x: f64, y: f64| a * x.powi(5) * y.powi(3) + b * x * y + 1.0;
        let spec = QuadratureSpec::default();
        let first = integrate_rect(f, rect, &spec).unwrap();
        let second = integrate_rect(f, rect, &spec).unwrap();
        prop_assert_eq!(first.value.to_bits(), second.value.to_bits());
        prop_assert!((first.value - (a / 24.0 + b / 4.0 + 1.0)).abs() < 1e-13);
    }
}

#[test]
fn tighter_tolerance_never_raises_error_estimate() {
    let rect = Rect::new(-1.0, 1.0, -1.0, 1.0);
    let f = |x: f64, y: f64| 1.0 / (x * x + y * y).sqrt();
    let spec = QuadratureSpec::default()
        .with_singular_points(vec![goluzin_core::SingularPoint::inverse_distance(c(0.0, 0.0))]);
    let mut last = f64::INFINITY;
    for rel in [1e-4, 5e-5, 2.5e-5, 1.25e-5] {
        let r = integrate_rect(f, rect, &QuadratureSpec { rel_tol: rel, ..spec.clone() }).unwrap();
        assert!(r.error <= last, "rel_tol {rel}: {} > {last}", r.error);
        last = r.error;
    }
}
