use std::time::Instant;

use goluzin_core::catalog::{catalog, format_complex};
use goluzin_core::inequality::{
    gronwall_check, goluzin_bound, koebe_bieberbach_bound, pointwise_from_area, verify_area_disk, verify_area_sigma,
    verify_area_torus, VerificationReport,
};
use goluzin_core::{
    BridgeMaps, Complex64, EllipticParams, GreenEvaluator, MapClass, PsiEvaluator, QuadratureSpec, UnivalentMap,
};
use log::info;
use rayon::prelude::*;

use crate::config::{AreaArgs, AreaForm, Command, GronwallArgs, ParamsArgs, PointwiseArgs, RunConfig, SweepArgs};
use crate::error::CliError;
use crate::output::{Output, ParamsReport};
use crate::selftest;

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    if !(config.rel_tol > 0.0 && config.abs_tol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    let spec = QuadratureSpec::with_tolerances(config.rel_tol, config.abs_tol);
    match &config.command {
        Command::Params(args) => params(args),
        Command::Pointwise(args) => pointwise(args).map(Output::Reports),
        Command::Area(args) => area(args, &spec).map(Output::Reports),
        Command::Gronwall(args) => gronwall(args, &spec).map(Output::Reports),
        Command::Sweep(args) => sweep(args, &spec).map(Output::Reports),
        Command::Selftest => Ok(Output::Checks(selftest::run_all(&spec))),
    }
}

fn require_sigma(map: &UnivalentMap) -> Result<(), CliError> {
    if map.class != MapClass::Sigma {
        return Err(CliError::Usage(format!("`{}` is not a map of the exterior disk", map.name)));
    }
    Ok(())
}

fn params(args: &ParamsArgs) -> Result<Output, CliError> {
    let zeta_abs = match (args.zeta_abs, args.zeta) {
        (Some(a), _) => a,
        (None, Some(z)) => z.norm(),
        (None, None) => return Err(CliError::Usage("params needs --zeta-abs or --zeta".into())),
    };
    let params = EllipticParams::from_zeta_abs(zeta_abs)?;
    let green = GreenEvaluator::new(params);
    let (a, b) = params.landen_residuals();
    Ok(Output::Params(ParamsReport {
        params,
        legendre_residual: params.legendre_residual(),
        landen_residuals: [a, b],
        b_const: format_complex(green.b_const),
        kernel_norm: green.kernel_norm_closed_form(),
        scaled_kernel_norm: green.scaled_kernel_norm(),
    }))
}

fn pointwise(args: &PointwiseArgs) -> Result<Vec<VerificationReport>, CliError> {
    let map = &args.map;
    if map.class == MapClass::Sigma {
        if args.zeta.is_none() && args.z.is_none() {
            return Err(CliError::Usage("pointwise needs --zeta or --z".into()));
        }
        let mut out = Vec::new();
        if let Some(z) = args.z {
            out.push(goluzin_bound(map, z)?);
        }
        if let Some(zeta) = args.zeta {
            out.push(pointwise_from_area(&PsiEvaluator::new(map, zeta)?));
        }
        Ok(out)
    } else {
        let z = args.z.ok_or_else(|| CliError::Usage(format!("`{}` is a disk map; pass --z with |z| < 1", map.name)))?;
        if args.zeta.is_some() {
            return Err(CliError::Usage("--zeta applies to exterior-disk maps only".into()));
        }
        Ok(vec![koebe_bieberbach_bound(map, z)?])
    }
}

fn area(args: &AreaArgs, spec: &QuadratureSpec) -> Result<Vec<VerificationReport>, CliError> {
    require_sigma(&args.map)?;
    let (psi, zeta) = (&args.map, args.zeta);
    let forms: &[AreaForm] = match args.form {
        AreaForm::All => &[AreaForm::Sigma, AreaForm::Disk, AreaForm::Torus],
        ref f => std::slice::from_ref(f),
    };
    forms
        .iter()
        .map(|form| {
            let start = Instant::now();
            let report = match form {
                AreaForm::Sigma => verify_area_sigma(psi, zeta, spec)?,
                AreaForm::Disk => {
                    let bridge = BridgeMaps::new(zeta)?;
                    verify_area_disk(&bridge.phi_from_psi(psi)?, bridge.x0(), spec)?
                }
                AreaForm::Torus => verify_area_torus(psi, zeta, spec)?,
                AreaForm::All => unreachable!("expanded above"),
            };
            info!("{} for {} at {}: {:.2?}", report.inequality, psi.name, format_complex(zeta), start.elapsed());
            Ok(report)
        })
        .collect()
}

fn gronwall(args: &GronwallArgs, spec: &QuadratureSpec) -> Result<Vec<VerificationReport>, CliError> {
    require_sigma(&args.map)?;
    Ok(vec![gronwall_check(&args.map, spec)?])
}

fn sweep(args: &SweepArgs, spec: &QuadratureSpec) -> Result<Vec<VerificationReport>, CliError> {
    let maps: Vec<UnivalentMap> = if args.maps.is_empty() {
        catalog().into_iter().filter(|m| m.class == MapClass::Sigma).collect()
    } else {
        for m in &args.maps {
            require_sigma(m)?;
        }
        args.maps.clone()
    };
    let mut jobs = Vec::new();
    for m in &maps {
        for &a in &args.zeta_abs {
            if a.is_nan() || a <= 1.0 {
                return Err(CliError::Usage(format!("--zeta-abs must exceed 1, got {a}")));
            }
            for &t in &args.zeta_arg {
                jobs.push((m, Complex64::from_polar(a, t)));
            }
        }
    }
    info!("sweep over {} (map, ζ) pairs", jobs.len());
    let results: Vec<Result<[VerificationReport; 2], CliError>> = jobs
        .par_iter()
        .map(|(m, zeta)| {
            let area = verify_area_sigma(m, *zeta, spec)?;
            let point = pointwise_from_area(&PsiEvaluator::new(m, *zeta)?);
            Ok([area, point])
        })
        .collect();
    let mut out = Vec::with_capacity(2 * results.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
