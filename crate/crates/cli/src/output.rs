use std::io::Write;

use goluzin_core::inequality::VerificationReport;
use goluzin_core::EllipticParams;
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// Fixed column order of report CSV files.
pub const REPORT_COLUMNS: [&str; 10] =
    ["inequality", "map", "zeta", "z", "x0", "lhs", "rhs", "ratio", "error_estimate", "status"];

/// Parameter pack plus the identities it should satisfy.
#[derive(Debug, Serialize)]
pub struct ParamsReport {
    #[serde(flatten)]
    pub params: EllipticParams,
    pub legendre_residual: f64,
    pub landen_residuals: [f64; 2],
    pub b_const: String,
    pub kernel_norm: f64,
    pub scaled_kernel_norm: f64,
}

/// Outcome of one self-test check.
#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug)]
pub enum Output {
    Params(ParamsReport),
    Reports(Vec<VerificationReport>),
    Checks(Vec<CheckResult>),
}

impl Output {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Json => self.write_json(out),
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        match self {
            Output::Params(p) => serde_json::to_writer_pretty(&mut *out, p)?,
            Output::Reports(r) => serde_json::to_writer_pretty(&mut *out, r)?,
            Output::Checks(c) => serde_json::to_writer_pretty(&mut *out, c)?,
        }
        writeln!(out)?;
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        match self {
            Output::Params(p) => {
                w.write_record(["key", "value"])?;
                for (k, v) in params_rows(p) {
                    w.write_record([k, v.as_str()])?;
                }
            }
            Output::Reports(reports) => {
                w.write_record(REPORT_COLUMNS)?;
                for r in reports {
                    w.write_record(report_row(r))?;
                }
            }
            Output::Checks(checks) => {
                w.write_record(["check", "passed", "detail", "seconds"])?;
                for c in checks {
                    w.write_record([c.check.clone(), c.passed.to_string(), c.detail.clone(), c.seconds.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    fn write_text(&self, out: &mut dyn Write) -> Result<(), CliError> {
        match self {
            Output::Params(p) => {
                for (k, v) in params_rows(p) {
                    writeln!(out, "{k:<20} {v}")?;
                }
            }
            Output::Reports(reports) => {
                for r in reports {
                    let at = r.inputs.zeta.as_deref().or(r.inputs.z.as_deref()).unwrap_or("-");
                    writeln!(
                        out,
                        "{:<17} {:<16} at {:<24} lhs {:<22} rhs {:<22} ratio {:<20} err {:<10.3e} {}",
                        r.inequality.to_string(),
                        r.inputs.map,
                        at,
                        r.lhs,
                        r.rhs,
                        r.ratio,
                        r.error_estimate,
                        r.status
                    )?;
                }
            }
            Output::Checks(checks) => {
                for c in checks {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{mark}  {:<28} {} ({:.3} s)", c.check, c.detail, c.seconds)?;
                }
            }
        }
        Ok(())
    }
}

fn report_row(r: &VerificationReport) -> [String; 10] {
    let opt = |s: &Option<String>| s.clone().unwrap_or_default();
    [
        r.inequality.to_string(),
        r.inputs.map.clone(),
        opt(&r.inputs.zeta),
        opt(&r.inputs.z),
        r.inputs.x0.map(|x| x.to_string()).unwrap_or_default(),
        r.lhs.to_string(),
        r.rhs.to_string(),
        r.ratio.to_string(),
        r.error_estimate.to_string(),
        r.status.to_string(),
    ]
}

fn params_rows(p: &ParamsReport) -> Vec<(&'static str, String)> {
    let e = &p.params;
    vec![
        ("x0", e.x0.to_string()),
        ("kappa", e.kappa.to_string()),
        ("kappa_prime", e.kappa_prime.to_string()),
        ("l", e.l.to_string()),
        ("l_prime", e.l_prime.to_string()),
        ("M", e.m.to_string()),
        ("K", e.k.to_string()),
        ("K_prime", e.k_prime.to_string()),
        ("E", e.e.to_string()),
        ("E_prime", e.e_prime.to_string()),
        ("L", e.quarter_l.to_string()),
        ("L_prime", e.quarter_l_prime.to_string()),
        ("nome_h", e.nome_h.to_string()),
        ("zeta_abs", e.zeta_abs.to_string()),
        ("legendre_residual", p.legendre_residual.to_string()),
        ("landen_residual_k", p.landen_residuals[0].to_string()),
        ("landen_residual_k_prime", p.landen_residuals[1].to_string()),
        ("b_const", p.b_const.clone()),
        ("kernel_norm", p.kernel_norm.to_string()),
        ("scaled_kernel_norm", p.scaled_kernel_norm.to_string()),
    ]
}
