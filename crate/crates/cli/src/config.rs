use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goluzin_core::catalog::parse_complex;
use goluzin_core::{Complex64, UnivalentMap};

/// Numerical checks of area-type and pointwise estimates for univalent maps.
#[derive(Debug, Parser)]
#[command(name = "goluzin-lab", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for quadrature and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-6, global = true)]
    pub rel_tol: f64,

    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub abs_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the elliptic parameter pack for a point |ζ| > 1.
    Params(ParamsArgs),
    /// Pointwise bounds: Goluzin at --z, |Ψ(ζ,ζ)| at --zeta, Koebe–Bieberbach for disk maps.
    Pointwise(PointwiseArgs),
    /// Area-type estimate for a map of the exterior disk.
    Area(AreaArgs),
    /// Grönwall's area theorem by coefficients and by quadrature.
    Gronwall(GronwallArgs),
    /// Area and pointwise checks over a grid of base points.
    Sweep(SweepArgs),
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// |ζ|, greater than 1.
    #[arg(long, conflicts_with = "zeta")]
    pub zeta_abs: Option<f64>,
    /// ζ itself; only its modulus is used.
    #[arg(long, value_parser = complex)]
    pub zeta: Option<Complex64>,
}

#[derive(Debug, Args)]
pub struct PointwiseArgs {
    #[arg(long, value_parser = map)]
    pub map: UnivalentMap,
    /// Base point for the |Ψ(ζ,ζ)| bound (exterior-disk maps).
    #[arg(long, value_parser = complex)]
    pub zeta: Option<Complex64>,
    /// Evaluation point for Goluzin (|z| > 1) or Koebe–Bieberbach (|z| < 1).
    #[arg(long, value_parser = complex)]
    pub z: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AreaForm {
    /// Exterior-disk coordinates.
    Sigma,
    /// Unit-disk coordinates after the Möbius transport.
    Disk,
    /// Torus rectangle coordinates.
    Torus,
    /// All three forms.
    All,
}

#[derive(Debug, Args)]
pub struct AreaArgs {
    #[arg(long, value_parser = map)]
    pub map: UnivalentMap,
    #[arg(long, value_parser = complex)]
    pub zeta: Complex64,
    /// Coordinates in which the estimate is integrated.
    #[arg(long, value_enum, default_value_t = AreaForm::Sigma)]
    pub form: AreaForm,
}

#[derive(Debug, Args)]
pub struct GronwallArgs {
    #[arg(long, value_parser = map)]
    pub map: UnivalentMap,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Maps to sweep (repeatable); defaults to every exterior-disk map in the catalog.
    #[arg(long = "map", value_parser = map)]
    pub maps: Vec<UnivalentMap>,
    /// Moduli of the base points (repeatable).
    #[arg(long = "zeta-abs", default_values_t = [1.25, 1.5, 2.0, 3.0])]
    pub zeta_abs: Vec<f64>,
    /// Arguments of the base points in radians (repeatable).
    #[arg(long = "zeta-arg", default_values_t = [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2])]
    pub zeta_arg: Vec<f64>,
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn map(s: &str) -> Result<UnivalentMap, String> {
    s.parse::<UnivalentMap>().map_err(|e| e.to_string())
}
