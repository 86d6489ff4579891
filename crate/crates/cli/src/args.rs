//! Command-line grammar.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fracdelay",
    version,
    about = "Orbit classification and bifurcation boundaries for z^2 + c and its delay extension",
    after_help = "Worker count can be capped with the FRACDELAY_WORKERS environment variable; \
                  it never changes output bytes."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a parameter-plane grid; writes <out>.ppm, <out>.csv and <out>.manifest.json
    Render(RenderArgs),
    /// Sample a boundary curve (cardioid, period2, period3 or hopf) to CSV
    Boundary(BoundaryArgs),
    /// Print the stability verdict for a stationary value (--zr/--zi) or for
    /// both stationary points of a parameter (--cr/--ci)
    Stability(StabilityArgs),
    /// Attractor samples along a parameter line, one CSV row per value
    Feigenbaum(FeigenbaumArgs),
    /// Integrate one parameter point and write the (tau, z) series to CSV
    Timeseries(TimeseriesArgs),
    /// Count non-escaped pixels of the bulb window at several horizons
    Decay(DecayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Dde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveArg {
    Cardioid,
    Period2,
    Period3,
    Hopf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -1.25, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 1.25, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long, default_value_t = 600)]
    pub width: usize,
    #[arg(long, default_value_t = 600)]
    pub height: usize,
    /// Normalized delay (dde mode)
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
    /// Integration step; defaults to tau0/200
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 200.0)]
    pub tau_end: f64,
    /// Defaults to 2 in discrete mode and 10 in dde mode
    #[arg(long)]
    pub escape_radius: Option<f64>,
    /// Iteration budget (discrete mode)
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Output prefix
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, value_enum)]
    pub curve: CurveArg,
    /// Normalized delay (hopf curve)
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["zr", "cr"])))]
pub struct StabilityArgs {
    /// Real part of the stationary value to test
    #[arg(long, allow_hyphen_values = true)]
    pub zr: Option<f64>,
    /// Imaginary part of the stationary value
    #[arg(
        long,
        allow_hyphen_values = true,
        requires = "zr",
        default_value_t = 0.0
    )]
    pub zi: f64,
    /// Real part of the parameter; both stationary points are tested
    #[arg(long, allow_hyphen_values = true)]
    pub cr: Option<f64>,
    /// Imaginary part of the parameter
    #[arg(
        long,
        allow_hyphen_values = true,
        requires = "cr",
        default_value_t = 0.0
    )]
    pub ci: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
}

/// `re,im` pair (a bare real is accepted as `re,0`).
pub fn parse_complex(s: &str) -> Result<ComplexArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|e| format!("invalid number {p:?}: {e}"))
    };
    match parts.as_slice() {
        [re] => Ok(ComplexArg {
            re: parse(re)?,
            im: 0.0,
        }),
        [re, im] => Ok(ComplexArg {
            re: parse(re)?,
            im: parse(im)?,
        }),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Args)]
pub struct FeigenbaumArgs {
    /// Line origin as RE,IM
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    pub c0: ComplexArg,
    /// Line direction as RE,IM
    #[arg(long, value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
    pub dir: ComplexArg,
    #[arg(long, allow_hyphen_values = true)]
    pub s_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s_max: f64,
    /// Number of parameter points on the line
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "discrete")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 400.0)]
    pub tau_end: f64,
    #[arg(long, default_value_t = 20000)]
    pub max_iter: usize,
    #[arg(long)]
    pub escape_radius: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimeseriesArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub cr: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub ci: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 300.0)]
    pub tau_end: f64,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long)]
    pub escape_radius: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// Horizons to compare, e.g. 200,1000,4000
    #[arg(long, value_delimiter = ',', default_values_t = [200.0, 1000.0, 4000.0])]
    pub tau_ends: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub tau0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[arg(long, default_value_t = -1.4, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = -0.9, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub im_max: f64,
    #[arg(long, default_value_t = 120)]
    pub width: usize,
    #[arg(long, default_value_t = 120)]
    pub height: usize,
    #[arg(long, default_value = "decay.csv")]
    pub out: PathBuf,
}
