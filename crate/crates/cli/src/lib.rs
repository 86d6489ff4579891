//! Dispatch and artifact assembly for the `fracdelay` binary.
//!
//! Exit codes: 0 on success, 2 on usage errors (unknown flags, missing or
//! inconsistent values), 1 on runtime failures (I/O, stalled continuation).

pub mod args;
pub mod io;

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::Parser;

use fracdelay::bifurcation::{feigenbaum_scan, time_series, ScanLine};
use fracdelay::cycles::trace_multiplier_boundary;
use fracdelay::dynamics::{DdeConfig, DiscreteParams, DEFAULT_CONV_TOL};
use fracdelay::render::{
    colorize, count_classes, decay_counts, render_grid, GridSpec, Mode, PaletteSpec, SubRect,
};
use fracdelay::stability::{hopf_boundary_curve, is_stable, stationary_points};
use fracdelay::{ComplexValue, Error};

use args::{
    BoundaryArgs, Cli, Command, CurveArg, DecayArgs, FeigenbaumArgs, ModeArg, RenderArgs,
    StabilityArgs, TimeseriesArgs,
};
use io::{
    artifact_record, manifest_path_for, write_csv, write_manifest, write_ppm, Cell, RunManifest,
    Table,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Runs the CLI; returns the process exit code.
pub fn run<I, S>(argv: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let raw: Vec<String> = argv
        .into_iter()
        .map(|a| a.clone().into().to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(raw.iter()) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    configure_workers();

    let outcome = match cli.command {
        Command::Render(a) => render_cmd(&a, &raw),
        Command::Boundary(a) => boundary_cmd(&a, &raw),
        Command::Stability(a) => stability_cmd(&a),
        Command::Feigenbaum(a) => feigenbaum_cmd(&a, &raw),
        Command::Timeseries(a) => timeseries_cmd(&a, &raw),
        Command::Decay(a) => decay_cmd(&a, &raw),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("fracdelay: error: {e}");
            match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Runtime(_) => EXIT_RUNTIME,
            }
        }
    }
}

/// Optional worker-count override. It only caps parallelism; outputs are
/// byte-identical for any value.
fn configure_workers() {
    if let Ok(v) = std::env::var("FRACDELAY_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidParam(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn dde_config(
    tau0: f64,
    dt: Option<f64>,
    tau_end: f64,
    escape_radius: Option<f64>,
) -> Result<DdeConfig<f64>, CliError> {
    Ok(DdeConfig::new(
        tau0,
        dt.unwrap_or(tau0 / 200.0),
        tau_end,
        escape_radius.unwrap_or(10.0),
        DEFAULT_CONV_TOL,
        5.0 * tau0,
        0.5,
    )?)
}

fn record_dde_config(m: &mut RunManifest, config: &DdeConfig<f64>) {
    m.param("tau0", config.tau0());
    m.param("dt", config.dt());
    m.param("tau_end", config.tau_end());
    m.param("escape_radius", config.escape_radius());
    m.param("conv_tol", config.conv_tol());
    m.param("window", config.window());
    m.param("transient_frac", config.transient_frac());
    m.param("delay_steps", config.delay_steps());
}

fn record_grid(m: &mut RunManifest, grid: &GridSpec<f64>) {
    m.param("re_min", grid.re_min);
    m.param("re_max", grid.re_max);
    m.param("im_min", grid.im_min);
    m.param("im_max", grid.im_max);
    m.param("width", grid.width);
    m.param("height", grid.height);
}

fn finish_manifest(
    mut manifest: RunManifest,
    started: Instant,
    artifacts: &[&Path],
    manifest_path: &Path,
) -> Result<(), CliError> {
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    for a in artifacts {
        manifest.artifacts.push(artifact_record(a)?);
    }
    write_manifest(manifest_path, &manifest)?;
    Ok(())
}

fn render_cmd(a: &RenderArgs, raw: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    let grid = GridSpec::new(a.re_min, a.re_max, a.im_min, a.im_max, a.width, a.height)?;
    let mut manifest = RunManifest::new("render", raw.to_vec());
    record_grid(&mut manifest, &grid);

    let mode = match a.mode {
        ModeArg::Discrete => {
            let params = DiscreteParams {
                max_iter: a.max_iter,
                escape_radius: a.escape_radius.unwrap_or(2.0),
            };
            manifest.param("mode", "discrete");
            manifest.param("max_iter", params.max_iter);
            manifest.param("escape_radius", params.escape_radius);
            manifest.param("conv_tol", DEFAULT_CONV_TOL);
            Mode::Discrete(params)
        }
        ModeArg::Dde => {
            let config = dde_config(a.tau0, a.dt, a.tau_end, a.escape_radius)?;
            manifest.param("mode", "dde");
            manifest.param("sample_stride", 1);
            record_dde_config(&mut manifest, &config);
            Mode::Dde(config)
        }
    };

    let raster = render_grid(&grid, &mode)?;
    let tallies = count_classes(&raster, SubRect::full(grid.width, grid.height));
    manifest.tallies = Some(tallies.into());

    let ppm_path = a.out.with_extension("ppm");
    let csv_path = a.out.with_extension("csv");
    let manifest_path = a.out.with_extension("manifest.json");
    write_ppm(&ppm_path, &colorize(&raster, &PaletteSpec::default()))?;

    let mut table = Table::new(vec!["i", "j", "c_re", "c_im", "class", "scalar"]);
    for j in 0..raster.height {
        for i in 0..raster.width {
            let c = grid.pixel_to_c(i, j);
            table.push(vec![
                Cell::Int(i as u64),
                Cell::Int(j as u64),
                Cell::Float(c.re),
                Cell::Float(c.im),
                Cell::Int(u64::from(raster.class_at(i, j))),
                Cell::Float(raster.scalar_at(i, j)),
            ]);
        }
    }
    write_csv(&csv_path, &table)?;
    finish_manifest(manifest, started, &[&ppm_path, &csv_path], &manifest_path)
}

fn boundary_cmd(a: &BoundaryArgs, raw: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    if a.samples < 8 {
        return Err(CliError::Usage("need at least 8 samples".into()));
    }
    let mut manifest = RunManifest::new("boundary", raw.to_vec());
    manifest.param("samples", a.samples);

    let table = match a.curve {
        CurveArg::Hopf => {
            manifest.param("curve", "hopf");
            manifest.param("tau0", a.tau0);
            if !a.tau0.is_finite() || a.tau0 <= 0.0 {
                return Err(CliError::Usage("tau0 must be positive".into()));
            }
            let mut t = Table::new(vec!["phi", "omega", "c_re", "c_im", "marginal_modulus"]);
            for s in hopf_boundary_curve(a.tau0, a.samples) {
                t.push(vec![
                    Cell::Float(s.phi),
                    Cell::Float(s.omega),
                    Cell::Float(s.c_h.re),
                    Cell::Float(s.c_h.im),
                    Cell::Float(s.marginal_modulus),
                ]);
            }
            t
        }
        curve => {
            let (n, name) = match curve {
                CurveArg::Cardioid => (1, "cardioid"),
                CurveArg::Period2 => (2, "period2"),
                _ => (3, "period3"),
            };
            manifest.param("curve", name);
            let angle = if n == 3 { "theta" } else { "phi" };
            let mut t = Table::new(vec![angle, "c_re", "c_im"]);
            let points = match trace_multiplier_boundary::<f64>(n, a.samples) {
                Ok(points) => points,
                Err(stall) => {
                    // keep the partial curve on disk, then fail
                    push_curve_rows(&mut t, &stall.partial, a.samples);
                    write_csv(&a.out, &t)?;
                    return Err(CliError::Runtime(stall.to_string()));
                }
            };
            push_curve_rows(&mut t, &points, a.samples);
            t
        }
    };
    write_csv(&a.out, &table)?;
    finish_manifest(manifest, started, &[&a.out], &manifest_path_for(&a.out))
}

fn push_curve_rows(table: &mut Table, points: &[ComplexValue], samples: usize) {
    let step = std::f64::consts::TAU / samples as f64;
    for (k, p) in points.iter().enumerate() {
        table.push(vec![
            Cell::Float(step * k as f64),
            Cell::Float(p.re),
            Cell::Float(p.im),
        ]);
    }
}

fn stability_cmd(a: &StabilityArgs) -> Result<(), CliError> {
    if !a.tau0.is_finite() || a.tau0 <= 0.0 {
        return Err(CliError::Usage("tau0 must be positive".into()));
    }
    let report = |zs: ComplexValue| {
        let v = is_stable(zs, a.tau0);
        println!(
            "z_s = ({}, {}): {} (|z_s| = {}, threshold = {}, phi_eff = {}, omega = {})",
            io::format_float(zs.re),
            io::format_float(zs.im),
            if v.stable { "stable" } else { "unstable" },
            io::format_float(zs.norm()),
            io::format_float(v.binding_threshold),
            io::format_float(v.phi_used),
            io::format_float(v.omega_used),
        );
    };
    if let Some(zr) = a.zr {
        report(ComplexValue::new(zr, a.zi));
    } else if let Some(cr) = a.cr {
        let c = ComplexValue::new(cr, a.ci);
        println!(
            "c = ({}, {})",
            io::format_float(c.re),
            io::format_float(c.im)
        );
        let (minus, plus) = stationary_points(c);
        report(minus);
        report(plus);
    }
    Ok(())
}

fn feigenbaum_cmd(a: &FeigenbaumArgs, raw: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("feigenbaum", raw.to_vec());
    manifest.param("c0", [a.c0.re, a.c0.im]);
    manifest.param("dir", [a.dir.re, a.dir.im]);
    manifest.param("s_min", a.s_min);
    manifest.param("s_max", a.s_max);
    manifest.param("n", a.n);

    let mode = match a.mode {
        ModeArg::Discrete => {
            let params = DiscreteParams {
                max_iter: a.max_iter,
                escape_radius: a.escape_radius.unwrap_or(2.0),
            };
            manifest.param("mode", "discrete");
            manifest.param("max_iter", params.max_iter);
            manifest.param("escape_radius", params.escape_radius);
            Mode::Discrete(params)
        }
        ModeArg::Dde => {
            let config = dde_config(a.tau0, a.dt, a.tau_end, a.escape_radius)?;
            manifest.param("mode", "dde");
            record_dde_config(&mut manifest, &config);
            Mode::Dde(config)
        }
    };
    let line = ScanLine {
        origin: ComplexValue::new(a.c0.re, a.c0.im),
        direction: ComplexValue::new(a.dir.re, a.dir.im),
    };
    let scan = feigenbaum_scan(line, a.s_min, a.s_max, a.n, &mode)?;

    let mut table = Table::new(vec!["s", "c_re", "c_im", "value"]);
    for row in &scan.rows {
        table.push(vec![
            Cell::Float(row.s),
            Cell::Float(row.c.re),
            Cell::Float(row.c.im),
            Cell::Float(row.value),
        ]);
    }
    write_csv(&a.out, &table)?;
    let diagnostics: Vec<String> = scan
        .diagnostics
        .iter()
        .map(|d| format!("s = {}: {}", io::format_float(d.s), d.message))
        .collect();
    for d in &diagnostics {
        eprintln!("fracdelay: note: {d}");
    }
    manifest.param("diagnostics", diagnostics);
    finish_manifest(manifest, started, &[&a.out], &manifest_path_for(&a.out))
}

fn timeseries_cmd(a: &TimeseriesArgs, raw: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    if a.stride == 0 {
        return Err(CliError::Usage("stride must be at least 1".into()));
    }
    let config = dde_config(a.tau0, a.dt, a.tau_end, a.escape_radius)?;
    let mut manifest = RunManifest::new("timeseries", raw.to_vec());
    manifest.param("cr", a.cr);
    manifest.param("ci", a.ci);
    manifest.param("stride", a.stride);
    record_dde_config(&mut manifest, &config);

    let series = time_series(ComplexValue::new(a.cr, a.ci), &Mode::Dde(config), a.stride)?;
    let mut table = Table::new(vec!["tau", "z_re", "z_im", "z_abs"]);
    for (tau, z) in series.samples() {
        table.push(vec![
            Cell::Float(*tau),
            Cell::Float(z.re),
            Cell::Float(z.im),
            Cell::Float(z.norm()),
        ]);
    }
    write_csv(&a.out, &table)?;
    finish_manifest(manifest, started, &[&a.out], &manifest_path_for(&a.out))
}

fn decay_cmd(a: &DecayArgs, raw: &[String]) -> Result<(), CliError> {
    let started = Instant::now();
    if a.tau_ends.is_empty() {
        return Err(CliError::Usage("need at least one horizon".into()));
    }
    let grid = GridSpec::new(a.re_min, a.re_max, a.im_min, a.im_max, a.width, a.height)?;
    let max_end = a.tau_ends.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let base = dde_config(a.tau0, Some(a.dt), max_end, None)?;

    let mut manifest = RunManifest::new("decay", raw.to_vec());
    record_grid(&mut manifest, &grid);
    record_dde_config(&mut manifest, &base);
    manifest.param("tau_ends", &a.tau_ends);

    let counts = decay_counts(&grid, &base, &a.tau_ends)?;
    let mut table = Table::new(vec![
        "tau_end",
        "escaped",
        "converged",
        "oscillating",
        "undecided",
        "non_escaped",
    ]);
    for (tau_end, t) in &counts {
        table.push(vec![
            Cell::Float(*tau_end),
            Cell::Int(t.escaped as u64),
            Cell::Int(t.converged as u64),
            Cell::Int(t.oscillating as u64),
            Cell::Int(t.undecided as u64),
            Cell::Int(t.non_escaped() as u64),
        ]);
    }
    write_csv(&a.out, &table)?;
    if let Some((_, last)) = counts.last() {
        manifest.tallies = Some((*last).into());
    }
    finish_manifest(manifest, started, &[&a.out], &manifest_path_for(&a.out))
}
