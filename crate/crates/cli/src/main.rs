//! `cylrad`: thermal electromagnetic radiation of a long cylinder.
//!
//! Subcommands emit plot-ready CSV: `spectrum` (per-frequency densities),
//! `sweep-radius` (total radiation over a log-spaced radius grid), `total`
//! (single radius), `plate` (large-radius limit), and `selfcheck` (embedded
//! invariant suite).  Exit codes: 0 success, 2 configuration error, 3
//! numerical non-convergence, 4 material-window violation.

mod selfcheck;

use clap::{Args, Parser, Subcommand};
use materials::consts::wavelength_m;
use materials::{Dispersion, MaterialError, MaterialSpec};
use plate::{PlateError, PlateOptions};
use radiation::{mode_sum, thermal_band, total_radiation, RadiationError, RadiationOptions};
use rayon::prelude::*;
use serde::Deserialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_WINDOW: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cylrad",
    about = "Thermal radiation of an infinitely long cylinder",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral emission densities over the thermal band.
    Spectrum(CommonArgs),
    /// Total radiation over a log-spaced radius sweep.
    SweepRadius(CommonArgs),
    /// Frequency-integrated radiation at a single radius.
    Total(CommonArgs),
    /// Emissivity of a half-space of the same material (large-radius limit).
    Plate(CommonArgs),
    /// Run the embedded invariant suite and report residuals.
    Selfcheck(selfcheck::SelfcheckArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Built-in material name (sic, gold-drude, tungsten-298, tungsten-2400,
    /// graphite-uniaxial, graphite-isotropic-average).
    #[arg(long)]
    material: Option<String>,
    /// Tabulated permittivity file: `energy_eV re_eps im_eps` per line.
    #[arg(long)]
    data_file: Option<PathBuf>,
    /// Cylinder radius in meters.
    #[arg(long)]
    radius: Option<f64>,
    /// Log-spaced radius sweep `MIN:MAX:N` in meters.
    #[arg(long)]
    radius_sweep: Option<String>,
    /// Cylinder temperature in kelvin.
    #[arg(long)]
    temperature: Option<f64>,
    /// Environment temperature in kelvin (default 0).
    #[arg(long)]
    env_temperature: Option<f64>,
    /// Relative tolerance of the frequency quadrature.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Allow analytic material models beyond their fitted window.
    #[arg(long)]
    allow_extrapolation: bool,
    /// Output CSV path (standard output if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// TOML configuration file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// File-based configuration mirroring the flags, plus engine overrides.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    material: Option<String>,
    data_file: Option<PathBuf>,
    radius: Option<f64>,
    radius_sweep: Option<String>,
    temperature: Option<f64>,
    env_temperature: Option<f64>,
    tolerance: Option<f64>,
    allow_extrapolation: Option<bool>,
    output: Option<PathBuf>,
    /// Relative tolerance of the k_z quadrature.
    kz_tolerance: Option<f64>,
    /// Relative contribution at which azimuthal orders are truncated.
    mode_tolerance: Option<f64>,
    /// Hard cap on the azimuthal order.
    n_cap: Option<usize>,
}

/// Flags merged over the config file.
struct RunConfig {
    material: MaterialSpec,
    radius: Option<f64>,
    radius_sweep: Option<(f64, f64, usize)>,
    temperature: f64,
    env_temperature: f64,
    output: Option<PathBuf>,
    opts: RadiationOptions,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<MaterialError> for CliError {
    fn from(e: MaterialError) -> Self {
        let code = match &e {
            MaterialError::OutOfWindow { .. } => EXIT_WINDOW,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RadiationError> for CliError {
    fn from(e: RadiationError) -> Self {
        let code = match &e {
            RadiationError::WindowMismatch { .. } => EXIT_WINDOW,
            RadiationError::Material(MaterialError::OutOfWindow { .. }) => EXIT_WINDOW,
            RadiationError::Material(_) => EXIT_CONFIG,
            RadiationError::NonConvergence { .. } | RadiationError::Truncation { .. } => {
                EXIT_NONCONVERGENCE
            }
            RadiationError::TMatrix(_) => EXIT_NONCONVERGENCE,
            RadiationError::Plate(p) => return plate_code(p),
            RadiationError::Domain(_) | RadiationError::Regime(_) => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn plate_code(e: &PlateError) -> CliError {
    let code = match e {
        PlateError::WindowMismatch { .. } => EXIT_WINDOW,
        PlateError::Material(MaterialError::OutOfWindow { .. }) => EXIT_WINDOW,
        PlateError::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_CONFIG,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

impl From<PlateError> for CliError {
    fn from(e: PlateError) -> Self {
        plate_code(&e)
    }
}

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("CYLRAD_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: CYLRAD_WORKERS must be a positive integer, got {workers:?}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum(a) => resolve(a).and_then(run_spectrum),
        Command::SweepRadius(a) => resolve(a).and_then(run_sweep),
        Command::Total(a) => resolve(a).and_then(run_total),
        Command::Plate(a) => resolve(a).and_then(run_plate),
        Command::Selfcheck(a) => return selfcheck::run(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

/// Merge flags over the config file and validate into a runnable config.
fn resolve(args: CommonArgs) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let material_name = args.material.or(file.material);
    let data_file = args.data_file.or(file.data_file);
    let material = match (material_name, data_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "--material and --data-file are mutually exclusive",
            ))
        }
        (Some(name), None) => materials::by_name(&name)?,
        (None, Some(path)) => MaterialSpec::isotropic(
            path.display().to_string(),
            Dispersion::Tabulated(materials::load_tabulated(&path)?),
        ),
        (None, None) => {
            return Err(CliError::config(
                "a material is required (--material or --data-file)",
            ))
        }
    };
    let temperature = args
        .temperature
        .or(file.temperature)
        .ok_or_else(|| CliError::config("--temperature is required"))?;
    if !(temperature >= 0.0) {
        return Err(CliError::config(format!(
            "temperature must be nonnegative, got {temperature}"
        )));
    }
    let env_temperature = args.env_temperature.or(file.env_temperature).unwrap_or(0.0);
    if !(env_temperature >= 0.0) {
        return Err(CliError::config(format!(
            "environment temperature must be nonnegative, got {env_temperature}"
        )));
    }
    let radius = args.radius.or(file.radius);
    if let Some(r) = radius {
        if !(r > 0.0) {
            return Err(CliError::config(format!("radius must be positive, got {r}")));
        }
    }
    let radius_sweep = match args.radius_sweep.or(file.radius_sweep) {
        Some(s) => Some(parse_sweep(&s)?),
        None => None,
    };
    let mut opts = RadiationOptions {
        allow_extrapolation: args.allow_extrapolation || file.allow_extrapolation.unwrap_or(false),
        ..Default::default()
    };
    if let Some(t) = args.tolerance.or(file.tolerance) {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::config(format!(
                "tolerance must be in (0, 1), got {t}"
            )));
        }
        opts.frequency_tolerance = t;
    }
    if let Some(t) = file.kz_tolerance {
        opts.kz_tolerance = t;
    }
    if let Some(t) = file.mode_tolerance {
        opts.mode_tolerance = t;
    }
    if let Some(n) = file.n_cap {
        opts.n_cap = n;
    }
    Ok(RunConfig {
        material,
        radius,
        radius_sweep,
        temperature,
        env_temperature,
        output: args.output.or(file.output),
        opts,
    })
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::config(format!("radius sweep must be MIN:MAX:N, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].parse().map_err(|_| bad())?;
    let max: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(min > 0.0) || !(max > min) || n < 2 {
        return Err(CliError::config(format!(
            "radius sweep needs 0 < MIN < MAX and N >= 2, got {s:?}"
        )));
    }
    Ok((min, max, n))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| {
                CliError::config(format!("cannot create output {}: {e}", p.display()))
            })?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::BufWriter::new(std::io::stdout()))),
    }
}

fn write_row(out: &mut dyn Write, row: &[f64]) -> Result<(), CliError> {
    let line = row
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    writeln!(out, "{line}").map_err(|e| CliError::config(format!("write failed: {e}")))
}

fn run_spectrum(cfg: RunConfig) -> Result<(), CliError> {
    let radius = cfg
        .radius
        .ok_or_else(|| CliError::config("spectrum requires --radius"))?;
    if cfg.temperature == 0.0 {
        return Err(CliError::config("spectrum requires a positive --temperature"));
    }
    let t_ref = cfg.temperature.max(cfg.env_temperature);
    let (e_lo, e_hi) = thermal_band(&cfg.material, t_ref, &cfg.opts)?;
    let n_pts = 200usize;
    let grid: Vec<f64> = (0..n_pts)
        .map(|i| {
            (e_lo.ln() + (e_hi.ln() - e_lo.ln()) * i as f64 / (n_pts - 1) as f64).exp()
        })
        .collect();
    let sums: Vec<radiation::ModeSum> = grid
        .par_iter()
        .map(|&e| {
            mode_sum(
                &cfg.material,
                radius,
                e,
                cfg.temperature,
                cfg.env_temperature,
                &cfg.opts,
            )
        })
        .collect::<Result<_, _>>()?;
    let mut out = open_output(&cfg.output)?;
    writeln!(out, "omega_ev,lambda_um,h_n,h_m,h_total,i_omega")
        .map_err(|e| CliError::config(format!("write failed: {e}")))?;
    for (&e, s) in grid.iter().zip(&sums) {
        let total = s.h_n + s.h_m;
        let i_omega = if total > 0.0 { (s.h_n - s.h_m) / total } else { 0.0 };
        write_row(
            &mut out,
            &[e, wavelength_m(e) * 1e6, s.h_n, s.h_m, total, i_omega],
        )?;
    }
    Ok(())
}

fn sweep_row(
    cfg: &RunConfig,
    out: &mut dyn Write,
    radius: f64,
) -> Result<(), CliError> {
    let r = total_radiation(
        &cfg.material,
        radius,
        cfg.temperature,
        cfg.env_temperature,
        &cfg.opts,
    )?;
    write_row(
        out,
        &[radius, r.h_npol, r.h_mpol, r.h_total, r.normalized, r.i_total],
    )
}

fn run_sweep(cfg: RunConfig) -> Result<(), CliError> {
    let (min, max, n) = cfg
        .radius_sweep
        .ok_or_else(|| CliError::config("sweep-radius requires --radius-sweep MIN:MAX:N"))?;
    let mut out = open_output(&cfg.output)?;
    writeln!(
        out,
        "radius_m,h_n_per_len,h_m_per_len,h_total_per_len,normalized,i_total"
    )
    .map_err(|e| CliError::config(format!("write failed: {e}")))?;
    for i in 0..n {
        let radius =
            (min.ln() + (max.ln() - min.ln()) * i as f64 / (n - 1) as f64).exp();
        sweep_row(&cfg, &mut out, radius)?;
    }
    Ok(())
}

fn run_total(cfg: RunConfig) -> Result<(), CliError> {
    let radius = cfg
        .radius
        .ok_or_else(|| CliError::config("total requires --radius"))?;
    let mut out = open_output(&cfg.output)?;
    writeln!(
        out,
        "radius_m,h_n_per_len,h_m_per_len,h_total_per_len,normalized,i_total"
    )
    .map_err(|e| CliError::config(format!("write failed: {e}")))?;
    sweep_row(&cfg, &mut out, radius)
}

fn run_plate(cfg: RunConfig) -> Result<(), CliError> {
    let popts = PlateOptions {
        tolerance: cfg.opts.frequency_tolerance,
        allow_extrapolation: cfg.opts.allow_extrapolation,
    };
    let s = plate::plate_emissivity(&cfg.material, cfg.temperature, &popts)?;
    let mut out = open_output(&cfg.output)?;
    writeln!(out, "s_m,s_n,s_total,i_plate")
        .map_err(|e| CliError::config(format!("write failed: {e}")))?;
    write_row(&mut out, &[s.s_m, s.s_n, s.s_total, s.i_plate])
}
