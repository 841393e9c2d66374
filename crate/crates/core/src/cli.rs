//! Command-line front end: `beampattern`, `ber`, `sr` and `weights`.
//!
//! Each command validates everything, computes its full result in memory,
//! and only then writes the CSV plus a `<out>.manifest.json` sidecar that
//! records the resolved configuration and seed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::array::Scenario;
use crate::beamform::{build_beamformer, AlignedChannels, PowerSplit, Scheme};
use crate::config::{Config, ConfigError, ConfigFile};
use crate::error::Error;
use crate::linalg::inner;
use crate::metrics::{beampattern, AxisSpec, GridSpec};
use crate::montecarlo::{ber_curve, sr_curve, TrialConfig};
use crate::seeding::AllocationSource;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pjsim", version, about = "Secure precise transmission and precise jamming simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SINR surfaces of CM and AN over an angle × range grid.
    Beampattern(BeampatternArgs),
    /// Monte-Carlo BER at Bob versus SNR.
    Ber(BerArgs),
    /// Secrecy rate versus SNR.
    Sr(SrArgs),
    /// Beamformer weights for one allocation.
    Weights(WeightsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file; the built-in default scenario when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set beta=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// eab, leakage or maxrp; repeatable.
    #[arg(long = "scheme")]
    pub schemes: Vec<String>,
    #[arg(long, conflicts_with = "snr_range", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// START:STOP:STEP in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_range: Option<String>,
    /// Master seed; drawn from entropy and recorded in the manifest when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BeampatternArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Angle axis in degrees, START:STOP:STEP.
    #[arg(long, default_value = "0:180:1")]
    pub theta_range: String,
    /// Range axis in meters, START:STOP:STEP.
    #[arg(long, default_value = "10:1200:5")]
    pub r_range: String,
    /// Allocations averaged into the surface.
    #[arg(long, default_value_t = 1)]
    pub allocations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BerArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 100_000)]
    pub symbols: u64,
    #[arg(long, default_value_t = 100)]
    pub allocations: u64,
    #[arg(long)]
    pub reallocate_per_symbol: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SrArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 100)]
    pub allocations: u64,
}

#[derive(Debug, Clone, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("degenerate scenario: {0}")]
    Degenerate(Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_degenerate() {
            CliError::Degenerate(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub command: String,
    pub config: ConfigFile,
    pub schemes: Vec<Scheme>,
    pub master_seed: u64,
    pub parameters: serde_json::Value,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad manifest: {e}")))
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Beampattern(a) => cmd_beampattern(&a),
        Command::Ber(a) => cmd_ber(&a),
        Command::Sr(a) => cmd_sr(&a),
        Command::Weights(a) => cmd_weights(&a),
    }
}

struct Prepared {
    config: Config,
    schemes: Vec<Scheme>,
    seed: u64,
}

fn prepare(common: &CommonArgs, default_schemes: &[Scheme]) -> Result<Prepared, CliError> {
    let overrides = common
        .overrides
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let config = match &common.config {
        Some(path) => Config::load(path, &overrides)?,
        None => Config::from_toml_str(crate::config::DEFAULT_CONFIG, &overrides)?,
    };
    let mut schemes = common
        .schemes
        .iter()
        .map(|s| s.parse::<Scheme>())
        .collect::<Result<Vec<_>, _>>()?;
    if schemes.is_empty() {
        schemes = default_schemes.to_vec();
    }
    let seed = common.seed.unwrap_or_else(rand::random);
    Ok(Prepared { config, schemes, seed })
}

fn single_scheme(p: &Prepared) -> Result<Scheme, CliError> {
    match p.schemes[..] {
        [s] => Ok(s),
        _ => Err(CliError::Usage("this command takes exactly one --scheme".into())),
    }
}

fn single_snr(common: &CommonArgs, default: f64) -> Result<f64, CliError> {
    if common.snr_range.is_some() {
        return Err(CliError::Usage("this command takes --snr-db, not --snr-range".into()));
    }
    Ok(common.snr_db.unwrap_or(default))
}

fn snr_grid(common: &CommonArgs, default: &str) -> Result<Vec<f64>, CliError> {
    if let Some(x) = common.snr_db {
        return Ok(vec![x]);
    }
    let axis = AxisSpec::parse(common.snr_range.as_deref().unwrap_or(default))?;
    Ok(axis.values().collect())
}

fn split_at(config: &Config, snr_db: f64) -> Result<PowerSplit, CliError> {
    Ok(PowerSplit::from_snr_db(config.beta, config.noise_power_w, &config.scenario, snr_db)?)
}

fn manifest(command: &str, p: &Prepared, parameters: serde_json::Value) -> RunManifest {
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        command: command.to_string(),
        config: p.config.resolved.clone(),
        schemes: p.schemes.clone(),
        master_seed: p.seed,
        parameters,
    }
}

/// Writes `bytes` to `path` via a temporary sibling and a rename, then the manifest.
fn emit(path: &Path, bytes: &[u8], manifest: &RunManifest) -> Result<(), CliError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let write_atomic = |target: &Path, data: &[u8]| -> Result<(), CliError> {
        let mut tmp_name = target.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(".tmp");
        let tmp = target.with_file_name(tmp_name);
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(data).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
        fs::rename(&tmp, target).map_err(io_err(target))
    };
    let manifest_bytes = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    write_atomic(path, bytes)?;
    write_atomic(&manifest_path(path), &manifest_bytes)
}

fn allocation_source(p: &Prepared) -> AllocationSource {
    match &p.config.fixed_allocation {
        Some(alloc) => AllocationSource::Fixed(alloc.clone()),
        None => AllocationSource::Seeded(p.seed),
    }
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(job))
}

pub fn cmd_beampattern(args: &BeampatternArgs) -> Result<(), CliError> {
    let p = prepare(&args.common, &[Scheme::Eab])?;
    let scheme = single_scheme(&p)?;
    let snr_db = single_snr(&args.common, 14.0)?;
    let grid = GridSpec {
        theta_deg: AxisSpec::parse(&args.theta_range)?,
        range_m: AxisSpec::parse(&args.r_range)?,
    };
    let split = split_at(&p.config, snr_db)?;
    let source = allocation_source(&p);
    let surface = with_workers(args.common.workers, || {
        beampattern(&p.config.scenario, &split, scheme, &grid, args.allocations, &source)
    })??;
    let mut csv = Vec::new();
    surface.write_csv(&mut csv).expect("in-memory write");
    let m = manifest(
        "beampattern",
        &p,
        json!({
            "snr_db": snr_db,
            "theta_range": args.theta_range,
            "r_range": args.r_range,
            "allocations": args.allocations,
            "total_power_w": split.total_power(),
        }),
    );
    emit(&args.common.out, &csv, &m)
}

pub fn cmd_ber(args: &BerArgs) -> Result<(), CliError> {
    let p = prepare(&args.common, &Scheme::ALL)?;
    let grid = snr_grid(&args.common, "0:30:2")?;
    let mut cfg = TrialConfig::new(args.symbols, args.allocations, p.seed);
    cfg.reallocate_per_symbol = args.reallocate_per_symbol;
    cfg.workers = args.common.workers;
    let report = ber_curve(&p.schemes, &p.config.scenario, p.config.beta, p.config.noise_power_w, &cfg, &grid)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).expect("in-memory write");
    let m = manifest(
        "ber",
        &p,
        json!({
            "snr_db": grid,
            "symbols": args.symbols,
            "allocations": args.allocations,
            "reallocate_per_symbol": args.reallocate_per_symbol,
        }),
    );
    emit(&args.common.out, &csv, &m)
}

pub fn cmd_sr(args: &SrArgs) -> Result<(), CliError> {
    let p = prepare(&args.common, &Scheme::ALL)?;
    let grid = snr_grid(&args.common, "-10:30:2")?;
    let mut cfg = TrialConfig::new(1, args.allocations, p.seed);
    cfg.workers = args.common.workers;
    let report = sr_curve(&p.schemes, &p.config.scenario, p.config.beta, p.config.noise_power_w, &cfg, &grid)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).expect("in-memory write");
    let m = manifest(
        "sr",
        &p,
        json!({ "snr_db": grid, "allocations": args.allocations }),
    );
    emit(&args.common.out, &csv, &m)
}

/// Null residuals of a beamformer: pre-modulus `(|p_Eᴴ a|, |q_Bᴴ b|)` and
/// post-modulus `(|h_Eᴴ v_CM|, |h_Bᴴ v_AN|)`.
pub fn null_residuals(
    scenario: &Scenario,
    bf: &crate::beamform::Beamformer,
) -> ((f64, f64), (f64, f64)) {
    let ch = AlignedChannels::new(scenario, bf.allocation());
    let pre = (
        inner(&ch.p_eve, bf.cm_amplitudes().entries()).norm(),
        inner(&ch.q_bob, bf.an_amplitudes().entries()).norm(),
    );
    let h_eve: Vec<_> = ch.p_eve.iter().zip(&ch.bob_phases).map(|(p, a)| p * a).collect();
    let h_bob: Vec<_> = ch.q_bob.iter().zip(&ch.eve_phases).map(|(q, a)| q * a).collect();
    let post = (
        inner(&h_eve, bf.v_cm().entries()).norm(),
        inner(&h_bob, bf.v_an().entries()).norm(),
    );
    (pre, post)
}

pub fn cmd_weights(args: &WeightsArgs) -> Result<(), CliError> {
    let p = prepare(&args.common, &[Scheme::Eab])?;
    let scheme = single_scheme(&p)?;
    let snr_db = single_snr(&args.common, 14.0)?;
    let split = split_at(&p.config, snr_db)?;
    let scenario = &p.config.scenario;
    let alloc = allocation_source(&p).allocation(scenario.geometry(), 0);
    let bf = build_beamformer(scheme, scenario, &alloc, &split)?;
    let mut csv = Vec::new();
    bf.write_csv(&mut csv).expect("in-memory write");
    let ((pre_cm, pre_an), (post_cm, post_an)) = null_residuals(scenario, &bf);
    println!("scheme {scheme}, allocation {alloc}");
    println!("pre-modulus null residual: cm {pre_cm:.3e}, an {pre_an:.3e}");
    println!("post-modulus null residual: cm {post_cm:.3e}, an {post_an:.3e}");
    let m = manifest(
        "weights",
        &p,
        json!({
            "snr_db": snr_db,
            "allocation": alloc.to_string(),
            "pre_modulus_null_residual": [pre_cm, pre_an],
            "post_modulus_null_residual": [post_cm, post_an],
        }),
    );
    emit(&args.common.out, &csv, &m)
}
