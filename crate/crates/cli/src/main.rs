//! `symplyap`: experiment harness over the core library.
//!
//! Every run resolves its parameters into an [`spec::ExperimentSpec`],
//! executes it with per-task seeding, and writes a `manifest.json`
//! listing a checksum for every emitted file. `symplyap rerun` replays a
//! manifest and verifies the outputs byte for byte.
//!
//! Exit codes: 0 success, 2 configuration error, 3 task failure.

mod commands;
mod output;
mod spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use symplyap_core::model::{energy_window, eigenvalue_extremes, parse_config_str, to_config_string};
use symplyap_core::tolerances::MAX_ENUM_CHANNELS;
use symplyap_core::util::linspace;
use symplyap_core::{CoreError, ModelConfig, Result};

use output::{sha256_hex, OutDir, RunManifest};
use spec::{
    DecaySpec, ExperimentSpec, GoodBoxSpec, IdsSpec, LieCheckSpec, LyapunovSweepSpec, ProbesSpec,
    WegnerSpec, WindowSpec,
};

#[derive(Parser)]
#[command(name = "symplyap", version, about = "Experiments on matrix-valued 1D random operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model configuration file (flat `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed; overrides the config file's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials (per box size where applicable).
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Full Lyapunov spectrum over an energy grid.
    LyapunovSweep {
        #[command(flatten)]
        common: Common,
        /// Energy grid: `lo:hi:k` or a comma list. Default: 9 interior
        /// points of the admissible window.
        #[arg(long)]
        energies: Option<String>,
        /// Cocycle steps per energy.
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        /// QR re-orthonormalization cadence.
        #[arg(long, default_value_t = 10)]
        reorth_every: usize,
    },
    /// Admissible energy window and critical cell length.
    Window {
        #[command(flatten)]
        common: Common,
    },
    /// Bracket closure of cell generators vs the full dimension N(2N+1).
    LieCheck {
        #[command(flatten)]
        common: Common,
        /// Check channel counts 1..=n_max (unit couplings).
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Energy at which the generators are evaluated.
        #[arg(long, default_value_t = 0.0)]
        energy: f64,
    },
    /// Integrated density of states over an energy grid.
    Ids {
        #[command(flatten)]
        common: Common,
        /// Energy grid: `lo:hi:k` or a comma list. Default: 36 points
        /// spanning the corner-spectrum range.
        #[arg(long)]
        energies: Option<String>,
        /// Box half-length in cells.
        #[arg(long, default_value_t = 25)]
        half_cells: usize,
        /// Holder-exponent fit subinterval `lo,hi` (optional).
        #[arg(long)]
        holder: Option<String>,
    },
    /// Spectral-proximity (Wegner-type) event frequency vs box size.
    Wegner {
        #[command(flatten)]
        common: Common,
        /// Reference energy.
        #[arg(long)]
        energy: f64,
        /// Threshold rate: the event distance is exp(-kappa (lL)^beta).
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Threshold exponent; must lie in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Box half-lengths in cells, comma separated.
        #[arg(long, default_value = "8,16,32")]
        half_cells_list: String,
    },
    /// Good-box (masked resolvent decay) event frequency vs box size.
    GoodBox {
        #[command(flatten)]
        common: Common,
        /// Reference energy.
        #[arg(long)]
        energy: f64,
        /// Decay rate in the threshold exp(-gamma lL / 3); default is
        /// half the calibrated top Lyapunov exponent.
        #[arg(long)]
        gamma: Option<f64>,
        /// Steps for the gamma calibration run.
        #[arg(long, default_value_t = 100_000)]
        gamma_steps: usize,
        /// Box half-lengths in cells (multiples of 3), comma separated.
        #[arg(long, default_value = "12,24,48")]
        half_cells_list: String,
    },
    /// Eigenfunction decay fit near a target energy vs Lyapunov rates.
    Decay {
        #[command(flatten)]
        common: Common,
        /// Target energy for the eigenvalue search.
        #[arg(long)]
        energy: f64,
        /// Box half-length in cells.
        #[arg(long, default_value_t = 12)]
        half_cells: usize,
        /// Eigenvalue search radius around the target.
        #[arg(long, default_value_t = 0.25)]
        window_radius: f64,
        /// Steps for the Lyapunov reference run.
        #[arg(long, default_value_t = 200_000)]
        gamma_steps: usize,
    },
    /// Monte Carlo probe battery at one energy.
    Probes {
        #[command(flatten)]
        common: Common,
        /// Reference energy.
        #[arg(long)]
        energy: f64,
        /// Exterior power order.
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Steps for the Furstenberg integral run.
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
        /// Cocycle length for the large-deviation / negative-moment runs.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Large-deviation tolerance (per unit length).
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// Negative-moment order.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Box half-length for the solution-bound check.
        #[arg(long, default_value_t = 6)]
        half_cells: usize,
    },
    /// Re-execute a manifest and verify outputs byte for byte.
    Rerun {
        /// Manifest written by a previous run.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory for the replay.
        #[arg(long, default_value = "rerun-out")]
        out: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_energy_grid(raw: &str) -> Result<Vec<f64>> {
    let parse_one = |piece: &str| -> Result<f64> {
        piece
            .trim()
            .parse::<f64>()
            .map_err(|_| CoreError::Config(format!("bad energy '{}'", piece.trim())))
    };
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(CoreError::Config(format!("expected lo:hi:k, got '{raw}'")));
        }
        let lo = parse_one(parts[0])?;
        let hi = parse_one(parts[1])?;
        let k: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CoreError::Config(format!("bad grid count '{}'", parts[2].trim())))?;
        if k < 2 || !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(CoreError::Config(format!("bad energy grid '{raw}'")));
        }
        Ok(linspace(lo, hi, k))
    } else {
        raw.split(',').map(parse_one).collect()
    }
}

fn parse_usize_list(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<usize>()
                .map_err(|_| CoreError::Config(format!("bad cell count '{}'", piece.trim())))
        })
        .collect()
}

fn parse_holder(raw: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(CoreError::Config(format!("expected lo,hi, got '{raw}'")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CoreError::Config(format!("bad holder bound '{}'", parts[0].trim())))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CoreError::Config(format!("bad holder bound '{}'", parts[1].trim())))?;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(CoreError::Config(format!("bad holder interval '{raw}'")));
    }
    Ok([lo, hi])
}

fn load_config(common: &Common) -> Result<(ModelConfig, String, u64)> {
    let text = fs::read_to_string(&common.config).map_err(|e| {
        CoreError::Config(format!("reading config {}: {e}", common.config.display()))
    })?;
    let cfg = parse_config_str(&text)?;
    let seed = common.seed.unwrap_or_else(|| cfg.seed());
    // Canonical round-tripped form, so the manifest carries exactly what
    // was resolved regardless of comments or ordering in the source file.
    Ok((cfg.clone(), to_config_string(&cfg), seed))
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(CoreError::Config(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

/// Validate everything cheap before any computation starts.
fn validate(spec: &ExperimentSpec) -> Result<()> {
    let cfg = spec.config()?;
    match spec {
        ExperimentSpec::LyapunovSweep(s) => {
            if s.energies.is_empty() {
                return Err(CoreError::Config("energy grid is empty".into()));
            }
            if let Some(bad) = s.energies.iter().find(|e| !e.is_finite()) {
                return Err(CoreError::Config(format!("non-finite energy {bad}")));
            }
            if s.steps < 1000 {
                return Err(CoreError::Config(format!("--steps must be >= 1000, got {}", s.steps)));
            }
            if s.reorth_every == 0 {
                return Err(CoreError::Config("--reorth-every must be >= 1".into()));
            }
        }
        ExperimentSpec::Window(_) => {}
        ExperimentSpec::LieCheck(s) => {
            if s.n_max == 0 || s.n_max > MAX_ENUM_CHANNELS {
                return Err(CoreError::Config(format!(
                    "--n-max must lie in 1..={MAX_ENUM_CHANNELS}, got {}",
                    s.n_max
                )));
            }
            if !s.energy.is_finite() {
                return Err(CoreError::Config(format!("--energy must be finite, got {}", s.energy)));
            }
        }
        ExperimentSpec::Ids(s) => {
            if s.energies.len() < 2 {
                return Err(CoreError::Config("energy grid needs at least 2 points".into()));
            }
            if s.energies.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(CoreError::Config("energy grid must be strictly increasing".into()));
            }
            if s.half_cells == 0 {
                return Err(CoreError::Config("--half-cells must be >= 1".into()));
            }
            if s.samples == 0 {
                return Err(CoreError::Config("--trials must be >= 1".into()));
            }
        }
        ExperimentSpec::Wegner(s) => {
            require_positive("--kappa", s.kappa)?;
            if !(s.beta > 0.0 && s.beta < 1.0) {
                return Err(CoreError::Config(format!("--beta must lie in (0,1), got {}", s.beta)));
            }
            if s.half_cells.is_empty() || s.half_cells.contains(&0) {
                return Err(CoreError::Config("--half-cells-list needs positive entries".into()));
            }
            if s.trials == 0 {
                return Err(CoreError::Config("--trials must be >= 1".into()));
            }
            if !s.energy.is_finite() {
                return Err(CoreError::Config(format!("--energy must be finite, got {}", s.energy)));
            }
        }
        ExperimentSpec::GoodBox(s) => {
            if let Some(g) = s.gamma {
                require_positive("--gamma", g)?;
            }
            if s.half_cells.is_empty() || s.half_cells.iter().any(|&l| l == 0 || l % 3 != 0) {
                return Err(CoreError::Config(
                    "--half-cells-list needs positive multiples of 3".into(),
                ));
            }
            if s.trials == 0 {
                return Err(CoreError::Config("--trials must be >= 1".into()));
            }
            if s.gamma.is_none() && s.gamma_steps < 1000 {
                return Err(CoreError::Config(format!(
                    "--gamma-steps must be >= 1000, got {}",
                    s.gamma_steps
                )));
            }
            if !s.energy.is_finite() {
                return Err(CoreError::Config(format!("--energy must be finite, got {}", s.energy)));
            }
        }
        ExperimentSpec::Decay(s) => {
            if s.half_cells == 0 {
                return Err(CoreError::Config("--half-cells must be >= 1".into()));
            }
            require_positive("--window-radius", s.window_radius)?;
            if s.gamma_steps < 1000 {
                return Err(CoreError::Config(format!(
                    "--gamma-steps must be >= 1000, got {}",
                    s.gamma_steps
                )));
            }
            if !s.energy.is_finite() {
                return Err(CoreError::Config(format!("--energy must be finite, got {}", s.energy)));
            }
        }
        ExperimentSpec::Probes(s) => {
            if s.p == 0 || s.p > cfg.n_channels() {
                return Err(CoreError::Config(format!(
                    "--p must lie in 1..={}, got {}",
                    cfg.n_channels(),
                    s.p
                )));
            }
            if s.steps < 1000 {
                return Err(CoreError::Config(format!("--steps must be >= 1000, got {}", s.steps)));
            }
            if s.n == 0 || s.trials == 0 {
                return Err(CoreError::Config("--n and --trials must be >= 1".into()));
            }
            require_positive("--eps", s.eps)?;
            require_positive("--delta", s.delta)?;
            if s.half_cells == 0 {
                return Err(CoreError::Config("--half-cells must be >= 1".into()));
            }
            if !s.energy.is_finite() {
                return Err(CoreError::Config(format!("--energy must be finite, got {}", s.energy)));
            }
        }
    }
    Ok(())
}

/// Execute a resolved spec into `out_dir`; returns the process exit code.
fn execute(spec: &ExperimentSpec, out_dir: &Path) -> Result<u8> {
    validate(spec)?;
    let started = Instant::now();
    let mut out = OutDir::create(out_dir)?;
    let tasks = spec.run(&mut out)?;
    let failed = tasks.iter().filter(|t| !t.is_ok()).count();
    let manifest = RunManifest {
        tool: format!("symplyap {}", env!("CARGO_PKG_VERSION")),
        spec: spec.clone(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        tasks,
        files: out.files().to_vec(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CoreError::Numeric(format!("serializing manifest: {e}")))?;
    let manifest_path = out.root().join("manifest.json");
    fs::write(&manifest_path, text + "\n")?;
    println!(
        "wrote {} ({} files, {} tasks, {failed} failed)",
        manifest_path.display(),
        manifest.files.len(),
        manifest.tasks.len()
    );
    Ok(if failed > 0 { 3 } else { 0 })
}

fn rerun(manifest_path: &Path, out_dir: &Path) -> Result<u8> {
    let old = RunManifest::load(manifest_path)?;
    let code = execute(&old.spec, out_dir)?;
    let mut mismatched = 0usize;
    for f in &old.files {
        let matches = fs::read(out_dir.join(&f.path))
            .map(|bytes| sha256_hex(&bytes) == f.sha256)
            .unwrap_or(false);
        println!("{} {}", if matches { "MATCH" } else { "MISMATCH" }, f.path);
        if !matches {
            mismatched += 1;
        }
    }
    if mismatched > 0 {
        eprintln!("{mismatched} file(s) differ from the manifest");
        return Ok(3);
    }
    println!("rerun reproduced {} file(s) byte-identically", old.files.len());
    Ok(code)
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    let Some(t) = threads else { return Ok(()) };
    if t == 0 {
        return Err(CoreError::Config("--threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(t)
        .build_global()
        .map_err(|e| CoreError::Config(format!("thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Rerun { manifest, out, threads } => {
            init_threads(threads)?;
            rerun(&manifest, &out)
        }
        Command::LyapunovSweep { common, energies, steps, reorth_every } => {
            init_threads(common.threads)?;
            let (cfg, config_text, seed) = load_config(&common)?;
            let energies = match energies {
                Some(raw) => parse_energy_grid(&raw)?,
                None => energy_window(&cfg)?.grid_interior(9),
            };
            let spec = ExperimentSpec::LyapunovSweep(LyapunovSweepSpec {
                config_text,
                energies,
                steps,
                reorth_every,
                seed,
            });
            execute(&spec, &common.out)
        }
        Command::Window { common } => {
            init_threads(common.threads)?;
            let (_, config_text, _) = load_config(&common)?;
            execute(&ExperimentSpec::Window(WindowSpec { config_text }), &common.out)
        }
        Command::LieCheck { common, n_max, energy } => {
            init_threads(common.threads)?;
            let (_, config_text, _) = load_config(&common)?;
            let spec = ExperimentSpec::LieCheck(LieCheckSpec { config_text, n_max, energy });
            execute(&spec, &common.out)
        }
        Command::Ids { common, energies, half_cells, holder } => {
            init_threads(common.threads)?;
            let (cfg, config_text, seed) = load_config(&common)?;
            let energies = match energies {
                Some(raw) => parse_energy_grid(&raw)?,
                None => {
                    let (lam_min, lam_max) = eigenvalue_extremes(&cfg)?;
                    linspace(lam_min - 0.5, lam_max + 3.0, 36)
                }
            };
            let holder = holder.map(|raw| parse_holder(&raw)).transpose()?;
            let spec = ExperimentSpec::Ids(IdsSpec {
                config_text,
                energies,
                half_cells,
                samples: common.trials.unwrap_or(32),
                seed,
                holder,
            });
            execute(&spec, &common.out)
        }
        Command::Wegner { common, energy, kappa, beta, half_cells_list } => {
            init_threads(common.threads)?;
            let (_, config_text, seed) = load_config(&common)?;
            let spec = ExperimentSpec::Wegner(WegnerSpec {
                config_text,
                energy,
                kappa,
                beta,
                half_cells: parse_usize_list(&half_cells_list)?,
                trials: common.trials.unwrap_or(400),
                seed,
            });
            execute(&spec, &common.out)
        }
        Command::GoodBox { common, energy, gamma, gamma_steps, half_cells_list } => {
            init_threads(common.threads)?;
            let (_, config_text, seed) = load_config(&common)?;
            let spec = ExperimentSpec::GoodBox(GoodBoxSpec {
                config_text,
                energy,
                gamma,
                gamma_steps,
                half_cells: parse_usize_list(&half_cells_list)?,
                trials: common.trials.unwrap_or(400),
                seed,
            });
            execute(&spec, &common.out)
        }
        Command::Decay { common, energy, half_cells, window_radius, gamma_steps } => {
            init_threads(common.threads)?;
            let (_, config_text, seed) = load_config(&common)?;
            let spec = ExperimentSpec::Decay(DecaySpec {
                config_text,
                energy,
                half_cells,
                window_radius,
                gamma_steps,
                seed,
            });
            execute(&spec, &common.out)
        }
        Command::Probes { common, energy, p, steps, n, eps, delta, half_cells } => {
            init_threads(common.threads)?;
            let (_, config_text, seed) = load_config(&common)?;
            let spec = ExperimentSpec::Probes(ProbesSpec {
                config_text,
                energy,
                p,
                steps,
                n,
                eps,
                delta,
                half_cells,
                trials: common.trials.unwrap_or(200),
                seed,
            });
            execute(&spec, &common.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
