//! Resolved experiment specifications. A spec carries everything a run
//! needs (config text, parameters, master seed), serializes into the
//! manifest, and can be re-executed from it verbatim.

use serde::{Deserialize, Serialize};
use symplyap_core::model::parse_config_str;
use symplyap_core::{ModelConfig, Result};

use crate::commands;
use crate::output::{OutDir, TaskRecord};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovSweepSpec {
    pub config_text: String,
    pub energies: Vec<f64>,
    pub steps: usize,
    pub reorth_every: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowSpec {
    pub config_text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LieCheckSpec {
    pub config_text: String,
    pub n_max: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdsSpec {
    pub config_text: String,
    pub energies: Vec<f64>,
    pub half_cells: usize,
    pub samples: u64,
    pub seed: u64,
    /// Optional `[lo, hi]` subinterval for a Holder-exponent fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WegnerSpec {
    pub config_text: String,
    pub energy: f64,
    pub kappa: f64,
    pub beta: f64,
    pub half_cells: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoodBoxSpec {
    pub config_text: String,
    pub energy: f64,
    /// Decay rate for the resolvent threshold; calibrated from the top
    /// Lyapunov exponent when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub gamma_steps: usize,
    pub half_cells: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecaySpec {
    pub config_text: String,
    pub energy: f64,
    pub half_cells: usize,
    pub window_radius: f64,
    pub gamma_steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbesSpec {
    pub config_text: String,
    pub energy: f64,
    pub p: usize,
    pub steps: usize,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub half_cells: usize,
    pub trials: u64,
    pub seed: u64,
}

/// One fully resolved experiment, tagged by command name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    LyapunovSweep(LyapunovSweepSpec),
    Window(WindowSpec),
    LieCheck(LieCheckSpec),
    Ids(IdsSpec),
    Wegner(WegnerSpec),
    GoodBox(GoodBoxSpec),
    Decay(DecaySpec),
    Probes(ProbesSpec),
}

impl ExperimentSpec {
    pub fn config_text(&self) -> &str {
        match self {
            Self::LyapunovSweep(s) => &s.config_text,
            Self::Window(s) => &s.config_text,
            Self::LieCheck(s) => &s.config_text,
            Self::Ids(s) => &s.config_text,
            Self::Wegner(s) => &s.config_text,
            Self::GoodBox(s) => &s.config_text,
            Self::Decay(s) => &s.config_text,
            Self::Probes(s) => &s.config_text,
        }
    }

    pub fn config(&self) -> Result<ModelConfig> {
        parse_config_str(self.config_text())
    }

    /// Execute the experiment, emitting files into `out`. Usage-class
    /// errors abort; numerical failures mark their task failed.
    pub fn run(&self, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
        let cfg = self.config()?;
        match self {
            Self::LyapunovSweep(s) => commands::lyapunov::run(s, &cfg, out),
            Self::Window(s) => commands::window::run(s, &cfg, out),
            Self::LieCheck(s) => commands::lie::run(s, &cfg, out),
            Self::Ids(s) => commands::ids::run(s, &cfg, out),
            Self::Wegner(s) => commands::wegner::run(s, &cfg, out),
            Self::GoodBox(s) => commands::goodbox::run(s, &cfg, out),
            Self::Decay(s) => commands::decay::run(s, &cfg, out),
            Self::Probes(s) => commands::probes::run(s, &cfg, out),
        }
    }
}

/// Run one named task, folding a numerical failure into the record list
/// instead of aborting the whole experiment.
pub fn run_task<T>(
    records: &mut Vec<TaskRecord>,
    name: &str,
    f: impl FnOnce() -> Result<T>,
) -> Option<T> {
    match f() {
        Ok(v) => {
            records.push(TaskRecord::ok(name));
            Some(v)
        }
        Err(e) => {
            eprintln!("task {name} failed: {e}");
            records.push(TaskRecord::failed(name, &e));
            None
        }
    }
}
