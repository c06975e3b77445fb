//! Integrated density of states from box eigenvalue counting, and the
//! Hölder-exponent fit on the resulting curves.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::CoreError;
use crate::model::{rng, ModelConfig};
use crate::spectral::box_op::BoxOperator;
use crate::tolerances::{DEFAULT_POINTS_PER_CELL, TOL_EIG};
use crate::util::{mean_std, Z95};
use crate::Result;

/// Empirical integrated density of states `N(E)`: eigenvalue counts per
/// unit length, averaged over disorder realizations.
#[derive(Debug, Clone, Serialize)]
pub struct IDSCurve {
    pub energies: Vec<f64>,
    /// Mean of `count(E) / (2 l L)` over realizations (states per length).
    pub values: Vec<f64>,
    /// Normal 95% half-width per grid point (zero for a single sample).
    pub ci_half: Vec<f64>,
    pub half_cells: usize,
    pub samples: u64,
    pub points_per_cell: usize,
    pub cell_length: f64,
    pub seed: u64,
}

impl IDSCurve {
    /// Build a curve from explicit values (no sampling metadata), e.g.
    /// closed forms in tests; CI zero.
    pub fn from_values(energies: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if energies.len() != values.len() || energies.is_empty() {
            return Err(CoreError::Config("curve needs matching nonempty grids".into()));
        }
        let n = energies.len();
        Ok(Self {
            energies,
            values,
            ci_half: vec![0.0; n],
            half_cells: 0,
            samples: 0,
            points_per_cell: 0,
            cell_length: 0.0,
            seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

fn validate_grid(energies: &[f64]) -> Result<()> {
    if energies.is_empty() {
        return Err(CoreError::Config("energy grid must be nonempty".into()));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(CoreError::Config("energy grid must be finite".into()));
    }
    if energies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::Config("energy grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Monte Carlo IDS on boxes of `2 L` cells: per realization the counting
/// function divided by the box length, averaged over `samples` draws keyed
/// `(seed, "ids", sample)`.
pub fn ids_estimate(
    cfg: &ModelConfig,
    energies: &[f64],
    half_cells: usize,
    samples: u64,
    seed: u64,
) -> Result<IDSCurve> {
    validate_grid(energies)?;
    if samples == 0 {
        return Err(CoreError::Config("need at least one sample".into()));
    }
    if half_cells == 0 {
        return Err(CoreError::Config("box half-length L must be >= 1".into()));
    }
    let length = 2.0 * cfg.cell_length() * half_cells as f64;

    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let task_seed = rng::task_key(seed, "ids", s);
            let b = BoxOperator::sample(cfg.clone(), half_cells, DEFAULT_POINTS_PER_CELL, task_seed)?;
            let a = b.assemble();
            let mut vals = Vec::with_capacity(energies.len());
            let mut running = 0usize;
            for &e in energies {
                // The robust counter may perturb a shift past a neighbor
                // grid point; clamp to keep the staircase monotone.
                running = running.max(a.count_below_robust(e, TOL_EIG)?);
                vals.push(running as f64 / length);
            }
            Ok(vals)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = Vec::with_capacity(energies.len());
    let mut ci_half = Vec::with_capacity(energies.len());
    for k in 0..energies.len() {
        let col: Vec<f64> = per_sample.iter().map(|v| v[k]).collect();
        let (mean, sd) = mean_std(&col);
        values.push(mean);
        ci_half.push(if samples > 1 { Z95 * sd / (samples as f64).sqrt() } else { 0.0 });
    }
    Ok(IDSCurve {
        energies: energies.to_vec(),
        values,
        ci_half,
        half_cells,
        samples,
        points_per_cell: DEFAULT_POINTS_PER_CELL,
        cell_length: cfg.cell_length(),
        seed,
    })
}

/// Result of the Hölder-modulus regression `|N(E) - N(E')| ~ C |E - E'|^a`.
#[derive(Debug, Clone, Serialize)]
pub struct HolderFit {
    /// Fitted exponent (the log-log slope).
    pub alpha: f64,
    /// Fitted prefactor `C`.
    pub constant: f64,
    pub r2: f64,
    /// Number of (lag, modulus) points entering the fit.
    pub points: usize,
    /// True when the curve is flat on the subinterval (no increments).
    pub degenerate: bool,
}

/// Fit the Hölder exponent of `curve` on `[lo, hi]`: for each dyadic lag
/// (capped at an eighth of the subgrid, so local scaling dominates) take
/// the largest increment `max_i |N(E_{i+lag}) - N(E_i)|` and regress its
/// log against the log of the lag's energy separation.
pub fn holder_fit(curve: &IDSCurve, lo: f64, hi: f64) -> Result<HolderFit> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(CoreError::Config(format!("bad fit subinterval [{lo}, {hi}]")));
    }
    let idx: Vec<usize> = (0..curve.len())
        .filter(|&i| curve.energies[i] >= lo && curve.energies[i] <= hi)
        .collect();
    if idx.len() < 10 {
        return Err(CoreError::Config(format!(
            "need at least 10 grid points in the subinterval, got {}",
            idx.len()
        )));
    }
    let es: Vec<f64> = idx.iter().map(|&i| curve.energies[i]).collect();
    let ns: Vec<f64> = idx.iter().map(|&i| curve.values[i]).collect();
    let n = es.len();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lag = 1usize;
    let cap = ((n - 1) / 8).max(1);
    while lag <= cap {
        let mut modulus = 0.0_f64;
        let mut sep = 0.0;
        for i in 0..n - lag {
            modulus = modulus.max((ns[i + lag] - ns[i]).abs());
            sep += es[i + lag] - es[i];
        }
        sep /= (n - lag) as f64;
        if modulus > 0.0 {
            xs.push(sep.ln());
            ys.push(modulus.ln());
        }
        lag *= 2;
    }
    if xs.len() < 2 {
        return Ok(HolderFit { alpha: 0.0, constant: 0.0, r2: 0.0, points: xs.len(), degenerate: true });
    }
    let fit = crate::util::fit_line(&xs, &ys)
        .ok_or_else(|| CoreError::Numeric("degenerate abscissa in Hölder fit".into()))?;
    Ok(HolderFit {
        alpha: fit.slope,
        constant: fit.intercept.exp(),
        r2: fit.r2,
        points: xs.len(),
        degenerate: false,
    })
}
