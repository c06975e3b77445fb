//! Box-level Monte Carlo probes: the Wegner distance event, the good-box
//! resolvent event, eigenfunction decay fits, and the solution-bound
//! checks backing the deterministic estimates.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::CoreError;
use crate::model::{build_site_matrix, rng, ModelConfig};
use crate::report::ProbeReport;
use crate::spectral::banded::BandedLu;
use crate::spectral::box_op::BoxOperator;
use crate::spectral::fd::eigenpair_near;
use crate::spectral::shooting::propagate_from_left;
use crate::tolerances::{DEFAULT_POINTS_PER_CELL, TOL_EIG};
use crate::util::{fit_line, spectral_norm, wilson_interval};
use crate::Result;

/// Minimum trials before a probe stops carrying a statistics warning.
const MIN_TRIALS: u64 = 100;

/// Frequency of the Wegner distance event
/// `d(E, spectrum) <= exp(-kappa (lL)^beta)` over sampled boxes.
pub fn wegner_probe(
    cfg: &ModelConfig,
    energy: f64,
    half_cells: usize,
    kappa: f64,
    beta: f64,
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(CoreError::Config(format!("beta must lie in (0,1), got {beta}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(CoreError::Config(format!("kappa must be positive, got {kappa}")));
    }
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    if half_cells == 0 {
        return Err(CoreError::Config("box half-length L must be >= 1".into()));
    }
    if trials == 0 {
        return Err(CoreError::Config("need at least one trial".into()));
    }
    let half_length = cfg.cell_length() * half_cells as f64;
    let threshold = (-kappa * half_length.powf(beta)).exp();

    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let b = BoxOperator::sample(
                cfg.clone(),
                half_cells,
                DEFAULT_POINTS_PER_CELL,
                rng::task_key(seed, "wegner", t),
            )?;
            let a = b.assemble();
            let below = a.count_below_robust(energy - threshold, TOL_EIG)?;
            let above = a.count_below_robust(energy + threshold, TOL_EIG)?;
            Ok(u64::from(above > below))
        })
        .collect::<Result<Vec<u64>>>()?
        .iter()
        .sum();

    let (lo, hi) = wilson_interval(hits, trials);
    Ok(ProbeReport {
        probe: "wegner".into(),
        estimate: hits as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        trials,
        successes: Some(hits),
        seed,
        params: json!({
            "energy": energy,
            "half_cells": half_cells,
            "kappa": kappa,
            "beta": beta,
            "threshold": threshold,
            "cell_length": cfg.cell_length(),
            "n_channels": cfg.n_channels(),
            "points_per_cell": DEFAULT_POINTS_PER_CELL,
        }),
        extra: serde_json::Value::Null,
        warnings: Vec::new(),
    }
    .warn_if_underpowered(MIN_TRIALS))
}

/// Outcome of the masked-resolvent evaluation on one realization.
enum BoxOutcome {
    Norm(f64),
    NearSpectrum,
    Singular,
}

/// Spectral norm of the out-of-box x middle-third resolvent block
/// `1^out (H - E)^{-1} 1^in`; fails on a singular factorization.
pub fn masked_resolvent_norm(box_op: &BoxOperator, energy: f64) -> Result<f64> {
    let a = box_op.assemble();
    let lu = BandedLu::factor_shifted(&a, energy)?;
    let in_idx = box_op.in_region_indices();
    let out_idx = box_op.out_region_indices();
    let mut block = DMatrix::zeros(out_idx.len(), in_idx.len());
    let mut col = vec![0.0; a.dim()];
    for (cj, &j) in in_idx.iter().enumerate() {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        lu.solve_in_place(&mut col);
        for (ri, &i) in out_idx.iter().enumerate() {
            block[(ri, cj)] = col[i];
        }
    }
    Ok(spectral_norm(&block))
}

fn good_box_outcome(box_op: &BoxOperator, energy: f64) -> Result<BoxOutcome> {
    let a = box_op.assemble();
    // The definition requires E off the spectrum; realizations with an
    // eigenvalue within the bisection tolerance count as not-good.
    let tol = TOL_EIG * energy.abs().max(1.0);
    let below = a.count_below_robust(energy - tol, TOL_EIG)?;
    let above = a.count_below_robust(energy + tol, TOL_EIG)?;
    if above > below {
        return Ok(BoxOutcome::NearSpectrum);
    }
    match masked_resolvent_norm(box_op, energy) {
        Ok(n) => Ok(BoxOutcome::Norm(n)),
        Err(CoreError::Numeric(_)) => Ok(BoxOutcome::Singular),
        Err(e) => Err(e),
    }
}

/// Frequency of the good-box event: masked resolvent norm below
/// `exp(-gamma l L / 3)`. Realizations with `E` within `tol_eig` of the
/// spectrum, or with a singular solve, count as not-good (the latter are
/// flagged in `extra`).
pub fn good_box_probe(
    cfg: &ModelConfig,
    energy: f64,
    gamma: f64,
    half_cells: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(CoreError::Config(format!("gamma must be positive, got {gamma}")));
    }
    if half_cells == 0 || half_cells % 3 != 0 {
        return Err(CoreError::Config(format!(
            "box half-length L must be a positive multiple of 3, got {half_cells}"
        )));
    }
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    if trials == 0 {
        return Err(CoreError::Config("need at least one trial".into()));
    }
    let half_length = cfg.cell_length() * half_cells as f64;
    let threshold = (-gamma * half_length / 3.0).exp();

    let outcomes: Vec<BoxOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let b = BoxOperator::sample(
                cfg.clone(),
                half_cells,
                DEFAULT_POINTS_PER_CELL,
                rng::task_key(seed, "good-box", t),
            )?;
            good_box_outcome(&b, energy)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut hits = 0u64;
    let mut near_spectrum = 0u64;
    let mut singular = 0u64;
    for o in &outcomes {
        match o {
            BoxOutcome::Norm(n) => hits += u64::from(*n <= threshold),
            BoxOutcome::NearSpectrum => near_spectrum += 1,
            BoxOutcome::Singular => singular += 1,
        }
    }
    let (lo, hi) = wilson_interval(hits, trials);
    let mut report = ProbeReport {
        probe: "good-box".into(),
        estimate: hits as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        trials,
        successes: Some(hits),
        seed,
        params: json!({
            "energy": energy,
            "gamma": gamma,
            "half_cells": half_cells,
            "threshold": threshold,
            "cell_length": cfg.cell_length(),
            "n_channels": cfg.n_channels(),
            "points_per_cell": DEFAULT_POINTS_PER_CELL,
        }),
        extra: json!({
            "near_spectrum": near_spectrum,
            "singular_solves": singular,
        }),
        warnings: Vec::new(),
    }
    .warn_if_underpowered(MIN_TRIALS);
    if singular > 0 {
        report.warnings.push(format!("{singular} singular solves counted not-good"));
    }
    Ok(report)
}

/// Eigenfunction decay profile: the eigenpair nearest the target, its
/// per-cell window norms, and the fitted exponential decay rate.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    /// Fitted decay rate (minus the log-norm slope per unit distance).
    pub m_hat: f64,
    pub eigenvalue: f64,
    pub r2: f64,
    /// Window centers and their log-norms (the full profile).
    pub centers: Vec<f64>,
    pub log_norms: Vec<f64>,
    /// Whether each window entered the fit (outside the central mass).
    pub included: Vec<bool>,
    #[serde(skip)]
    pub eigenvector: DVector<f64>,
}

/// Fit the exponential decay rate of the eigenfunction nearest
/// `energy_target`: least squares of window log-norm against distance
/// from the peak window, excluding the windows that carry the central 20%
/// of the profile mass.
pub fn eigenfunction_decay(
    box_op: &BoxOperator,
    energy_target: f64,
    window_radius: f64,
) -> Result<DecayFit> {
    let (eigenvalue, psi) = eigenpair_near(box_op, energy_target, window_radius)?;
    let centers = box_op.window_centers();
    let norms = box_op.window_norms(&psi);
    let peak = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("boxes have at least two windows");

    // Rank windows by distance from the peak; the nearest ones carrying
    // 20% of the total window mass are excluded from the tail fit.
    let total_mass: f64 = norms.iter().map(|n| n * n).sum();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&i, &j| {
        (centers[i] - centers[peak])
            .abs()
            .total_cmp(&(centers[j] - centers[peak]).abs())
    });
    let mut included = vec![true; norms.len()];
    let mut acc = 0.0;
    for &i in &order {
        if acc >= 0.2 * total_mass {
            break;
        }
        acc += norms[i] * norms[i];
        included[i] = false;
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..norms.len() {
        if included[i] && norms[i] > 0.0 {
            xs.push((centers[i] - centers[peak]).abs());
            ys.push(norms[i].ln());
        }
    }
    if xs.len() < 2 {
        return Err(CoreError::Resolution(
            "box too small: fewer than two windows outside the central mass".into(),
        ));
    }
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| CoreError::Numeric("degenerate abscissa in decay fit".into()))?;
    Ok(DecayFit {
        m_hat: -fit.slope,
        eigenvalue,
        r2: fit.r2,
        centers,
        log_norms: norms.iter().map(|n| n.max(f64::MIN_POSITIVE).ln()).collect(),
        included,
        eigenvector: psi,
    })
}

/// The constructive constants of the local L^2 lower bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundConstants {
    /// `||V||_{l,u} = l * max_cell ||M_cell(E)||` (sliding-window L^1 norm
    /// of the piecewise-constant site matrix).
    pub v_norm: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Final constant `C = C3^2/16 * min(2l, C3/(2 C4))`.
    pub c: f64,
}

/// Compute the constructive constants for this box at `energy`.
pub fn bound_constants(box_op: &BoxOperator, energy: f64) -> Result<BoundConstants> {
    let l = box_op.cfg().cell_length();
    let mut worst = 0.0_f64;
    for cell in 0..2 * box_op.half_cells() {
        let m = build_site_matrix(box_op.cfg(), box_op.cell_omega(cell), energy)?;
        worst = worst.max(m.symmetric_eigen().eigenvalues.amax());
    }
    let v_norm = l * worst;
    let c1 = (-2.0 - 2.0 * v_norm).exp();
    let c2 = (2.0 + 2.0 * v_norm).exp();
    let c3 = (c1 / 2.0).sqrt();
    let c4 = (2.0 * c2).sqrt();
    let c = c3 * c3 / 16.0 * (2.0 * l).min(c3 / (2.0 * c4));
    Ok(BoundConstants { v_norm, c1, c2, c3, c4, c })
}

/// Exact integral `int_x^y ||M_cell(E) + I|| dt` of the piecewise-constant
/// envelope between two positions in the box (the growth exponent of the
/// first bound).
pub fn gronwall_exponent(box_op: &BoxOperator, energy: f64, x: f64, y: f64) -> Result<f64> {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let half = box_op.half_length();
    if lo < -half - 1e-9 || hi > half + 1e-9 {
        return Err(CoreError::Config(format!(
            "positions [{lo}, {hi}] leave the box [-{half}, {half}]"
        )));
    }
    let l = box_op.cfg().cell_length();
    let mut total = 0.0;
    for cell in 0..2 * box_op.half_cells() {
        let c_lo = -half + cell as f64 * l;
        let c_hi = c_lo + l;
        let overlap = (hi.min(c_hi) - lo.max(c_lo)).max(0.0);
        if overlap > 0.0 {
            let mut m = build_site_matrix(box_op.cfg(), box_op.cell_omega(cell), energy)?;
            for i in 0..m.nrows() {
                m[(i, i)] += 1.0;
            }
            total += overlap * m.symmetric_eigen().eigenvalues.amax();
        }
    }
    Ok(total)
}

/// Outcome of the solution-bound sweep: both inequalities evaluated on
/// random solutions at random positions.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckReport {
    pub trials: u64,
    /// Violations of the energy-growth (Gronwall) bound.
    pub violations_growth: u64,
    /// Violations of the local L^2 lower bound.
    pub violations_local: u64,
    /// Smallest observed ratio bound/actual (margin >= 1 means safe).
    pub margin_growth: f64,
    pub margin_local: f64,
    pub constants: BoundConstants,
    pub energy: f64,
    pub seed: u64,
    pub pass: bool,
}

/// Check both solution bounds on `trials` random solutions of this box:
/// the pointwise energy-growth bound at random position pairs and the
/// local L^2 lower bound at random interior positions, with the constant
/// computed from the constructive constants.
pub fn solution_bound_check(
    box_op: &BoxOperator,
    energy: f64,
    trials: u64,
    seed: u64,
) -> Result<BoundCheckReport> {
    if trials == 0 {
        return Err(CoreError::Config("need at least one trial".into()));
    }
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    let constants = bound_constants(box_op, energy)?;
    // The trapezoid quadrature must resolve the fastest local growth rate
    // sqrt(||M||): require a few points per e-fold.
    let h = box_op.grid_step();
    let rate = 1.0 + (constants.v_norm / box_op.cfg().cell_length()).sqrt();
    if h * rate > 0.5 {
        return Err(CoreError::Resolution(format!(
            "grid step {h:.4} too coarse for local growth rate {rate:.3}; refine the mesh"
        )));
    }
    let n = box_op.cfg().n_channels();
    let m = box_op.points_per_cell();
    let half = box_op.half_length();
    let n_samples = 2 * box_op.half_cells() * m + 1;

    struct TrialOut {
        growth_violations: u64,
        local_violations: u64,
        margin_growth: f64,
        margin_local: f64,
    }

    let results: Vec<TrialOut> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialOut> {
            let mut r = rng::task_rng(seed, "solution-bound", t);
            // Random unit initial data [u; u'] at the left end.
            let data = DMatrix::from_fn(2 * n, 1, |_, _| crate::util::normal_draw(&mut r));
            let scale = data.norm();
            let data = data / scale.max(f64::MIN_POSITIVE);
            let states = propagate_from_left(box_op, energy, &data)?;
            let energy_at = |i: usize| -> f64 { states[i].norm_squared() };
            let u_sq = |i: usize| -> f64 {
                states[i].view((0, 0), (n, 1)).norm_squared()
            };
            let x_of = |i: usize| -> f64 { -half + i as f64 * h };

            let mut out = TrialOut {
                growth_violations: 0,
                local_violations: 0,
                margin_growth: f64::INFINITY,
                margin_local: f64::INFINITY,
            };
            use rand::Rng;
            for _ in 0..8 {
                let i = r.random_range(0..n_samples);
                let j = r.random_range(0..n_samples);
                if i == j {
                    continue;
                }
                let lhs = energy_at(i);
                let rhs = energy_at(j) * gronwall_exponent(box_op, energy, x_of(i), x_of(j))?.exp();
                if lhs > rhs * (1.0 + 1e-10) {
                    out.growth_violations += 1;
                }
                if lhs > 0.0 {
                    out.margin_growth = out.margin_growth.min(rhs / lhs);
                }
            }
            for _ in 0..4 {
                // x with [x - l, x + l] inside the box: skip the outermost cell
                // on each side.
                let i = r.random_range(m..n_samples - m);
                let mut quad = 0.0;
                for k in (i - m)..=(i + m) {
                    let w = if k == i - m || k == i + m { 0.5 } else { 1.0 };
                    quad += w * u_sq(k);
                }
                quad *= h;
                let rhs = constants.c * energy_at(i);
                if quad < rhs * (1.0 - 1e-10) {
                    out.local_violations += 1;
                }
                if rhs > 0.0 {
                    out.margin_local = out.margin_local.min(quad / rhs);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = BoundCheckReport {
        trials,
        violations_growth: 0,
        violations_local: 0,
        margin_growth: f64::INFINITY,
        margin_local: f64::INFINITY,
        constants,
        energy,
        seed,
        pass: false,
    };
    for r in &results {
        report.violations_growth += r.growth_violations;
        report.violations_local += r.local_violations;
        report.margin_growth = report.margin_growth.min(r.margin_growth);
        report.margin_local = report.margin_local.min(r.margin_local);
    }
    report.pass = report.violations_growth == 0 && report.violations_local == 0;
    Ok(report)
}
