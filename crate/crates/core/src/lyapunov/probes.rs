//! Monte Carlo probes of the probabilistic growth estimates: stationary
//! direction sampling, the large-deviation growth event, and negative
//! moments of the cocycle norm.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CoreError;
use crate::model::{rng, ModelConfig};
use crate::report::ProbeReport;
use crate::symplectic::wedge::wedge_dim;
use crate::tolerances::{BATCHES, DEFAULT_BURN_IN};
use crate::util::{mean_std, projective_distance, wilson_interval, Z95};
use crate::Result;

use super::{batch_lengths, wedge_lyapunov_sum, PatternTable};

/// Stationary-measure sample from the wedge cocycle: the ergodic growth
/// average plus the retained projective direction samples.
#[derive(Debug, Clone, Serialize)]
pub struct FurstenbergProbe {
    /// Ergodic average of `log(||Av|| / ||v||) / l`, an estimate of
    /// `g_1 + ... + g_p`.
    pub estimate: f64,
    pub stderr: f64,
    pub p: usize,
    pub steps: usize,
    pub burn_in: usize,
    pub energy: f64,
    pub cell_length: f64,
    pub seed: u64,
    /// Unit direction samples after burn-in, one per retained step.
    #[serde(skip)]
    pub directions: Vec<DVector<f64>>,
}

impl FurstenbergProbe {
    /// Principal direction of the sampled second-moment matrix.
    pub fn mode(&self) -> DVector<f64> {
        let dim = self.directions.first().map_or(0, |v| v.len());
        let mut second = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for v in &self.directions {
            second.ger(1.0, v, v, 1.0);
        }
        let eig = second.symmetric_eigen();
        let top = eig.eigenvalues.imax();
        eig.eigenvectors.column(top).into_owned()
    }

    /// Fraction of retained samples within projective distance `eps` of
    /// the mode direction.
    pub fn mode_mass(&self, eps: f64) -> f64 {
        if self.directions.is_empty() {
            return 0.0;
        }
        let mode = self.mode();
        let hits = self
            .directions
            .iter()
            .filter(|v| projective_distance(v, &mode) < eps)
            .count();
        hits as f64 / self.directions.len() as f64
    }
}

/// Evolve a projective point under the `p`-th wedge cocycle, discard a
/// burn-in prefix, and average the per-step log growth (per unit length).
pub fn furstenberg_integral_probe(
    cfg: &ModelConfig,
    energy: f64,
    p: usize,
    n_steps: usize,
    seed: u64,
) -> Result<FurstenbergProbe> {
    let n = cfg.n_channels();
    if p == 0 || p > n {
        return Err(CoreError::Guard(format!(
            "wedge order p must satisfy 1 <= p <= N = {n}, got {p}"
        )));
    }
    if n_steps < 1000 {
        return Err(CoreError::Guard(format!(
            "furstenberg_integral_probe needs n_steps >= 1000, got {n_steps}"
        )));
    }
    let burn_in = ((n_steps as f64) * DEFAULT_BURN_IN).round() as usize;
    let retained = n_steps - burn_in;
    let table = PatternTable::new(cfg, energy, p)?;
    let ell = cfg.cell_length();

    let mut v = DVector::zeros(wedge_dim(2 * n, p));
    v[0] = 1.0;
    let mut cell = 0i64;
    let mut step_once = |v: &mut DVector<f64>| -> Result<f64> {
        let omega = cfg.cell_disorder(seed, cell);
        cell += 1;
        let t = table.matrix(&omega)?;
        *v = &*t * &*v;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(CoreError::Numeric("wedge cocycle annihilated the tracked vector".into()));
        }
        *v /= norm;
        Ok(norm.ln())
    };

    for _ in 0..burn_in {
        step_once(&mut v)?;
    }
    let mut directions = Vec::with_capacity(retained);
    let mut batch_means = Vec::with_capacity(BATCHES);
    let mut total = 0.0;
    for len in batch_lengths(retained, BATCHES) {
        let mut acc = 0.0;
        for _ in 0..len {
            acc += step_once(&mut v)?;
            directions.push(v.clone());
        }
        total += acc;
        batch_means.push(acc / (len as f64 * ell));
    }
    let (_, sd) = mean_std(&batch_means);
    Ok(FurstenbergProbe {
        estimate: total / (retained as f64 * ell),
        stderr: sd / (BATCHES as f64).sqrt(),
        p,
        steps: n_steps,
        burn_in,
        energy,
        cell_length: ell,
        seed,
        directions,
    })
}

fn check_probe_vector(name: &str, x: &DVector<f64>, dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(CoreError::Guard(format!(
            "{name} must live in the wedge space of dimension {dim}, got length {}",
            x.len()
        )));
    }
    if (x.norm() - 1.0).abs() > 1e-8 {
        return Err(CoreError::Guard(format!("{name} must be a unit vector, norm = {}", x.norm())));
    }
    Ok(())
}

/// Accumulated log norm of the wedge cocycle applied to `x` over cells
/// `0..n` of the stream keyed by `trial_seed`; leaves the unit direction
/// in `v`.
fn evolve_log_norm(
    cfg: &ModelConfig,
    table: &PatternTable,
    x: &DVector<f64>,
    n: usize,
    trial_seed: u64,
    mut checkpoint: impl FnMut(usize, f64),
) -> Result<DVector<f64>> {
    let mut v = x.clone();
    let mut log_scale = 0.0;
    for k in 0..n {
        let omega = cfg.cell_disorder(trial_seed, k as i64);
        let t = table.matrix(&omega)?;
        v = &*t * v;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(CoreError::Numeric("cocycle annihilated the probe vector".into()));
        }
        v /= norm;
        log_scale += norm.ln();
        checkpoint(k + 1, log_scale);
    }
    Ok(v)
}

/// Frequency of the exponential-growth event
/// `|<(wedge^p U^(n)) x, y>| >= exp((g_1+...+g_p - eps) l n)`.
///
/// The reference partial sum is `gamma_sum` if supplied, otherwise
/// estimated from a calibration run of the wedge cocycle.
#[allow(clippy::too_many_arguments)]
pub fn large_deviation_probe(
    cfg: &ModelConfig,
    energy: f64,
    p: usize,
    n: usize,
    eps: f64,
    trials: u64,
    seed: u64,
    x: &DVector<f64>,
    y: &DVector<f64>,
    gamma_sum: Option<f64>,
) -> Result<ProbeReport> {
    let nch = cfg.n_channels();
    if p == 0 || p > nch {
        return Err(CoreError::Guard(format!(
            "wedge order p must satisfy 1 <= p <= N = {nch}, got {p}"
        )));
    }
    if n == 0 || trials == 0 {
        return Err(CoreError::Guard("large_deviation_probe needs n >= 1 and trials >= 1".into()));
    }
    let dim = wedge_dim(2 * nch, p);
    check_probe_vector("x", x, dim)?;
    check_probe_vector("y", y, dim)?;

    let gamma_ref = match gamma_sum {
        Some(g) => g,
        None => {
            let calib = wedge_lyapunov_sum(
                cfg,
                energy,
                p,
                20_000.max(10 * n),
                rng::task_key(seed, "ld-calibrate", 0),
            )?;
            calib.estimate
        }
    };
    let table = PatternTable::new(cfg, energy, p)?;
    let threshold = (gamma_ref - eps) * cfg.cell_length() * n as f64;

    let hits: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<bool> {
            let trial_seed = rng::task_key(seed, "large-deviation", t);
            let mut log_scale = 0.0;
            let v = evolve_log_norm(cfg, &table, x, n, trial_seed, |k, s| {
                if k == n {
                    log_scale = s;
                }
            })?;
            Ok(v.dot(y).abs().ln() + log_scale >= threshold)
        })
        .collect::<Result<Vec<bool>>>()?;
    let successes = hits.iter().filter(|h| **h).count() as u64;
    let (lo, hi) = wilson_interval(successes, trials);
    Ok(ProbeReport {
        probe: "large-deviation".into(),
        estimate: successes as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        trials,
        successes: Some(successes),
        seed,
        params: serde_json::json!({
            "energy": energy,
            "p": p,
            "n": n,
            "epsilon": eps,
            "gamma_sum": gamma_ref,
            "gamma_sum_supplied": gamma_sum.is_some(),
            "cell_length": cfg.cell_length(),
        }),
        extra: serde_json::Value::Null,
        warnings: Vec::new(),
    }
    .warn_if_underpowered(100))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Sample mean of `||wedge^p U^(n) x||^(-delta)` with a fitted per-step
/// decay rate.
///
/// The mean, its interval, and the per-checkpoint means are kept in log
/// space internally, so deep decay does not underflow before reporting.
/// `extra.xi1` is the fitted rate: `log-mean ~ -xi1 * k` over the
/// checkpoints `k`.
#[allow(clippy::too_many_arguments)]
pub fn negative_moment_probe(
    cfg: &ModelConfig,
    energy: f64,
    p: usize,
    delta: f64,
    n: usize,
    trials: u64,
    seed: u64,
    x: &DVector<f64>,
) -> Result<ProbeReport> {
    let nch = cfg.n_channels();
    if p == 0 || p > nch {
        return Err(CoreError::Guard(format!(
            "wedge order p must satisfy 1 <= p <= N = {nch}, got {p}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CoreError::Guard(format!("delta must be positive, got {delta}")));
    }
    if n == 0 || trials == 0 {
        return Err(CoreError::Guard("negative_moment_probe needs n >= 1 and trials >= 1".into()));
    }
    let dim = wedge_dim(2 * nch, p);
    check_probe_vector("x", x, dim)?;
    let table = PatternTable::new(cfg, energy, p)?;

    // Up to eight evenly spaced checkpoints ending at n.
    let mut checkpoints: Vec<usize> =
        (1..=8).map(|j| (j * n).div_ceil(8)).filter(|k| *k >= 1).collect();
    checkpoints.dedup();

    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let trial_seed = rng::task_key(seed, "negative-moment", t);
            let mut logs = Vec::with_capacity(checkpoints.len());
            evolve_log_norm(cfg, &table, x, n, trial_seed, |k, s| {
                if checkpoints.contains(&k) {
                    logs.push(-delta * s);
                }
            })?;
            Ok(logs)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let log_trials = (trials as f64).ln();
    let log_means: Vec<f64> = (0..checkpoints.len())
        .map(|j| {
            let col: Vec<f64> = per_trial.iter().map(|row| row[j]).collect();
            log_sum_exp(&col) - log_trials
        })
        .collect();
    let log_mean_final = *log_means.last().expect("at least one checkpoint");

    // Interval from the spread of group log-means around the full estimate.
    let groups = 8.min(trials as usize).max(1);
    let group_logs: Vec<f64> = (0..groups)
        .map(|g| {
            let lo = g * trials as usize / groups;
            let hi = (g + 1) * trials as usize / groups;
            let col: Vec<f64> =
                per_trial[lo..hi].iter().map(|row| *row.last().expect("nonempty")).collect();
            log_sum_exp(&col) - (col.len() as f64).ln()
        })
        .collect();
    let (_, group_sd) = mean_std(&group_logs);
    let half = Z95 * group_sd / (groups as f64).sqrt();

    let ks: Vec<f64> = checkpoints.iter().map(|k| *k as f64).collect();
    let xi1 = crate::util::fit_line(&ks, &log_means).map(|f| -f.slope);

    Ok(ProbeReport {
        probe: "negative-moment".into(),
        estimate: log_mean_final.exp(),
        ci_low: (log_mean_final - half).exp(),
        ci_high: (log_mean_final + half).exp(),
        trials,
        successes: None,
        seed,
        params: serde_json::json!({
            "energy": energy,
            "p": p,
            "delta": delta,
            "n": n,
            "cell_length": cfg.cell_length(),
        }),
        extra: serde_json::json!({
            "log_mean": log_mean_final,
            "xi1": xi1,
            "checkpoints": checkpoints,
            "log_means": log_means,
        }),
        warnings: Vec::new(),
    }
    .warn_if_underpowered(100))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hyperbolic_cfg(ell: f64) -> ModelConfig {
        ModelConfig::point_mass(1, ell, 0.0).unwrap()
    }

    fn diag_unit() -> DVector<f64> {
        DVector::from_vec(vec![std::f64::consts::FRAC_1_SQRT_2; 2])
    }

    #[test]
    fn furstenberg_recovers_hyperbolic_rate_and_mode() {
        let f = furstenberg_integral_probe(&hyperbolic_cfg(0.5), -1.0, 1, 100_000, 7).unwrap();
        assert!((f.estimate - 1.0).abs() < 1e-3, "estimate {}", f.estimate);
        // The invariant direction is (1,1)/sqrt(2); every retained sample
        // sits on it.
        assert!(f.mode_mass(0.1) > 0.9, "mass {}", f.mode_mass(0.1));
        let mode = f.mode();
        assert!(projective_distance(&mode, &diag_unit()) < 1e-6);
        assert_eq!(f.directions.len(), f.steps - f.burn_in);
    }

    #[test]
    fn furstenberg_agrees_with_wedge_sum() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let f = furstenberg_integral_probe(&cfg, 0.5, 1, 1 << 14, 23).unwrap();
        let w = wedge_lyapunov_sum(&cfg, 0.5, 1, 1 << 14, 23).unwrap();
        assert!(
            (f.estimate - w.estimate).abs() <= 3.0 * (f.stderr + w.stderr),
            "furstenberg {} vs wedge {}",
            f.estimate,
            w.estimate
        );
    }

    #[test]
    fn large_deviation_hyperbolic_event_is_certain() {
        // <T^n e_1, e_1> = cosh(nl) >= exp((1 - 0.5) l n) for moderate n.
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let r = large_deviation_probe(
            &hyperbolic_cfg(0.5),
            -1.0,
            1,
            100,
            0.5,
            200,
            3,
            &e1,
            &e1,
            Some(1.0),
        )
        .unwrap();
        assert_eq!(r.successes, Some(200));
        assert_eq!(r.estimate, 1.0);
        assert!(r.warnings.is_empty());
        assert!(r.ci_contains_estimate());
    }

    #[test]
    fn large_deviation_flags_small_trial_counts() {
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let r = large_deviation_probe(
            &hyperbolic_cfg(0.5),
            -1.0,
            1,
            20,
            0.5,
            50,
            3,
            &e1,
            &e1,
            Some(1.0),
        )
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn large_deviation_failures_shrink_with_n() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let x = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        let gamma = wedge_lyapunov_sum(&cfg, 0.5, 1, 1 << 14, 9).unwrap().estimate;
        let mut failures = Vec::new();
        for n in [50usize, 100, 200] {
            let r =
                large_deviation_probe(&cfg, 0.5, 1, n, 0.35, 400, 9, &x, &x, Some(gamma)).unwrap();
            failures.push(r.trials - r.successes.unwrap());
        }
        assert!(
            failures[0] >= failures[1] && failures[1] >= failures[2],
            "failures {failures:?}"
        );
    }

    #[test]
    fn negative_moment_hyperbolic_closed_form() {
        // x = (1,1)/sqrt(2) is the exact expanding direction:
        // ||T^n x|| = exp(n l), so the delta = 1 moment is exp(-n l).
        let cfg = hyperbolic_cfg(0.5);
        let x = diag_unit();
        let r = negative_moment_probe(&cfg, -1.0, 1, 1.0, 100, 16, 5, &x).unwrap();
        assert_relative_eq!(r.estimate, (-50.0f64).exp(), max_relative = 1e-9);
        let xi1 = r.extra["xi1"].as_f64().unwrap();
        assert_relative_eq!(xi1, 0.5, max_relative = 1e-9);
        assert!(r.ci_contains_estimate());
        assert_eq!(r.warnings.len(), 1, "16 trials is underpowered");
    }

    #[test]
    fn negative_moment_tiny_delta_is_unity() {
        let cfg = hyperbolic_cfg(0.5);
        let r = negative_moment_probe(&cfg, -1.0, 1, 1e-12, 50, 8, 5, &diag_unit()).unwrap();
        assert_relative_eq!(r.estimate, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn negative_moment_decays_for_bernoulli() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let r = negative_moment_probe(&cfg, 0.5, 1, 1.0, 200, 64, 11, &x).unwrap();
        let xi1 = r.extra["xi1"].as_f64().unwrap();
        assert!(xi1 > 0.0, "xi1 = {xi1}");
        let log_means: Vec<f64> =
            r.extra["log_means"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert!(log_means.windows(2).all(|w| w[1] < w[0]), "monotone decay {log_means:?}");
    }

    #[test]
    fn probe_vector_guards_fire() {
        let cfg = hyperbolic_cfg(0.5);
        let bad_dim = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(
            large_deviation_probe(&cfg, -1.0, 1, 10, 0.1, 10, 0, &bad_dim, &bad_dim, Some(1.0))
                .is_err()
        );
        let not_unit = DVector::from_vec(vec![2.0, 0.0]);
        assert!(negative_moment_probe(&cfg, -1.0, 1, 1.0, 10, 10, 0, &not_unit).is_err());
        assert!(negative_moment_probe(&cfg, -1.0, 1, 0.0, 10, 10, 0, &diag_unit()).is_err());
    }
}
