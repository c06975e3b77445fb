//! Model configuration, disorder sampling, site/transfer matrices, and the
//! admissible energy window.
//!
//! The operator acts on `L^2(R) (x) R^N`: a free Laplacian plus a fixed
//! inter-channel hopping `V0` (ones on the first off-diagonals) plus, on the
//! `n`-th cell `[l n, l(n+1)]`, the diagonal potential
//! `diag(c_1 w_1, ..., c_N w_N)` with the cell's disorder vector `w` drawn
//! coordinatewise from the single-site law.
//!
//! At energy `E` the site matrix of a cell is `M_w(E) = V0 + diag(c w) - E I`
//! and the cell transfer matrix is `exp(l * [[0, I], [M_w(E), 0]])`, which
//! propagates Cauchy data `(u, u')` across the cell.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::CoreError;
use crate::symplectic::{matrix_exponential, SymplecticMatrix};
use crate::tolerances::{ADMISSIBILITY_SLACK, MAX_ENUM_CHANNELS};
use crate::Result;

pub mod config_file;
pub mod rng;

pub use config_file::{parse_config_file, parse_config_str, to_config_string};

/// Validated model parameters.
///
/// Invariants enforced at construction: `n_channels >= 1`; `cell_length > 0`
/// finite; exactly `n_channels` finite couplings; the support contains both
/// `0` and `1` with distinct finite atoms; weights are nonnegative and sum
/// to one within `1e-12`; `log_chart_radius > 0`.
///
/// Couplings are allowed to vanish (a zero coupling makes that channel's
/// disorder inert, e.g. the free comparison operator); the full-closure
/// property of the cell generators requires them nonzero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    n_channels: usize,
    cell_length: f64,
    couplings: Vec<f64>,
    disorder_support: Vec<f64>,
    disorder_weights: Vec<f64>,
    log_chart_radius: f64,
    seed: u64,
}

impl ModelConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_channels: usize,
        cell_length: f64,
        couplings: Vec<f64>,
        disorder_support: Vec<f64>,
        disorder_weights: Vec<f64>,
        log_chart_radius: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_channels == 0 {
            return Err(CoreError::Config("n_channels must be >= 1".into()));
        }
        if !(cell_length.is_finite() && cell_length > 0.0) {
            return Err(CoreError::Config(format!(
                "cell_length must be positive and finite, got {cell_length}"
            )));
        }
        if couplings.len() != n_channels {
            return Err(CoreError::Config(format!(
                "couplings must list n_channels = {n_channels} values, got {}",
                couplings.len()
            )));
        }
        if let Some(bad) = couplings.iter().find(|c| !c.is_finite()) {
            return Err(CoreError::Config(format!("couplings must be finite, got {bad}")));
        }
        if disorder_support.is_empty() {
            return Err(CoreError::Config("disorder_support must be nonempty".into()));
        }
        if let Some(bad) = disorder_support.iter().find(|v| !v.is_finite()) {
            return Err(CoreError::Config(format!("disorder_support must be finite, got {bad}")));
        }
        for (i, a) in disorder_support.iter().enumerate() {
            if disorder_support[..i].contains(a) {
                return Err(CoreError::Config(format!("disorder_support has duplicate atom {a}")));
            }
        }
        for needed in [0.0, 1.0] {
            if !disorder_support.contains(&needed) {
                return Err(CoreError::Config(format!(
                    "disorder_support must contain {needed} (corner configurations)"
                )));
            }
        }
        if disorder_weights.len() != disorder_support.len() {
            return Err(CoreError::Config(format!(
                "disorder_weights must match disorder_support ({} atoms), got {}",
                disorder_support.len(),
                disorder_weights.len()
            )));
        }
        if let Some(bad) = disorder_weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(CoreError::Config(format!(
                "disorder_weights must be nonnegative, got {bad}"
            )));
        }
        let total: f64 = disorder_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CoreError::Config(format!(
                "disorder_weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        if !(log_chart_radius.is_finite() && log_chart_radius > 0.0) {
            return Err(CoreError::Config(format!(
                "log_chart_radius must be positive and finite, got {log_chart_radius}"
            )));
        }
        Ok(Self {
            n_channels,
            cell_length,
            couplings,
            disorder_support,
            disorder_weights,
            log_chart_radius,
            seed,
        })
    }

    /// Symmetric Bernoulli disorder on `{0, 1}`, unit couplings, `d = 1`.
    pub fn bernoulli(n_channels: usize, cell_length: f64) -> Result<Self> {
        Self::new(
            n_channels,
            cell_length,
            vec![1.0; n_channels],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            1.0,
            0,
        )
    }

    /// Deterministic disorder: every cell equals `omega` in each channel.
    ///
    /// `omega` must be 0 or 1 (the weight is concentrated on that atom).
    pub fn point_mass(n_channels: usize, cell_length: f64, omega: f64) -> Result<Self> {
        let weights = if omega == 0.0 {
            vec![1.0, 0.0]
        } else if omega == 1.0 {
            vec![0.0, 1.0]
        } else {
            return Err(CoreError::Config(format!("point_mass omega must be 0 or 1, got {omega}")));
        };
        Self::new(
            n_channels,
            cell_length,
            vec![1.0; n_channels],
            vec![0.0, 1.0],
            weights,
            1.0,
            0,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_couplings(mut self, couplings: Vec<f64>) -> Result<Self> {
        if couplings.len() != self.n_channels {
            return Err(CoreError::Config(format!(
                "couplings must list n_channels = {} values, got {}",
                self.n_channels,
                couplings.len()
            )));
        }
        if let Some(bad) = couplings.iter().find(|c| !c.is_finite()) {
            return Err(CoreError::Config(format!("couplings must be finite, got {bad}")));
        }
        self.couplings = couplings;
        Ok(self)
    }

    pub fn with_log_chart_radius(mut self, d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(CoreError::Config(format!(
                "log_chart_radius must be positive and finite, got {d}"
            )));
        }
        self.log_chart_radius = d;
        Ok(self)
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn disorder_support(&self) -> &[f64] {
        &self.disorder_support
    }

    pub fn disorder_weights(&self) -> &[f64] {
        &self.disorder_weights
    }

    pub fn log_chart_radius(&self) -> f64 {
        self.log_chart_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw one single-site value from the disorder law.
    fn draw_value<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (v, w) in self.disorder_support.iter().zip(&self.disorder_weights) {
            cum += w;
            if u < cum {
                return *v;
            }
        }
        *self.disorder_support.last().expect("support nonempty")
    }

    /// Disorder vector of cell `n`, keyed by `(seed, n)`.
    pub fn cell_disorder(&self, seed: u64, cell: i64) -> Vec<f64> {
        let mut r = rng::cell_rng(seed, cell);
        (0..self.n_channels).map(|_| self.draw_value(&mut r)).collect()
    }
}

/// A sampled (or explicitly constructed) block of consecutive cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    first_cell: i64,
    cells: Vec<Vec<f64>>,
}

impl DisorderRealization {
    /// Explicit construction; every cell must list `n_channels` values.
    pub fn from_cells(first_cell: i64, cells: Vec<Vec<f64>>, n_channels: usize) -> Result<Self> {
        if cells.is_empty() {
            return Err(CoreError::Config("realization needs at least one cell".into()));
        }
        for (k, c) in cells.iter().enumerate() {
            if c.len() != n_channels {
                return Err(CoreError::Config(format!(
                    "cell {} must list {n_channels} channel values, got {}",
                    first_cell + k as i64,
                    c.len()
                )));
            }
        }
        Ok(Self { first_cell, cells })
    }

    pub fn first_cell(&self) -> i64 {
        self.first_cell
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn last_cell_exclusive(&self) -> i64 {
        self.first_cell + self.cells.len() as i64
    }

    pub fn cell(&self, idx: i64) -> &[f64] {
        let off = idx - self.first_cell;
        assert!(
            off >= 0 && (off as usize) < self.cells.len(),
            "cell {idx} outside realization [{}, {})",
            self.first_cell,
            self.last_cell_exclusive()
        );
        &self.cells[off as usize]
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }
}

/// Sample cells `first..last` (half-open) from the counter-based stream.
pub fn sample_realization(
    cfg: &ModelConfig,
    first_cell: i64,
    last_cell: i64,
    seed: u64,
) -> Result<DisorderRealization> {
    if last_cell <= first_cell {
        return Err(CoreError::Config(format!(
            "cell range [{first_cell}, {last_cell}) is empty"
        )));
    }
    let cells = (first_cell..last_cell).map(|n| cfg.cell_disorder(seed, n)).collect();
    Ok(DisorderRealization { first_cell, cells })
}

/// The fixed hopping matrix: ones on the first off-diagonals.
pub fn v0_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
        m[(i + 1, i)] = 1.0;
    }
    m
}

/// Site matrix `M_w(E) = V0 + diag(c w) - E I` of one cell.
pub fn build_site_matrix(cfg: &ModelConfig, omega: &[f64], energy: f64) -> Result<DMatrix<f64>> {
    let n = cfg.n_channels();
    if omega.len() != n {
        return Err(CoreError::Guard(format!(
            "disorder vector must list {n} values, got {}",
            omega.len()
        )));
    }
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    let mut m = v0_matrix(n);
    for i in 0..n {
        m[(i, i)] += cfg.couplings()[i] * omega[i] - energy;
    }
    Ok(m)
}

/// Cell transfer matrix `exp(l [[0, I], [M_w(E), 0]])`.
pub fn transfer_matrix(cfg: &ModelConfig, omega: &[f64], energy: f64) -> Result<SymplecticMatrix> {
    let site = build_site_matrix(cfg, omega, energy)?;
    matrix_exponential(&site, cfg.cell_length())
}

/// `||X_w(E)|| = max(1, max_i |lam_i - E|)` with `lam_i` the eigenvalues of
/// `M_w(0)`: the generator's singular values are 1 (N-fold) and `|lam_i - E|`.
pub fn generator_norm(cfg: &ModelConfig, omega: &[f64], energy: f64) -> Result<f64> {
    let site0 = build_site_matrix(cfg, omega, 0.0)?;
    let eig = site0.symmetric_eigen();
    let worst = eig.eigenvalues.iter().map(|l| (l - energy).abs()).fold(0.0_f64, f64::max);
    Ok(worst.max(1.0))
}

/// Admissible energy window data for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyWindow {
    /// Window `[lo, hi] = [lam_max - d/l, lam_min + d/l]`.
    pub lo: f64,
    pub hi: f64,
    /// Extreme eigenvalues of `M_w(0)` over corner configurations.
    pub lam_min: f64,
    pub lam_max: f64,
    /// Half-spread `(lam_max - lam_min)/2`.
    pub delta0: f64,
    /// Critical cell length `min(1, d/delta0)`.
    pub critical_length: f64,
}

impl EnergyWindow {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e <= self.hi
    }

    /// `k` evenly spaced energies covering the window (endpoints included).
    pub fn grid(&self, k: usize) -> Vec<f64> {
        crate::util::linspace(self.lo, self.hi, k)
    }

    /// `k` evenly spaced interior energies (endpoints excluded).
    pub fn grid_interior(&self, k: usize) -> Vec<f64> {
        let full = crate::util::linspace(self.lo, self.hi, k + 2);
        full[1..=k].to_vec()
    }
}

/// Extreme eigenvalues of `M_w(0)` over the corner configurations
/// `w in {0,1}^N`. Enumerates `2^N` corners; guarded at `N <= 20`.
pub fn eigenvalue_extremes(cfg: &ModelConfig) -> Result<(f64, f64)> {
    let n = cfg.n_channels();
    if n > MAX_ENUM_CHANNELS {
        return Err(CoreError::Guard(format!(
            "corner enumeration grows as 2^N; refusing N = {n} > {MAX_ENUM_CHANNELS}"
        )));
    }
    let mut lam_min = f64::INFINITY;
    let mut lam_max = f64::NEG_INFINITY;
    let mut omega = vec![0.0; n];
    for mask in 0u64..(1 << n) {
        for (i, w) in omega.iter_mut().enumerate() {
            *w = if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
        }
        let site = build_site_matrix(cfg, &omega, 0.0)?;
        let eig = site.symmetric_eigen();
        for l in eig.eigenvalues.iter() {
            lam_min = lam_min.min(*l);
            lam_max = lam_max.max(*l);
        }
    }
    Ok((lam_min, lam_max))
}

/// The admissible window `[lam_max - d/l, lam_min + d/l]`.
///
/// Nonempty iff `delta0 < d/l`; otherwise [`CoreError::EmptyWindow`].
pub fn energy_window(cfg: &ModelConfig) -> Result<EnergyWindow> {
    let (lam_min, lam_max) = eigenvalue_extremes(cfg)?;
    let delta0 = 0.5 * (lam_max - lam_min);
    let ratio = cfg.log_chart_radius() / cfg.cell_length();
    if delta0 >= ratio {
        return Err(CoreError::EmptyWindow { delta0, ratio });
    }
    let critical_length =
        if delta0 > 0.0 { (cfg.log_chart_radius() / delta0).min(1.0) } else { 1.0 };
    Ok(EnergyWindow {
        lo: lam_max - ratio,
        hi: lam_min + ratio,
        lam_min,
        lam_max,
        delta0,
        critical_length,
    })
}

/// Result of the admissibility check at a given energy.
#[derive(Debug, Clone, Serialize)]
pub struct NormBound {
    /// `l * max_w ||X_w(E)||` over corner configurations.
    pub worst: f64,
    /// The corner attaining the maximum.
    pub worst_corner: Vec<u8>,
    /// Whether `l * ||X_w(E)|| <= d` holds for every corner.
    pub admissible: bool,
}

/// Check `l * max(1, max_i |lam_i^w - E|) <= d` over all corners
/// `w in {0,1}^N` (with a relative slack of [`ADMISSIBILITY_SLACK`] so
/// window endpoints computed in floating point pass).
pub fn norm_bound_check(cfg: &ModelConfig, energy: f64) -> Result<NormBound> {
    let n = cfg.n_channels();
    if n > MAX_ENUM_CHANNELS {
        return Err(CoreError::Guard(format!(
            "corner enumeration grows as 2^N; refusing N = {n} > {MAX_ENUM_CHANNELS}"
        )));
    }
    let mut worst = 0.0_f64;
    let mut worst_corner = vec![0u8; n];
    let mut omega = vec![0.0; n];
    for mask in 0u64..(1 << n) {
        for (i, w) in omega.iter_mut().enumerate() {
            *w = if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
        }
        let nrm = cfg.cell_length() * generator_norm(cfg, &omega, energy)?;
        if nrm > worst {
            worst = nrm;
            for (i, wc) in worst_corner.iter_mut().enumerate() {
                *wc = (mask >> i & 1) as u8;
            }
        }
    }
    let d = cfg.log_chart_radius();
    Ok(NormBound { worst, worst_corner, admissible: worst <= d * (1.0 + ADMISSIBILITY_SLACK) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn validation_rejects_bad_inputs() {
        assert!(ModelConfig::bernoulli(0, 0.5).is_err());
        assert!(ModelConfig::bernoulli(2, 0.0).is_err());
        assert!(ModelConfig::new(2, 0.5, vec![1.0], vec![0.0, 1.0], vec![0.5, 0.5], 1.0, 0).is_err());
        // Support must contain both corners.
        assert!(ModelConfig::new(1, 0.5, vec![1.0], vec![0.0, 2.0], vec![0.5, 0.5], 1.0, 0).is_err());
        // Weights must sum to one.
        assert!(ModelConfig::new(1, 0.5, vec![1.0], vec![0.0, 1.0], vec![0.5, 0.6], 1.0, 0).is_err());
        // Negative weight.
        assert!(ModelConfig::new(1, 0.5, vec![1.0], vec![0.0, 1.0], vec![-0.1, 1.1], 1.0, 0).is_err());
        // Zero couplings are allowed (free comparison operator).
        assert!(ModelConfig::new(1, 0.5, vec![0.0], vec![0.0, 1.0], vec![0.5, 0.5], 1.0, 0).is_ok());
    }

    #[test]
    fn site_matrix_matches_hand_construction() {
        let cfg = ModelConfig::bernoulli(3, 0.5).unwrap();
        let m = build_site_matrix(&cfg, &[1.0, 0.0, 1.0], 0.25).unwrap();
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[0.75, 1.0, 0.0, 1.0, -0.25, 1.0, 0.0, 1.0, 0.75],
        );
        assert_relative_eq!(m, expect, epsilon = 1e-15);
    }

    #[test]
    fn two_channel_extremes_are_exact() {
        // Corners of V0 + diag(w): eigenvalues {-1, 1}, {0, 2}, golden pairs;
        // extremes -1 and 2 exactly.
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let (lo, hi) = eigenvalue_extremes(&cfg).unwrap();
        assert!((lo + 1.0).abs() < 1e-12, "lam_min = {lo}");
        assert!((hi - 2.0).abs() < 1e-12, "lam_max = {hi}");
        let w = energy_window(&cfg).unwrap();
        assert!((w.lo - 0.0).abs() < 1e-12 && (w.hi - 1.0).abs() < 1e-12);
        assert_relative_eq!(w.delta0, 1.5, max_relative = 1e-14);
        assert_relative_eq!(w.critical_length, 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn three_channel_window_matches_fixture() {
        // Frozen: lam_min = -sqrt(2), lam_max = 1 + sqrt(2); window at l=0.1.
        let cfg = ModelConfig::bernoulli(3, 0.1).unwrap();
        let w = energy_window(&cfg).unwrap();
        assert_relative_eq!(w.lam_min, -std::f64::consts::SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(w.lam_max, 1.0 + std::f64::consts::SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(w.lo, -7.585786437626905, max_relative = 1e-12);
        assert_relative_eq!(w.hi, 8.585786437626904, max_relative = 1e-12);
    }

    #[test]
    fn window_empty_when_cells_too_long() {
        // N=2: delta0 = 1.5, d/l = 1 at l=1: empty.
        let cfg = ModelConfig::bernoulli(2, 1.0).unwrap();
        match energy_window(&cfg) {
            Err(CoreError::EmptyWindow { delta0, ratio }) => {
                assert_relative_eq!(delta0, 1.5);
                assert_relative_eq!(ratio, 1.0);
            }
            other => panic!("expected empty window, got {other:?}"),
        }
    }

    #[test]
    fn generator_norm_matches_svd() {
        use crate::util::spectral_norm;
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        for (omega, e) in [(vec![1.0, 0.0], 0.3), (vec![0.0, 0.0], -1.2), (vec![1.0, 1.0], 0.9)] {
            let analytic = generator_norm(&cfg, &omega, e).unwrap();
            let site = build_site_matrix(&cfg, &omega, e).unwrap();
            let mut x = DMatrix::zeros(4, 4);
            x[(0, 2)] = 1.0;
            x[(1, 3)] = 1.0;
            x.view_mut((2, 0), (2, 2)).copy_from(&site);
            assert_relative_eq!(analytic, spectral_norm(&x), max_relative = 1e-12);
        }
    }

    #[test]
    fn window_energies_are_admissible() {
        for (n, l) in [(1usize, 0.5), (2, 0.5), (3, 0.1)] {
            let cfg = ModelConfig::bernoulli(n, l).unwrap();
            let w = energy_window(&cfg).unwrap();
            for e in w.grid(7) {
                let nb = norm_bound_check(&cfg, e).unwrap();
                assert!(nb.admissible, "N={n} E={e}: worst = {}", nb.worst);
            }
            // Outside the window the bound fails.
            let nb = norm_bound_check(&cfg, w.hi + 1.0).unwrap();
            assert!(!nb.admissible);
        }
    }

    #[test]
    fn realizations_agree_cellwise_on_overlaps() {
        let cfg = ModelConfig::bernoulli(3, 0.5).unwrap();
        let a = sample_realization(&cfg, -10, 10, 99).unwrap();
        let b = sample_realization(&cfg, -3, 25, 99).unwrap();
        for n in -3..10 {
            assert_eq!(a.cell(n), b.cell(n), "cell {n}");
        }
        let c = sample_realization(&cfg, -10, 10, 100).unwrap();
        assert_ne!(a.cells(), c.cells(), "different seeds give different draws");
    }

    #[test]
    fn point_mass_laws_are_deterministic() {
        let cfg = ModelConfig::point_mass(2, 0.5, 1.0).unwrap();
        let r = sample_realization(&cfg, 0, 50, 3).unwrap();
        assert!(r.cells().iter().all(|c| c.iter().all(|v| *v == 1.0)));
        let cfg0 = ModelConfig::point_mass(2, 0.5, 0.0).unwrap();
        let r0 = sample_realization(&cfg0, 0, 50, 3).unwrap();
        assert!(r0.cells().iter().all(|c| c.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn bernoulli_frequencies_are_balanced() {
        let cfg = ModelConfig::bernoulli(1, 0.5).unwrap();
        let r = sample_realization(&cfg, 0, 4000, 5).unwrap();
        let ones: usize = r.cells().iter().filter(|c| c[0] == 1.0).count();
        let frac = ones as f64 / 4000.0;
        assert!((frac - 0.5).abs() < 0.03, "one-fraction {frac}");
    }

    #[test]
    fn transfer_matrices_are_symplectic() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let t = transfer_matrix(&cfg, &[1.0, 0.0], 0.5).unwrap();
        assert!(t.residual() < 1e-13);
    }

    #[test]
    fn extremes_guard_trips() {
        let cfg = ModelConfig::bernoulli(21, 0.01).unwrap();
        assert!(matches!(eigenvalue_extremes(&cfg), Err(CoreError::Guard(_))));
    }

    #[test]
    fn corner_monotonicity_property() {
        // With nonnegative couplings the extremes are attained at the all-ones
        // and all-zeros corners; enumeration must agree with that shortcut.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = 1 + rng.random_range(0..4usize);
            let c: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
            let cfg = ModelConfig::new(
                n,
                0.3,
                c.clone(),
                vec![0.0, 1.0],
                vec![0.5, 0.5],
                1.0,
                0,
            )
            .unwrap();
            let (lo, hi) = eigenvalue_extremes(&cfg).unwrap();
            let m_zero = build_site_matrix(&cfg, &vec![0.0; n], 0.0).unwrap();
            let m_one = build_site_matrix(&cfg, &vec![1.0; n], 0.0).unwrap();
            let lo_direct = m_zero.symmetric_eigen().eigenvalues.min();
            let hi_direct = m_one.symmetric_eigen().eigenvalues.max();
            assert_relative_eq!(lo, lo_direct, epsilon = 1e-12);
            assert_relative_eq!(hi, hi_direct, epsilon = 1e-12);
        }
    }
}
