//! Lyapunov spectrum of the transfer-matrix cocycle.
//!
//! The full spectrum comes from QR re-orthonormalization: a frame `Q` is
//! pushed through the random products and the logs of the R-diagonals
//! accumulate the exponents. Partial sums `g_1 + ... + g_p` are
//! cross-checked on the wedge cocycle, which tracks one evolving `p`-vector.
//!
//! All reported exponents are per unit length (divide by `n * l`); the
//! per-step values are `l` times those and available via
//! [`LyapunovSpectrum::per_step`].

use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::CoreError;
use crate::model::ModelConfig;
use crate::symplectic::wedge::{wedge_dim, wedge_power};
use crate::tolerances::BATCHES;
use crate::util::mean_std;
use crate::Result;

pub mod probes;

pub use probes::{
    furstenberg_integral_probe, large_deviation_probe, negative_moment_probe, FurstenbergProbe,
};

/// Flush the pending product into the frame when any entry passes this.
const OVERFLOW_GUARD: f64 = 1e150;

/// Cache transfer (or wedge) matrices per disorder pattern up to this many.
const MAX_CACHED_PATTERNS: usize = 4096;

/// Per-pattern matrix table for a finitely supported single-site law.
///
/// With `s` atoms and `N` channels a cell's disorder takes `s^N` values;
/// when that count is small every cell matrix is precomputed once and
/// looked up by the radix-`s` pattern index. Off-atom disorder vectors
/// (explicit realizations) fall back to a direct computation.
pub(crate) struct PatternTable {
    cfg: ModelConfig,
    energy: f64,
    p: usize,
    table: Option<Vec<DMatrix<f64>>>,
}

impl PatternTable {
    /// Table of `wedge_power(T_w(E), p)`; `p = 1` is the plain transfer.
    pub(crate) fn new(cfg: &ModelConfig, energy: f64, p: usize) -> Result<Self> {
        let n = cfg.n_channels();
        let s = cfg.disorder_support().len();
        let count = s.checked_pow(n as u32).filter(|c| *c <= MAX_CACHED_PATTERNS);
        let table = match count {
            Some(count) => {
                let mut mats = Vec::with_capacity(count);
                let mut omega = vec![0.0; n];
                for idx in 0..count {
                    let mut rem = idx;
                    for w in omega.iter_mut() {
                        *w = cfg.disorder_support()[rem % s];
                        rem /= s;
                    }
                    mats.push(Self::compute(cfg, &omega, energy, p)?);
                }
                Some(mats)
            }
            None => None,
        };
        Ok(Self { cfg: cfg.clone(), energy, p, table })
    }

    fn compute(cfg: &ModelConfig, omega: &[f64], energy: f64, p: usize) -> Result<DMatrix<f64>> {
        let t = crate::model::transfer_matrix(cfg, omega, energy)?;
        let w = wedge_power(t.matrix(), p)?;
        Ok(w.into_inner())
    }

    fn pattern_index(&self, omega: &[f64]) -> Option<usize> {
        let support = self.cfg.disorder_support();
        let s = support.len();
        let mut idx = 0usize;
        for w in omega.iter().rev() {
            let pos = support.iter().position(|a| a == w)?;
            idx = idx * s + pos;
        }
        Some(idx)
    }

    pub(crate) fn matrix(&self, omega: &[f64]) -> Result<Cow<'_, DMatrix<f64>>> {
        if let (Some(table), Some(idx)) = (&self.table, self.pattern_index(omega)) {
            return Ok(Cow::Borrowed(&table[idx]));
        }
        Ok(Cow::Owned(Self::compute(&self.cfg, omega, self.energy, self.p)?))
    }
}

/// QR cocycle state: orthonormal frame, pending product, log accumulators.
#[derive(Debug, Clone)]
pub struct CocycleState {
    q: DMatrix<f64>,
    pending: DMatrix<f64>,
    pending_count: usize,
    log_acc: Vec<f64>,
    steps: usize,
}

impl CocycleState {
    pub fn new(dim: usize) -> Self {
        Self {
            q: DMatrix::identity(dim, dim),
            pending: DMatrix::identity(dim, dim),
            pending_count: 0,
            log_acc: vec![0.0; dim],
            steps: 0,
        }
    }

    /// Left-multiply one cocycle step into the pending product. If any
    /// entry passes the overflow guard the frame is re-orthonormalized
    /// first, so the increments stay representable.
    pub fn apply(&mut self, t: &DMatrix<f64>) -> Vec<f64> {
        let mut increments = Vec::new();
        let next = t * &self.pending;
        if next.amax() > OVERFLOW_GUARD {
            if let Some(inc) = self.flush() {
                increments = inc;
            }
            self.pending = t * &self.pending;
        } else {
            self.pending = next;
        }
        self.pending_count += 1;
        self.steps += 1;
        increments
    }

    /// Fold the pending product into the frame via QR; returns the log
    /// increments added to each accumulator (`None` if nothing pending).
    pub fn flush(&mut self) -> Option<Vec<f64>> {
        if self.pending_count == 0 {
            return None;
        }
        let dim = self.q.nrows();
        let w = &self.pending * &self.q;
        let (q, r) = w.qr().unpack();
        let inc: Vec<f64> = (0..dim).map(|i| r[(i, i)].abs().ln()).collect();
        for (a, d) in self.log_acc.iter_mut().zip(&inc) {
            *a += d;
        }
        self.q = q;
        self.pending = DMatrix::identity(dim, dim);
        self.pending_count = 0;
        Some(inc)
    }

    pub fn pending_count(&self) -> usize {
        self.pending_count
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn log_acc(&self) -> &[f64] {
        &self.log_acc
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `max_ij |t(Q)Q - I|_ij`; stays below 1e-10 between flushes.
    pub fn orthonormality_defect(&self) -> f64 {
        let dim = self.q.nrows();
        (self.q.transpose() * &self.q - DMatrix::<f64>::identity(dim, dim)).amax()
    }
}

/// Estimated Lyapunov spectrum with batch-mean standard errors.
///
/// `gamma` is sorted descending and normalized per unit length; the
/// symplectic symmetry `g_i = -g_{2N+1-i}` is checkable via
/// [`Self::symmetry_defects`].
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpectrum {
    pub gamma: Vec<f64>,
    pub stderr: Vec<f64>,
    pub steps: usize,
    pub energy: f64,
    pub cell_length: f64,
    pub seed: u64,
    /// Always true: exponents are per unit length.
    pub per_unit_length: bool,
}

impl LyapunovSpectrum {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Per-step exponents (`l` times the per-length values).
    pub fn per_step(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| g * self.cell_length).collect()
    }

    /// `g_i + g_{2N+1-i}` for `i = 1..N`; near zero by symplectic symmetry.
    pub fn symmetry_defects(&self) -> Vec<f64> {
        let d = self.gamma.len();
        (0..d / 2).map(|i| self.gamma[i] + self.gamma[d - 1 - i]).collect()
    }

    /// Whether every symmetry defect is within `k (s_i + s_{2N+1-i})`.
    pub fn symmetric_within(&self, k: f64) -> bool {
        let d = self.gamma.len();
        self.symmetry_defects()
            .iter()
            .enumerate()
            .all(|(i, defect)| defect.abs() <= k * (self.stderr[i] + self.stderr[d - 1 - i]))
    }

    /// Sum of all exponents and the summed stderr budget (determinant one
    /// forces the sum to vanish).
    pub fn sum_and_sigma(&self) -> (f64, f64) {
        (self.gamma.iter().sum(), self.stderr.iter().sum())
    }
}

fn batch_lengths(n_steps: usize, batches: usize) -> Vec<usize> {
    let base = n_steps / batches;
    let extra = n_steps % batches;
    (0..batches).map(|b| base + usize::from(b < extra)).collect()
}

/// Full Lyapunov spectrum by QR re-orthonormalization.
///
/// Steps the frame through cells `0..n_steps` of the realization keyed by
/// `seed`, folding the product into the frame every `reorth_every` steps
/// (and at batch boundaries). Standard errors come from the means of
/// [`BATCHES`] contiguous batches.
pub fn lyapunov_spectrum(
    cfg: &ModelConfig,
    energy: f64,
    n_steps: usize,
    seed: u64,
    reorth_every: usize,
) -> Result<LyapunovSpectrum> {
    if n_steps < 1000 {
        return Err(CoreError::Guard(format!(
            "lyapunov_spectrum needs n_steps >= 1000 for stable batch statistics, got {n_steps}"
        )));
    }
    if reorth_every == 0 {
        return Err(CoreError::Guard("reorth_every must be >= 1".into()));
    }
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    let table = PatternTable::new(cfg, energy, 1)?;
    let dim = 2 * cfg.n_channels();
    let ell = cfg.cell_length();

    let mut state = CocycleState::new(dim);
    let lengths = batch_lengths(n_steps, BATCHES);
    let mut batch_gamma = vec![Vec::with_capacity(BATCHES); dim];
    let mut cell = 0i64;
    let mut omega_buf: Vec<f64>;
    for len in lengths {
        let mut acc = vec![0.0; dim];
        for _ in 0..len {
            omega_buf = cfg.cell_disorder(seed, cell);
            cell += 1;
            let t = table.matrix(&omega_buf)?;
            let early = state.apply(&t);
            for (a, d) in acc.iter_mut().zip(&early) {
                *a += d;
            }
            if state.pending_count() >= reorth_every {
                if let Some(inc) = state.flush() {
                    for (a, d) in acc.iter_mut().zip(&inc) {
                        *a += d;
                    }
                }
            }
        }
        if let Some(inc) = state.flush() {
            for (a, d) in acc.iter_mut().zip(&inc) {
                *a += d;
            }
        }
        for (i, a) in acc.iter().enumerate() {
            batch_gamma[i].push(a / (len as f64 * ell));
        }
    }

    let total = n_steps as f64 * ell;
    let mut pairs: Vec<(f64, f64)> = state
        .log_acc()
        .iter()
        .enumerate()
        .map(|(i, acc)| {
            let (_, sd) = mean_std(&batch_gamma[i]);
            (acc / total, sd / (BATCHES as f64).sqrt())
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite exponents"));

    Ok(LyapunovSpectrum {
        gamma: pairs.iter().map(|p| p.0).collect(),
        stderr: pairs.iter().map(|p| p.1).collect(),
        steps: n_steps,
        energy,
        cell_length: ell,
        seed,
        per_unit_length: true,
    })
}

/// Estimate of a partial sum `g_1 + ... + g_p` from the wedge cocycle.
#[derive(Debug, Clone, Serialize)]
pub struct WedgeSum {
    pub estimate: f64,
    pub stderr: f64,
    pub p: usize,
    pub steps: usize,
    pub energy: f64,
    pub cell_length: f64,
    pub seed: u64,
}

/// Top exponent of the `p`-th wedge cocycle, started from `e_1 ^ ... ^ e_p`,
/// which converges to `g_1 + ... + g_p` per unit length.
pub fn wedge_lyapunov_sum(
    cfg: &ModelConfig,
    energy: f64,
    p: usize,
    n_steps: usize,
    seed: u64,
) -> Result<WedgeSum> {
    let n = cfg.n_channels();
    if p == 0 || p > n {
        return Err(CoreError::Guard(format!(
            "wedge order p must satisfy 1 <= p <= N = {n}, got {p}"
        )));
    }
    if n_steps < 1000 {
        return Err(CoreError::Guard(format!(
            "wedge_lyapunov_sum needs n_steps >= 1000, got {n_steps}"
        )));
    }
    let table = PatternTable::new(cfg, energy, p)?;
    let dim = wedge_dim(2 * n, p);
    let ell = cfg.cell_length();

    // e_1 ^ ... ^ e_p is the first lexicographic basis vector.
    let mut v = DVector::zeros(dim);
    v[0] = 1.0;
    let lengths = batch_lengths(n_steps, BATCHES);
    let mut batch_means = Vec::with_capacity(BATCHES);
    let mut total_acc = 0.0;
    let mut cell = 0i64;
    for len in lengths {
        let mut acc = 0.0;
        for _ in 0..len {
            let omega = cfg.cell_disorder(seed, cell);
            cell += 1;
            let t = table.matrix(&omega)?;
            v = &*t * v;
            let norm = v.norm();
            if norm == 0.0 {
                return Err(CoreError::Numeric(
                    "wedge cocycle annihilated the tracked vector".into(),
                ));
            }
            acc += norm.ln();
            v /= norm;
        }
        total_acc += acc;
        batch_means.push(acc / (len as f64 * ell));
    }
    let (_, sd) = mean_std(&batch_means);
    Ok(WedgeSum {
        estimate: total_acc / (n_steps as f64 * ell),
        stderr: sd / (BATCHES as f64).sqrt(),
        p,
        steps: n_steps,
        energy,
        cell_length: ell,
        seed,
    })
}
