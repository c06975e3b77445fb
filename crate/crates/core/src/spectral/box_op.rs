//! Finite boxes `[-lL, lL]` with Dirichlet ends: grid conventions, the
//! banded finite-difference assembly, and the region masks used by the
//! box-probe estimators.

use nalgebra::DVector;

use crate::error::CoreError;
use crate::model::{v0_matrix, DisorderRealization, ModelConfig};
use crate::spectral::banded::SymBanded;
use crate::Result;

/// A restriction of the operator to `2L` cells on `[-lL, lL]`, discretized
/// on a uniform grid with `m` points per cell and Dirichlet ends.
///
/// Interior grid points are `x_j = -lL + (j+1) h` for `j = 0..2Lm-2` with
/// `h = l/m`; the point sitting exactly on a cell boundary belongs to the
/// cell on its right.
#[derive(Debug, Clone)]
pub struct BoxOperator {
    cfg: ModelConfig,
    realization: DisorderRealization,
    half_cells: usize,
    points_per_cell: usize,
}

impl BoxOperator {
    /// Wrap an explicit realization; it must cover exactly the cells
    /// `-L..L` for some `L >= 1`.
    pub fn new(
        cfg: ModelConfig,
        realization: DisorderRealization,
        points_per_cell: usize,
    ) -> Result<Self> {
        let n_cells = realization.n_cells();
        if n_cells % 2 != 0 || n_cells == 0 {
            return Err(CoreError::Config(format!(
                "a box needs an even, positive cell count, got {n_cells}"
            )));
        }
        let half = (n_cells / 2) as i64;
        if realization.first_cell() != -half {
            return Err(CoreError::Config(format!(
                "box realization must cover cells [{}, {}), got first cell {}",
                -half,
                half,
                realization.first_cell()
            )));
        }
        if realization.cell(-half).len() != cfg.n_channels() {
            return Err(CoreError::Config(format!(
                "realization lists {} channels, config has {}",
                realization.cell(-half).len(),
                cfg.n_channels()
            )));
        }
        if points_per_cell < 2 {
            return Err(CoreError::Resolution(format!(
                "need at least 2 points per cell, got {points_per_cell}"
            )));
        }
        Ok(Self { cfg, realization, half_cells: half as usize, points_per_cell })
    }

    /// Sample the disorder of cells `-L..L` from the counter-based stream.
    pub fn sample(
        cfg: ModelConfig,
        half_cells: usize,
        points_per_cell: usize,
        seed: u64,
    ) -> Result<Self> {
        if half_cells == 0 {
            return Err(CoreError::Config("box half-length L must be >= 1".into()));
        }
        let half = half_cells as i64;
        let realization = crate::model::sample_realization(&cfg, -half, half, seed)?;
        Self::new(cfg, realization, points_per_cell)
    }

    /// The disorder-free box (`w = 0` in every cell).
    pub fn free(cfg: ModelConfig, half_cells: usize, points_per_cell: usize) -> Result<Self> {
        if half_cells == 0 {
            return Err(CoreError::Config("box half-length L must be >= 1".into()));
        }
        let half = half_cells as i64;
        let cells = vec![vec![0.0; cfg.n_channels()]; 2 * half_cells];
        let realization = DisorderRealization::from_cells(-half, cells, cfg.n_channels())?;
        Self::new(cfg, realization, points_per_cell)
    }

    pub fn cfg(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn realization(&self) -> &DisorderRealization {
        &self.realization
    }

    pub fn half_cells(&self) -> usize {
        self.half_cells
    }

    pub fn points_per_cell(&self) -> usize {
        self.points_per_cell
    }

    pub fn grid_step(&self) -> f64 {
        self.cfg.cell_length() / self.points_per_cell as f64
    }

    /// `lL`, half the box length.
    pub fn half_length(&self) -> f64 {
        self.cfg.cell_length() * self.half_cells as f64
    }

    pub fn n_points(&self) -> usize {
        2 * self.half_cells * self.points_per_cell - 1
    }

    pub fn dim(&self) -> usize {
        self.n_points() * self.cfg.n_channels()
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length() + (j + 1) as f64 * self.grid_step()
    }

    /// Index into the realization's cell array (0-based from the left end).
    pub fn cell_of_point(&self, j: usize) -> usize {
        ((j + 1) / self.points_per_cell).min(2 * self.half_cells - 1)
    }

    /// Disorder vector of the `k`-th cell from the left end.
    pub fn cell_omega(&self, k: usize) -> &[f64] {
        self.realization.cell(k as i64 - self.half_cells as i64)
    }

    /// Assemble the Dirichlet finite-difference matrix of `H` (no energy
    /// shift): per-point diagonal block `V0 + diag(c w) + (2/h^2) I`,
    /// nearest-neighbor blocks `-(1/h^2) I`.
    pub fn assemble(&self) -> SymBanded {
        let n = self.cfg.n_channels();
        let h = self.grid_step();
        let inv_h2 = 1.0 / (h * h);
        let v0 = v0_matrix(n);
        let c = self.cfg.couplings();
        let mut a = SymBanded::zeros(self.dim(), n);
        for j in 0..self.n_points() {
            let w = self.cell_omega(self.cell_of_point(j));
            let base = j * n;
            for ch in 0..n {
                a.set(base + ch, base + ch, c[ch] * w[ch] + 2.0 * inv_h2);
                if ch + 1 < n {
                    a.set(base + ch + 1, base + ch, v0[(ch + 1, ch)]);
                }
                if (j + 1) * n < self.dim() {
                    a.set(base + n + ch, base + ch, -inv_h2);
                }
            }
        }
        a
    }

    /// Flattened indices (all channels) of grid points whose position
    /// satisfies `pred`.
    pub fn indices_where(&self, pred: impl Fn(f64) -> bool) -> Vec<usize> {
        let n = self.cfg.n_channels();
        let mut idx = Vec::new();
        for j in 0..self.n_points() {
            if pred(self.x(j)) {
                for ch in 0..n {
                    idx.push(j * n + ch);
                }
            }
        }
        idx
    }

    /// Points of the middle third `|x| <= lL/3` (inclusive up to a
    /// quarter-step slack so boundary points classify stably).
    pub fn in_region_indices(&self) -> Vec<usize> {
        let bound = self.half_length() / 3.0 + 0.25 * self.grid_step();
        self.indices_where(|x| x.abs() <= bound)
    }

    /// Points of the outermost two-cell bands `|x| >= l(L-2)`.
    pub fn out_region_indices(&self) -> Vec<usize> {
        let bound = self.cfg.cell_length() * (self.half_cells as f64 - 2.0)
            - 0.25 * self.grid_step();
        self.indices_where(|x| x.abs() >= bound)
    }

    /// Cell centers, the window positions for decay profiles.
    pub fn window_centers(&self) -> Vec<f64> {
        let l = self.cfg.cell_length();
        (0..2 * self.half_cells)
            .map(|k| -self.half_length() + l * (k as f64 + 0.5))
            .collect()
    }

    /// Per-window amplitude `sqrt(h sum |psi|^2)` over `|x - center| <= l`
    /// (all channels); one value per cell center.
    pub fn window_norms(&self, psi: &DVector<f64>) -> Vec<f64> {
        assert_eq!(psi.len(), self.dim(), "state vector length mismatch");
        let n = self.cfg.n_channels();
        let l = self.cfg.cell_length();
        let h = self.grid_step();
        let slack = 0.25 * h;
        self.window_centers()
            .iter()
            .map(|&c| {
                let mut acc = 0.0;
                for j in 0..self.n_points() {
                    if (self.x(j) - c).abs() <= l + slack {
                        for ch in 0..n {
                            acc += psi[j * n + ch] * psi[j * n + ch];
                        }
                    }
                }
                (h * acc).sqrt()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free_box() -> BoxOperator {
        let cfg = ModelConfig::bernoulli(1, 1.0).unwrap();
        BoxOperator::free(cfg, 6, 8).unwrap()
    }

    #[test]
    fn grid_matches_conventions() {
        let b = free_box();
        assert_eq!(b.n_points(), 2 * 6 * 8 - 1);
        assert_relative_eq!(b.x(0), -6.0 + 0.125, epsilon = 1e-15);
        assert_relative_eq!(b.x(b.n_points() - 1), 6.0 - 0.125, epsilon = 1e-15);
        // Point on a cell boundary belongs to the cell on its right.
        assert_eq!(b.cell_of_point(7), 1, "x = -5 opens cell 1");
        assert_eq!(b.cell_of_point(6), 0);
        assert_eq!(b.cell_of_point(b.n_points() - 1), 11);
    }

    #[test]
    fn masks_match_counting_fixture() {
        // Frozen: L=6, l=1, m=8 has 32 outer rows and 33 inner columns.
        let b = free_box();
        assert_eq!(b.out_region_indices().len(), 32);
        assert_eq!(b.in_region_indices().len(), 33);
    }

    #[test]
    fn assembly_matches_dense_reference() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let b = BoxOperator::sample(cfg, 2, 4, 7).unwrap();
        let a = b.assemble();
        assert_eq!(a.dim(), b.dim());
        assert_eq!(a.bandwidth(), 2);
        let dense = a.to_dense();
        let n = 2;
        let h = b.grid_step();
        for j in 0..b.n_points() {
            let w = b.cell_omega(b.cell_of_point(j));
            let mut blk = v0_matrix(n);
            for ch in 0..n {
                blk[(ch, ch)] += b.cfg().couplings()[ch] * w[ch] + 2.0 / (h * h);
            }
            for a_ in 0..n {
                for b_ in 0..n {
                    assert_relative_eq!(
                        dense[(j * n + a_, j * n + b_)],
                        blk[(a_, b_)],
                        epsilon = 1e-12
                    );
                }
                if j + 1 < b.n_points() {
                    let off = dense[((j + 1) * n + a_, j * n + a_)];
                    assert_relative_eq!(off, -1.0 / (h * h), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampled_box_agrees_with_cell_stream() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let b = BoxOperator::sample(cfg.clone(), 3, 4, 11).unwrap();
        for cell in -3i64..3 {
            assert_eq!(
                b.realization().cell(cell),
                cfg.cell_disorder(11, cell).as_slice(),
                "cell {cell} differs from the keyed stream"
            );
        }
    }

    #[test]
    fn window_norms_recover_flat_profile() {
        let b = free_box();
        let psi = DVector::from_element(b.dim(), 1.0);
        let norms = b.window_norms(&psi);
        assert_eq!(norms.len(), 12);
        // An interior window |x - c| <= l catches 2m+1 grid points of the
        // unit profile; the leftmost window is truncated by the box end.
        let h = b.grid_step();
        assert_relative_eq!(norms[5], (17.0 * h).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(norms[0], (12.0 * h).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn misaligned_realization_is_rejected() {
        let cfg = ModelConfig::bernoulli(1, 1.0).unwrap();
        let r = DisorderRealization::from_cells(0, vec![vec![0.0]; 4], 1).unwrap();
        assert!(BoxOperator::new(cfg.clone(), r, 8).is_err());
        let odd = DisorderRealization::from_cells(-1, vec![vec![0.0]; 3], 1).unwrap();
        assert!(BoxOperator::new(cfg, odd, 8).is_err());
    }
}
