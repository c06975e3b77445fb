//! Banded symmetric storage with LDLt inertia counting, and a general
//! banded LU with partial pivoting for resolvent solves.
//!
//! The finite-difference box operator is symmetric with bandwidth `N`
//! (channels within a grid point couple through the hopping matrix, and
//! neighboring points couple through the stencil), so everything here is
//! `O(dim * bw^2)` instead of dense cubic.

use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;
use crate::Result;

/// Symmetric banded matrix; stores the diagonal and `bw` sub-diagonals.
#[derive(Debug, Clone)]
pub struct SymBanded {
    dim: usize,
    bw: usize,
    /// `bands[k][j] = A[j+k, j]` for `k = 0..=bw`, `j + k < dim`.
    bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(dim: usize, bw: usize) -> Self {
        let bands = (0..=bw).map(|k| vec![0.0; dim.saturating_sub(k)]).collect();
        Self { dim, bw, bands }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn split(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        (k <= self.bw && hi < self.dim).then_some((k, lo))
    }

    /// Set `A[i, j]` (and by symmetry `A[j, i]`); out-of-band panics.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (k, lo) = self.split(i, j).expect("entry outside the band");
        self.bands[k][lo] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (k, lo) = self.split(i, j).expect("entry outside the band");
        self.bands[k][lo] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.split(i, j) {
            Some((k, lo)) => self.bands[k][lo],
            None => 0.0,
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = DVector::zeros(self.dim);
        for j in 0..self.dim {
            y[j] += self.bands[0][j] * x[j];
            for k in 1..=self.bw {
                if j + k < self.dim {
                    let a = self.bands[k][j];
                    y[j + k] += a * x[j];
                    y[j] += a * x[j + k];
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for k in 0..=self.bw {
                if j + k < self.dim {
                    m[(j + k, j)] = self.bands[k][j];
                    m[(j, j + k)] = self.bands[k][j];
                }
            }
        }
        m
    }

    /// Number of eigenvalues of `A` strictly below `shift`, by counting
    /// negative pivots of the LDLt factorization of `A - shift I` (no
    /// pivoting; exact for the count by Sylvester's law).
    ///
    /// An exact zero pivot aborts with an error; use
    /// [`Self::count_below_robust`] to retry with a perturbed shift.
    pub fn count_below(&self, shift: f64) -> Result<usize> {
        let mut w: Vec<Vec<f64>> = self.bands.clone();
        for d in w[0].iter_mut() {
            *d -= shift;
        }
        let mut negatives = 0usize;
        for j in 0..self.dim {
            let d = w[0][j];
            if d == 0.0 {
                return Err(CoreError::Numeric(format!(
                    "exact zero pivot at index {j} for shift {shift}"
                )));
            }
            if d < 0.0 {
                negatives += 1;
            }
            for r in 1..=self.bw {
                if j + r >= self.dim {
                    break;
                }
                let f = w[r][j] / d;
                for c in r..=self.bw {
                    if j + c >= self.dim {
                        break;
                    }
                    w[c - r][j + r] -= f * w[c][j];
                }
            }
        }
        Ok(negatives)
    }

    /// [`Self::count_below`] with the zero-pivot retry: the shift is
    /// perturbed by multiples of `tol * max(1, |shift|)` until the
    /// factorization goes through.
    pub fn count_below_robust(&self, shift: f64, tol: f64) -> Result<usize> {
        let perturb = tol * shift.abs().max(1.0);
        let mut last = None;
        for attempt in 0..5 {
            match self.count_below(shift + attempt as f64 * perturb) {
                Ok(c) => return Ok(c),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// LU factorization with partial pivoting of `A - shift I` for a
/// symmetric banded `A`; the factored `U` has bandwidth `2 bw`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    dim: usize,
    bw: usize,
    /// `rows[i][k]` holds column `i - bw + k`; width `3 bw + 1`.
    rows: Vec<Vec<f64>>,
    /// Multipliers recorded at column `j` for rows `j+1..=j+bw`.
    lmult: Vec<Vec<f64>>,
    piv: Vec<usize>,
    min_pivot: f64,
}

impl BandedLu {
    pub fn factor_shifted(a: &SymBanded, shift: f64) -> Result<Self> {
        let dim = a.dim();
        let bw = a.bandwidth();
        let width = 3 * bw + 1;
        let mut rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..width)
                    .map(|k| {
                        let c = (i + k) as isize - bw as isize;
                        if c < 0 || c as usize >= dim {
                            0.0
                        } else {
                            let c = c as usize;
                            let v = a.get(i, c);
                            if c == i {
                                v - shift
                            } else {
                                v
                            }
                        }
                    })
                    .collect()
            })
            .collect();

        let col_slot = |i: usize, c: usize| -> usize { c + bw - i };
        let mut lmult: Vec<Vec<f64>> = vec![Vec::new(); dim];
        let mut piv = vec![0usize; dim];
        let mut min_pivot = f64::INFINITY;

        for j in 0..dim {
            let limit = (j + bw).min(dim - 1);
            let mut p = j;
            let mut best = rows[j][col_slot(j, j)].abs();
            for i in (j + 1)..=limit {
                let v = rows[i][col_slot(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(CoreError::Numeric(format!(
                    "matrix is singular to working precision (column {j})"
                )));
            }
            if p != j {
                let hi_col = (j + 2 * bw).min(dim - 1);
                for c in j..=hi_col {
                    let (kj, kp) = (col_slot(j, c), col_slot(p, c));
                    let tmp = rows[j][kj];
                    rows[j][kj] = rows[p][kp];
                    rows[p][kp] = tmp;
                }
            }
            piv[j] = p;
            let d = rows[j][col_slot(j, j)];
            min_pivot = min_pivot.min(d.abs());
            let hi_col = (j + 2 * bw).min(dim - 1);
            for i in (j + 1)..=limit {
                let m = rows[i][col_slot(i, j)] / d;
                lmult[j].push(m);
                rows[i][col_slot(i, j)] = 0.0;
                if m != 0.0 {
                    for c in (j + 1)..=hi_col {
                        rows[i][col_slot(i, c)] -= m * rows[j][col_slot(j, c)];
                    }
                }
            }
        }
        Ok(Self { dim, bw, rows, lmult, piv, min_pivot })
    }

    /// Smallest absolute pivot seen; a near-singularity diagnostic.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim);
        let bw = self.bw;
        for j in 0..self.dim {
            b.swap(j, self.piv[j]);
            let bj = b[j];
            if bj != 0.0 {
                for (r, m) in self.lmult[j].iter().enumerate() {
                    b[j + 1 + r] -= m * bj;
                }
            }
        }
        for i in (0..self.dim).rev() {
            let mut x = b[i];
            let hi_col = (i + 2 * bw).min(self.dim - 1);
            for c in (i + 1)..=hi_col {
                x -= self.rows[i][c + bw - i] * b[c];
            }
            b[i] = x / self.rows[i][bw];
        }
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }

    /// Solve against every column of `b` in place.
    pub fn solve_mat(&self, b: &mut DMatrix<f64>) {
        assert_eq!(b.nrows(), self.dim);
        for mut col in b.column_iter_mut() {
            self.solve_in_place(col.as_mut_slice());
        }
    }
}
