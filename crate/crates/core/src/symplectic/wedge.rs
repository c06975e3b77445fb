//! Exterior powers: `wedge_power(M, p)` is the matrix of `p x p` minors of
//! `M` acting on `Lambda^p R^n`, with rows and columns indexed by sorted
//! index tuples in lexicographic order.

use nalgebra::DMatrix;

use crate::error::CoreError;
use crate::Result;

/// `C(n, p)`, saturating guard-free for the small sizes used here.
pub fn wedge_dim(n: usize, p: usize) -> usize {
    if p > n {
        return 0;
    }
    let p = p.min(n - p);
    let mut num = 1usize;
    for i in 0..p {
        num = num * (n - i) / (i + 1);
    }
    num
}

/// Sorted `p`-subsets of `0..n` in lexicographic order.
pub fn wedge_index_sets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(wedge_dim(n, p));
    if p == 0 {
        out.push(Vec::new());
        return out;
    }
    if p > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        out.push(idx.clone());
        // Advance to the next combination.
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn minor_det(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        3 => {
            let a = |i: usize, j: usize| m[(rows[i], cols[j])];
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        p => {
            let sub = DMatrix::from_fn(p, p, |i, j| m[(rows[i], cols[j])]);
            sub.lu().determinant()
        }
    }
}

/// The induced matrix on `Lambda^p R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeMatrix {
    mat: DMatrix<f64>,
    n: usize,
    p: usize,
}

impl WedgeMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

/// Compute `Lambda^p M` as the matrix of `p x p` minors.
pub fn wedge_power(m: &DMatrix<f64>, p: usize) -> Result<WedgeMatrix> {
    let (n, c) = m.shape();
    if n != c {
        return Err(CoreError::Guard(format!("wedge power needs a square matrix, got {n}x{c}")));
    }
    if p == 0 || p > n {
        return Err(CoreError::Guard(format!("wedge power p must satisfy 1 <= p <= {n}, got {p}")));
    }
    let sets = wedge_index_sets(n, p);
    let d = sets.len();
    let mat = DMatrix::from_fn(d, d, |a, b| minor_det(m, &sets[a], &sets[b]));
    Ok(WedgeMatrix { mat, n, p })
}
