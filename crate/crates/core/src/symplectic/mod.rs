//! The symplectic group `Sp(2N, R)`, its Lie algebra, and exterior powers.
//!
//! Conventions: the symplectic form is `J = [[0, -I], [I, 0]]` in the
//! `(u, u')` block splitting; a matrix `M` is symplectic iff
//! `t(M) J M = J`, and `X` lies in `sp_N` iff `t(X) J + J X = 0`, i.e.
//! `X = [[a, b1], [b2, -t(a)]]` with `b1, b2` symmetric.

use nalgebra::DMatrix;

use crate::error::CoreError;
use crate::tolerances::TOL_SYMP;
use crate::util::spectral_norm;
use crate::Result;

pub mod expm;
pub mod lie;
pub mod wedge;

pub use expm::{expm_dense, matrix_exponential};
pub use lie::{canonical_basis, lie_closure, BasisLabel, LieBasis, LieClosure};
pub use wedge::{wedge_dim, wedge_index_sets, wedge_power, WedgeMatrix};

/// The standard symplectic form on `R^{2n}`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Spectral norm of `t(M) J M - J`; zero iff `M` is symplectic.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let (r, c) = m.shape();
    assert!(r == c && r % 2 == 0, "symplectic residual needs a square even-dimensional matrix");
    let j = j_matrix(r / 2);
    spectral_norm(&(m.transpose() * &j * m - &j))
}

/// Spectral norm of `t(X) J + J X`; zero iff `X` is in `sp_N`.
pub fn hamiltonian_residual(x: &DMatrix<f64>) -> f64 {
    let (r, c) = x.shape();
    assert!(r == c && r % 2 == 0, "algebra residual needs a square even-dimensional matrix");
    let j = j_matrix(r / 2);
    spectral_norm(&(x.transpose() * &j + &j * x))
}

/// Matrix commutator `[a, b] = ab - ba`.
pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// An element of `Sp(2N, R)`.
///
/// Group elements produced by [`matrix_exponential`] are symplectic by
/// construction (up to roundoff at the scale of their entries); `new`
/// additionally enforces the absolute residual bound [`TOL_SYMP`], which is
/// the right test in the admissible-transfer regime where `||M|| = O(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    mat: DMatrix<f64>,
    n: usize,
}

impl SymplecticMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(CoreError::Guard(format!(
                "symplectic matrix must be square of even dimension, got {r}x{c}"
            )));
        }
        let res = symplectic_residual(&mat);
        if !(res <= TOL_SYMP) {
            return Err(CoreError::Numeric(format!(
                "symplectic residual {res:.3e} exceeds {TOL_SYMP:.0e}"
            )));
        }
        Ok(Self { n: r / 2, mat })
    }

    /// Wrap without the residual check (exponentials of large generators).
    pub fn new_unchecked(mat: DMatrix<f64>) -> Self {
        let (r, c) = mat.shape();
        assert!(r == c && r % 2 == 0 && r > 0);
        Self { n: r / 2, mat }
    }

    pub fn n_channels(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.mat)
    }

    /// Group inverse `-J t(M) J`, exact up to one matrix product.
    pub fn symplectic_inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.n);
        SymplecticMatrix::new_unchecked(-(&j * self.mat.transpose() * &j))
    }
}

/// An element of the Lie algebra `sp_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    mat: DMatrix<f64>,
    n: usize,
}

impl HamiltonianMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(CoreError::Guard(format!(
                "algebra element must be square of even dimension, got {r}x{c}"
            )));
        }
        let res = hamiltonian_residual(&mat);
        let scale = spectral_norm(&mat).max(1.0);
        if !(res <= TOL_SYMP * scale) {
            return Err(CoreError::Numeric(format!(
                "sp residual {res:.3e} exceeds {:.3e}",
                TOL_SYMP * scale
            )));
        }
        Ok(Self { n: r / 2, mat })
    }

    /// The generator `[[0, I], [M, 0]]` of one potential cell, `M` symmetric.
    pub fn from_site(site: &DMatrix<f64>) -> Result<Self> {
        let (r, c) = site.shape();
        if r != c || r == 0 {
            return Err(CoreError::Guard(format!("site matrix must be square, got {r}x{c}")));
        }
        let asym = spectral_norm(&(site - site.transpose()));
        if !(asym <= TOL_SYMP * spectral_norm(site).max(1.0)) {
            return Err(CoreError::Numeric(format!(
                "site matrix not symmetric: asymmetry {asym:.3e}"
            )));
        }
        let n = r;
        let mut x = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            x[(i, n + i)] = 1.0;
        }
        x.view_mut((n, 0), (n, n)).copy_from(site);
        Ok(Self { n, mat: x })
    }

    pub fn n_channels(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.mat
    }
}
