//! Closed-form exponentials of cell generators, plus a generic
//! scaling-and-squaring exponential kept as an internal cross-check oracle.
//!
//! For `X = [[0, I], [M, 0]]` with `M` symmetric, `X^2 = diag(M, M)`, so with
//! `M = Q L t(Q)`:
//!
//! ```text
//! exp(l X) = [[ C(l^2 M),        l S(l^2 M) ],
//!             [ M l S(l^2 M),    C(l^2 M)   ]]
//! ```
//!
//! where `C(z) = cosh(sqrt z)` and `S(z) = sinh(sqrt z)/sqrt z` are entire,
//! evaluated on the eigenvalues (as `cos`/`sinc` for negative arguments).

use nalgebra::DMatrix;

use crate::error::CoreError;
use crate::symplectic::SymplecticMatrix;
use crate::util::spectral_norm;
use crate::Result;

/// `cosh(sqrt z)` continued to an entire function of `z`.
pub fn c_entire(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        // 1 + z/2 + z^2/24 + z^3/720; next term z^4/40320 < 3e-21 here.
        1.0 + z * (0.5 + z * (1.0 / 24.0 + z / 720.0))
    } else if z > 0.0 {
        z.sqrt().cosh()
    } else {
        (-z).sqrt().cos()
    }
}

/// `sinh(sqrt z)/sqrt z` continued to an entire function of `z`.
pub fn s_entire(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z / 5040.0))
    } else if z > 0.0 {
        let r = z.sqrt();
        r.sinh() / r
    } else {
        let r = (-z).sqrt();
        r.sin() / r
    }
}

/// Exponential `exp(l X)` of the cell generator built from the symmetric
/// site matrix `M`.
pub fn matrix_exponential(site: &DMatrix<f64>, l: f64) -> Result<SymplecticMatrix> {
    let (n, c) = site.shape();
    if n != c || n == 0 {
        return Err(CoreError::Guard(format!("site matrix must be square, got {n}x{c}")));
    }
    if !l.is_finite() {
        return Err(CoreError::Config(format!("cell length must be finite, got {l}")));
    }
    let sym = 0.5 * (site + site.transpose());
    let eig = sym.symmetric_eigen();
    let q = &eig.eigenvectors;
    let lam = &eig.eigenvalues;

    let mut cm = DMatrix::zeros(n, n);
    let mut sm = DMatrix::zeros(n, n);
    let mut msm = DMatrix::zeros(n, n);
    for k in 0..n {
        let z = l * l * lam[k];
        let cv = c_entire(z);
        let sv = l * s_entire(z);
        let col = q.column(k);
        for i in 0..n {
            for j in 0..n {
                let qq = col[i] * col[j];
                cm[(i, j)] += cv * qq;
                sm[(i, j)] += sv * qq;
                msm[(i, j)] += lam[k] * sv * qq;
            }
        }
    }

    let mut t = DMatrix::zeros(2 * n, 2 * n);
    t.view_mut((0, 0), (n, n)).copy_from(&cm);
    t.view_mut((0, n), (n, n)).copy_from(&sm);
    t.view_mut((n, 0), (n, n)).copy_from(&msm);
    t.view_mut((n, n), (n, n)).copy_from(&cm);
    Ok(SymplecticMatrix::new_unchecked(t))
}

/// Dense matrix exponential by scaling and squaring with a Taylor kernel.
///
/// Internal oracle for cross-checking [`matrix_exponential`]; not tuned for
/// performance and accurate to ~1e-14 relative for moderate norms.
pub fn expm_dense(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, c) = a.shape();
    assert_eq!(n, c, "expm needs a square matrix");
    let norm = spectral_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5_f64.powi(squarings as i32);
    let b = a * scale;

    // Taylor to order 18 at ||B|| <= 1/2: tail < 1/19! * 2^-19 ~ 1e-23.
    let id = DMatrix::<f64>::identity(n, n);
    let mut term = id.clone();
    let mut sum = id;
    for k in 1..=18u32 {
        term = &term * &b / (k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
