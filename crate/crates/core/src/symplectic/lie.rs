//! Canonical basis of `sp_N` and bracket-closure computation.
//!
//! Basis elements, in the `(u, u')` block splitting with `E_ij` the matrix
//! units of `R^{N x N}`:
//!
//! ```text
//! X_ij = [[0, (E_ij + E_ji)/2], [0, 0]]          (i <= j)
//! Y_ij = t(X_ij)                                  (i <= j)
//! Z_ij = [[E_ij, 0], [0, -E_ji]]                  (all i, j)
//! ```
//!
//! giving `dim sp_N = N(2N+1)`. `lie_closure` spans generators and their
//! iterated commutators until the span stabilizes; rank decisions use a
//! relative tolerance against the generator scale.

use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;
use crate::symplectic::commutator;
use crate::Result;

/// Label of a canonical basis element (indices 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Upper-right symmetric unit.
    X(usize, usize),
    /// Lower-left symmetric unit.
    Y(usize, usize),
    /// Block-diagonal unit `diag(E_ij, -E_ji)`.
    Z(usize, usize),
}

/// Build `X_ij` for any index pair (symmetric in `i, j`).
pub fn x_elem(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m[(i, n + j)] += 0.5;
    m[(j, n + i)] += 0.5;
    m
}

/// Build `Y_ij = t(X_ij)`.
pub fn y_elem(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    x_elem(n, i, j).transpose()
}

/// Build `Z_ij = diag(E_ij, -E_ji)`.
pub fn z_elem(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m[(i, j)] += 1.0;
    m[(n + j, n + i)] -= 1.0;
    m
}

/// The canonical basis of `sp_N`.
#[derive(Debug, Clone)]
pub struct LieBasis {
    n: usize,
    elements: Vec<(BasisLabel, DMatrix<f64>)>,
}

impl LieBasis {
    pub fn n_channels(&self) -> usize {
        self.n
    }

    /// `N(2N + 1)`.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[(BasisLabel, DMatrix<f64>)] {
        &self.elements
    }

    pub fn element(&self, label: BasisLabel) -> Option<&DMatrix<f64>> {
        self.elements.iter().find(|(l, _)| *l == label).map(|(_, m)| m)
    }
}

/// Canonical basis of `sp_N`; `X_ij, Y_ij` for `i <= j` and all `Z_ij`.
pub fn canonical_basis(n: usize) -> Result<LieBasis> {
    if n == 0 {
        return Err(CoreError::Guard("canonical basis needs n >= 1".into()));
    }
    let mut elements = Vec::with_capacity(n * (2 * n + 1));
    for i in 0..n {
        for j in i..n {
            elements.push((BasisLabel::X(i, j), x_elem(n, i, j)));
        }
    }
    for i in 0..n {
        for j in i..n {
            elements.push((BasisLabel::Y(i, j), y_elem(n, i, j)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            elements.push((BasisLabel::Z(i, j), z_elem(n, i, j)));
        }
    }
    Ok(LieBasis { n, elements })
}

/// Result of a bracket-closure computation.
#[derive(Debug, Clone)]
pub struct LieClosure {
    /// Dimension of the closed span.
    pub dim: usize,
    /// Orthonormal basis (Frobenius inner product) of the closure.
    pub basis: Vec<DMatrix<f64>>,
    /// Matrix side length of the ambient space.
    pub side: usize,
    /// Number of candidate brackets examined.
    pub brackets_examined: usize,
}

fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Smallest Lie algebra containing the generators, by bracket-and-span
/// iteration until the dimension stabilizes.
///
/// Rank acceptance: a candidate joins the span iff its component orthogonal
/// to the current span exceeds `tol_rank` times the generator scale. Pass
/// [`crate::tolerances::TOL_RANK`] unless there is a reason not to.
pub fn lie_closure(generators: &[DMatrix<f64>], tol_rank: f64) -> Result<LieClosure> {
    if generators.is_empty() {
        return Err(CoreError::Guard("lie_closure needs at least one generator".into()));
    }
    let side = generators[0].nrows();
    for g in generators {
        if g.shape() != (side, side) {
            return Err(CoreError::Guard(format!(
                "generators must share a square shape, got {:?} vs {side}x{side}",
                g.shape()
            )));
        }
    }
    let scale = generators
        .iter()
        .map(|g| vectorize(g).norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);

    let max_dim = side * side;
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    let mut brackets_examined = 0usize;

    // Returns true if the candidate extended the span.
    let absorb = |m: &DMatrix<f64>, ortho: &mut Vec<DVector<f64>>, basis: &mut Vec<DMatrix<f64>>| -> bool {
        let mut v = vectorize(m);
        // Two Gram-Schmidt passes for numerical safety.
        for _ in 0..2 {
            for b in ortho.iter() {
                let c = v.dot(b);
                v.axpy(-c, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > tol_rank * scale {
            v /= norm;
            basis.push(DMatrix::from_column_slice(side, side, v.as_slice()));
            ortho.push(v);
            true
        } else {
            false
        }
    };

    let mut queue: std::collections::VecDeque<DMatrix<f64>> = generators.iter().cloned().collect();
    while let Some(m) = queue.pop_front() {
        if absorb(&m, &mut ortho, &mut basis) {
            let new_idx = basis.len() - 1;
            if basis.len() == max_dim {
                // Cannot grow further; drain pending work.
                queue.clear();
                break;
            }
            for k in 0..new_idx {
                brackets_examined += 1;
                queue.push_back(commutator(&basis[k], &basis[new_idx]));
            }
        }
    }

    Ok(LieClosure { dim: basis.len(), basis, side, brackets_examined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::TOL_RANK;
    use crate::util::spectral_norm;

    fn kron_delta(a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn basis_count_is_n_2n_plus_1() {
        for n in 1..=4 {
            let b = canonical_basis(n).unwrap();
            assert_eq!(b.dim(), n * (2 * n + 1));
            // Every element is in sp_N.
            for (_, m) in b.elements() {
                assert!(crate::symplectic::hamiltonian_residual(m) < 1e-15);
            }
        }
    }

    #[test]
    fn basis_elements_are_linearly_independent() {
        for n in 1..=3 {
            let b = canonical_basis(n).unwrap();
            let mats: Vec<DMatrix<f64>> = b.elements().iter().map(|(_, m)| m.clone()).collect();
            let closure = lie_closure(&mats, TOL_RANK).unwrap();
            assert_eq!(closure.dim, n * (2 * n + 1), "sp_{n} is closed and spans itself");
        }
    }

    #[test]
    fn structure_relation_z_with_x() {
        // [Z_ij, X_kr] = d_jk X_ir + d_jr X_ik.
        for n in 2..=3usize {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            let lhs = commutator(&z_elem(n, i, j), &x_elem(n, k, r));
                            let rhs = kron_delta(j, k) * x_elem(n, i, r)
                                + kron_delta(j, r) * x_elem(n, i, k);
                            assert!(
                                spectral_norm(&(lhs - rhs)) < 1e-14,
                                "n={n} [Z_{i}{j}, X_{k}{r}]"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn structure_relation_y_with_z() {
        // [Y_kr, Z_ij] = d_ik Y_rj + d_ir Y_kj.
        for n in 2..=3usize {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            let lhs = commutator(&y_elem(n, k, r), &z_elem(n, i, j));
                            let rhs = kron_delta(i, k) * y_elem(n, r, j)
                                + kron_delta(i, r) * y_elem(n, k, j);
                            assert!(
                                spectral_norm(&(lhs - rhs)) < 1e-14,
                                "n={n} [Y_{k}{r}, Z_{i}{j}]"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn structure_relation_x_with_y() {
        // [X_ij, Y_kr] = (d_jk Z_ir + d_jr Z_ik + d_ki Z_jr + d_ir Z_jk)/4.
        for n in 2..=3usize {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for r in 0..n {
                            let lhs = commutator(&x_elem(n, i, j), &y_elem(n, k, r));
                            let rhs = 0.25
                                * (kron_delta(j, k) * z_elem(n, i, r)
                                    + kron_delta(j, r) * z_elem(n, i, k)
                                    + kron_delta(k, i) * z_elem(n, j, r)
                                    + kron_delta(i, r) * z_elem(n, j, k));
                            assert!(
                                spectral_norm(&(lhs - rhs)) < 1e-14,
                                "n={n} [X_{i}{j}, Y_{k}{r}]"
                            );
                        }
                    }
                }
            }
        }
    }

    // Exact-arithmetic replica of the structure relations for small N: the
    // same identities over BigRational, so no floating-point roundoff is
    // involved in accepting them.
    mod exact {
        use super::kron_delta;
        use num::rational::BigRational;
        use num::{BigInt, Zero};

        type QMat = Vec<Vec<BigRational>>;

        fn q(num: i64, den: i64) -> BigRational {
            BigRational::new(BigInt::from(num), BigInt::from(den))
        }

        fn zeros(d: usize) -> QMat {
            vec![vec![BigRational::zero(); d]; d]
        }

        fn x_elem(n: usize, i: usize, j: usize) -> QMat {
            let mut m = zeros(2 * n);
            m[i][n + j] += q(1, 2);
            m[j][n + i] += q(1, 2);
            m
        }

        fn transpose(a: &QMat) -> QMat {
            let d = a.len();
            let mut t = zeros(d);
            for i in 0..d {
                for j in 0..d {
                    t[j][i] = a[i][j].clone();
                }
            }
            t
        }

        fn y_elem(n: usize, i: usize, j: usize) -> QMat {
            transpose(&x_elem(n, i, j))
        }

        fn z_elem(n: usize, i: usize, j: usize) -> QMat {
            let mut m = zeros(2 * n);
            m[i][j] += q(1, 1);
            m[n + j][n + i] -= q(1, 1);
            m
        }

        fn mul(a: &QMat, b: &QMat) -> QMat {
            let d = a.len();
            let mut c = zeros(d);
            for i in 0..d {
                for k in 0..d {
                    if a[i][k].is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        if b[k][j].is_zero() {
                            continue;
                        }
                        let prod = &a[i][k] * &b[k][j];
                        c[i][j] += prod;
                    }
                }
            }
            c
        }

        fn bracket(a: &QMat, b: &QMat) -> QMat {
            let ab = mul(a, b);
            let ba = mul(b, a);
            let d = a.len();
            let mut c = zeros(d);
            for i in 0..d {
                for j in 0..d {
                    c[i][j] = &ab[i][j] - &ba[i][j];
                }
            }
            c
        }

        fn scale_add(acc: &mut QMat, coef: &BigRational, m: &QMat) {
            for (ra, rm) in acc.iter_mut().zip(m) {
                for (a, v) in ra.iter_mut().zip(rm) {
                    *a += coef * v;
                }
            }
        }

        fn is_zero(m: &QMat) -> bool {
            m.iter().all(|r| r.iter().all(|v| v.is_zero()))
        }

        fn qd(a: usize, b: usize) -> BigRational {
            if kron_delta(a, b) == 1.0 {
                q(1, 1)
            } else {
                q(0, 1)
            }
        }

        #[test]
        fn relations_hold_exactly_for_n_up_to_2() {
            for n in 1..=2usize {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for r in 0..n {
                                // [Z_ij, X_kr] - d_jk X_ir - d_jr X_ik = 0.
                                let mut res = bracket(&z_elem(n, i, j), &x_elem(n, k, r));
                                scale_add(&mut res, &(-qd(j, k)), &x_elem(n, i, r));
                                scale_add(&mut res, &(-qd(j, r)), &x_elem(n, i, k));
                                assert!(is_zero(&res));

                                // [Y_kr, Z_ij] - d_ik Y_rj - d_ir Y_kj = 0.
                                let mut res = bracket(&y_elem(n, k, r), &z_elem(n, i, j));
                                scale_add(&mut res, &(-qd(i, k)), &y_elem(n, r, j));
                                scale_add(&mut res, &(-qd(i, r)), &y_elem(n, k, j));
                                assert!(is_zero(&res));

                                // 4[X_ij, Y_kr] - d_jk Z_ir - d_jr Z_ik - d_ki Z_jr - d_ir Z_jk = 0.
                                let mut res = bracket(&x_elem(n, i, j), &y_elem(n, k, r));
                                for row in res.iter_mut() {
                                    for v in row.iter_mut() {
                                        *v *= q(4, 1);
                                    }
                                }
                                scale_add(&mut res, &(-qd(j, k)), &z_elem(n, i, r));
                                scale_add(&mut res, &(-qd(j, r)), &z_elem(n, i, k));
                                scale_add(&mut res, &(-qd(k, i)), &z_elem(n, j, r));
                                scale_add(&mut res, &(-qd(i, r)), &z_elem(n, j, k));
                                assert!(is_zero(&res));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sl2_from_two_generators() {
        // [[0,1],[0,0]] and [[0,1],[1,0]] bracket-generate all of sl_2.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let c = lie_closure(&[a, b], TOL_RANK).unwrap();
        assert_eq!(c.dim, 3);
    }

    #[test]
    fn closure_is_idempotent_on_dependent_generators() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let c = lie_closure(&[a.clone(), 2.0 * &a, -3.0 * &a], TOL_RANK).unwrap();
        assert_eq!(c.dim, 1, "scalar multiples add nothing");
    }

    #[test]
    fn cell_generators_close_to_full_sp() {
        // Generators [[0, I], [M_w, 0]] over Bernoulli corner configurations
        // with unit couplings close to the full algebra.
        for n in 1..=3usize {
            let mut gens = Vec::new();
            for mask in 0..(1u32 << n) {
                let mut site = DMatrix::zeros(n, n);
                for i in 0..n.saturating_sub(1) {
                    site[(i, i + 1)] = 1.0;
                    site[(i + 1, i)] = 1.0;
                }
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        site[(i, i)] += 1.0;
                    }
                    site[(i, i)] -= 0.37; // energy shift
                }
                let mut x = DMatrix::zeros(2 * n, 2 * n);
                for i in 0..n {
                    x[(i, n + i)] = 1.0;
                }
                x.view_mut((n, 0), (n, n)).copy_from(&site);
                gens.push(x);
            }
            let c = lie_closure(&gens, TOL_RANK).unwrap();
            assert_eq!(c.dim, n * (2 * n + 1), "N={n}");
        }
    }

    #[test]
    fn degenerate_couplings_span_less() {
        // With the disorder switched off (a single generator), the closure
        // is one-dimensional: nothing to bracket against.
        let mut x = DMatrix::zeros(2, 2);
        x[(0, 1)] = 1.0;
        x[(1, 0)] = -0.25;
        let c = lie_closure(&[x], TOL_RANK).unwrap();
        assert_eq!(c.dim, 1);
    }
}
