//! Finite-difference eigenvalue solver: inertia bisection on the banded
//! discretization, plus shifted inverse iteration for eigenvectors.

use nalgebra::DVector;

use crate::error::CoreError;
use crate::spectral::banded::{BandedLu, SymBanded};
use crate::spectral::box_op::BoxOperator;
use crate::tolerances::TOL_EIG;
use crate::Result;

/// Number of eigenvalues of the box below `energy` (strictly), via the
/// LDLt inertia count.
pub fn count_below(box_op: &BoxOperator, energy: f64) -> Result<usize> {
    if !energy.is_finite() {
        return Err(CoreError::Config(format!("energy must be finite, got {energy}")));
    }
    box_op.assemble().count_below_robust(energy, TOL_EIG)
}

/// All eigenvalues of `a` in `(lo, hi]`, each located by bisection to
/// width `tol * max(1, |E|)`; returned sorted ascending with multiplicity.
pub fn eigenvalues_in_window(a: &SymBanded, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(CoreError::Config(format!("bad eigenvalue window [{lo}, {hi}]")));
    }
    let c_lo = a.count_below_robust(lo, tol)?;
    let c_hi = a.count_below_robust(hi, tol)?;
    let mut values = Vec::with_capacity(c_hi - c_lo);
    // Locate the k-th smallest eigenvalue for k = c_lo+1 ..= c_hi: bisect
    // on "count_below(mid) >= k".
    for k in (c_lo + 1)..=c_hi {
        let (mut a_, mut b_) = (lo, hi);
        while b_ - a_ > tol * a_.abs().max(b_.abs()).max(1.0) {
            let mid = 0.5 * (a_ + b_);
            if a.count_below_robust(mid, tol)? >= k {
                b_ = mid;
            } else {
                a_ = mid;
            }
        }
        values.push(0.5 * (a_ + b_));
    }
    Ok(values)
}

/// Eigenvalues of the box in `(lo, hi]` at the default bisection
/// tolerance.
pub fn box_eigenvalues_fd(box_op: &BoxOperator, lo: f64, hi: f64) -> Result<Vec<f64>> {
    eigenvalues_in_window(&box_op.assemble(), lo, hi, TOL_EIG)
}

/// Refined eigenvalue nearest `target` plus its unit eigenvector, by
/// shifted inverse iteration started from the bisection bracket.
///
/// Fails if no eigenvalue lies within `radius` of `target`.
pub fn eigenpair_near(
    box_op: &BoxOperator,
    target: f64,
    radius: f64,
) -> Result<(f64, DVector<f64>)> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(CoreError::Config(format!("search radius must be positive, got {radius}")));
    }
    let a = box_op.assemble();
    let nearby = eigenvalues_in_window(&a, target - radius, target + radius, TOL_EIG)?;
    let lambda = nearby
        .iter()
        .copied()
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
        .ok_or_else(|| {
            CoreError::Numeric(format!("no eigenvalue within {radius} of {target}"))
        })?;

    let dim = a.dim();
    // Shift slightly off the eigenvalue so the factorization stays regular.
    let mut shift = lambda + 10.0 * TOL_EIG * lambda.abs().max(1.0);
    let mut v = DVector::from_fn(dim, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
    v /= v.norm();
    let mut rayleigh = lambda;
    for attempt in 0..3 {
        let lu = match BandedLu::factor_shifted(&a, shift) {
            Ok(lu) => lu,
            Err(_) => {
                shift += 100.0 * TOL_EIG * shift.abs().max(1.0) * (attempt + 1) as f64;
                continue;
            }
        };
        for _ in 0..8 {
            let mut w = lu.solve_vec(&v);
            let norm = w.norm();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            w /= norm;
            v = w;
        }
        rayleigh = v.dot(&a.matvec(&v));
        let resid = (a.matvec(&v) - &v * rayleigh).norm();
        if resid <= 1e-6 * rayleigh.abs().max(1.0) {
            return Ok((rayleigh, v));
        }
        shift = rayleigh + 10.0 * TOL_EIG * rayleigh.abs().max(1.0);
    }
    let resid = (a.matvec(&v) - &v * rayleigh).norm();
    Err(CoreError::Numeric(format!(
        "inverse iteration stalled near {target}: residual {resid:.3e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisorderRealization, ModelConfig};
    use approx::assert_relative_eq;

    fn box_from_cells(
        n: usize,
        l: f64,
        m: usize,
        cells: Vec<Vec<f64>>,
    ) -> BoxOperator {
        let cfg = ModelConfig::bernoulli(n, l).unwrap();
        let half = (cells.len() / 2) as i64;
        let r = DisorderRealization::from_cells(-half, cells, n).unwrap();
        BoxOperator::new(cfg, r, m).unwrap()
    }

    fn d1_box() -> BoxOperator {
        let cells = [[1.0], [0.0], [1.0], [1.0], [0.0], [0.0], [1.0], [0.0]]
            .map(Vec::from)
            .to_vec();
        box_from_cells(1, 1.0, 8, cells)
    }

    #[test]
    fn disordered_counts_match_reference() {
        // Frozen: dense eigensolve of the same N=1 box.
        let b = d1_box();
        for (e, expect) in [(0.5, 0), (1.0, 1), (2.0, 3), (5.0, 5)] {
            assert_eq!(count_below(&b, e).unwrap(), expect, "count below {e}");
        }
    }

    #[test]
    fn disordered_eigenvalues_match_reference() {
        let b = d1_box();
        let expect = [
            0.5389360435574254,
            1.129112363921904,
            1.867193197742095,
            2.9506753149353346,
            4.294196864157716,
            6.054387025017915,
        ];
        let got = box_eigenvalues_fd(&b, -1.0, 6.5).unwrap();
        assert_eq!(got.len(), 6);
        for (g, e) in got.iter().zip(expect) {
            assert_relative_eq!(*g, e, epsilon = 1e-6);
        }
    }

    #[test]
    fn two_channel_counts_and_values_match_reference() {
        let cells = [[1.0, 0.0], [0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]
            .map(Vec::from)
            .to_vec();
        let b = box_from_cells(2, 0.5, 8, cells);
        for (e, expect) in [(0.0, 0), (2.0, 1), (8.0, 4)] {
            assert_eq!(count_below(&b, e).unwrap(), expect, "count below {e}");
        }
        let expect = [
            0.6368580017228828,
            2.63585576137985,
            3.7098336043998654,
            5.730535439153705,
            9.230602347485263,
            11.227532420694276,
            16.89920724210136,
            18.900237109836645,
        ];
        let got = box_eigenvalues_fd(&b, -1.0, 19.0).unwrap();
        assert_eq!(got.len(), 8);
        for (g, e) in got.iter().zip(expect) {
            assert_relative_eq!(*g, e, epsilon = 1e-6);
        }
    }

    #[test]
    fn free_box_matches_discrete_closed_form() {
        // Dirichlet Laplacian plus the stencil: the discrete eigenvalues
        // are (4/h^2) sin^2(k pi h / (2 X)) with X the box length.
        let cfg = ModelConfig::bernoulli(1, 1.0).unwrap();
        let b = BoxOperator::free(cfg, 4, 16).unwrap();
        let h = b.grid_step();
        let x_len = 8.0;
        let got = box_eigenvalues_fd(&b, 0.0, 4.0).unwrap();
        assert!(got.len() >= 5);
        for (k, g) in got.iter().enumerate() {
            let arg = (k as f64 + 1.0) * std::f64::consts::PI * h / (2.0 * x_len);
            let exact = 4.0 / (h * h) * arg.sin().powi(2);
            assert_relative_eq!(*g, exact, epsilon = 1e-7);
            // Second-order agreement with the continuum values.
            let cont = ((k as f64 + 1.0) * std::f64::consts::PI / x_len).powi(2);
            assert!((g - cont).abs() <= 0.1 * cont * cont * h * h + 1e-9);
        }
    }

    #[test]
    fn two_channel_free_box_decouples() {
        // V0 has eigenvalues +-1, so the spectrum is two shifted copies of
        // the scalar discrete spectrum.
        let cfg = ModelConfig::bernoulli(2, 1.0).unwrap();
        let b = BoxOperator::free(cfg, 3, 8).unwrap();
        let h = b.grid_step();
        let x_len = 6.0;
        let mut expect: Vec<f64> = Vec::new();
        for k in 1..40 {
            let base = 4.0 / (h * h) * ((k as f64) * std::f64::consts::PI * h / (2.0 * x_len)).sin().powi(2);
            for s in [-1.0, 1.0] {
                let v = base + s;
                if (-0.5..=3.0).contains(&v) {
                    expect.push(v);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        let got = box_eigenvalues_fd(&b, -0.5, 3.0).unwrap();
        assert_eq!(got.len(), expect.len());
        for (g, e) in got.iter().zip(&expect) {
            assert_relative_eq!(*g, *e, epsilon = 1e-6);
        }
    }

    #[test]
    fn window_listing_is_consistent_with_counts() {
        let cfg = ModelConfig::bernoulli(2, 0.5).unwrap();
        let b = BoxOperator::sample(cfg, 4, 8, 23).unwrap();
        let a = b.assemble();
        let (lo, hi) = (0.0, 12.0);
        let vals = eigenvalues_in_window(&a, lo, hi, TOL_EIG).unwrap();
        let expect = a.count_below_robust(hi, TOL_EIG).unwrap()
            - a.count_below_robust(lo, TOL_EIG).unwrap();
        assert_eq!(vals.len(), expect);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "sorted ascending");
    }

    #[test]
    fn eigenpair_refines_bisection_value() {
        let b = d1_box();
        let (lambda, v) = eigenpair_near(&b, 1.1, 0.5).unwrap();
        assert_relative_eq!(lambda, 1.129112363921904, epsilon = 1e-7);
        let a = b.assemble();
        let resid = (a.matvec(&v) - &v * lambda).norm();
        assert!(resid < 1e-6, "eigen-residual {resid}");
        assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenpair_requires_a_nearby_eigenvalue() {
        let b = d1_box();
        assert!(eigenpair_near(&b, 0.1, 0.2).is_err());
    }
}
