//! Small numeric helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Spectral norm (largest singular value) via full SVD.
///
/// Intended for small dense matrices; use [`spectral_norm_est`] for large
/// blocks where a power iteration is cheaper.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let svd = nalgebra::linalg::SVD::new_unordered(m.clone(), false, false);
    svd.singular_values.amax()
}

/// Spectral norm estimate by power iteration on `t(M) M`.
///
/// Converges monotonically from below; `rel_tol` controls the stopping test
/// on successive Rayleigh quotients.
pub fn spectral_norm_est(m: &DMatrix<f64>, rel_tol: f64, max_iter: usize) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    // Deterministic start with all nonzero components.
    let mut v = DVector::from_fn(cols, |i, _| 1.0 + 0.5 * ((i % 7) as f64) / 7.0);
    v /= v.norm();
    let mut sigma = 0.0_f64;
    for _ in 0..max_iter {
        let w = m * &v;
        let mut u = m.transpose() * w;
        let n = u.norm();
        if n == 0.0 {
            return 0.0;
        }
        u /= n;
        let s = n.sqrt();
        if (s - sigma).abs() <= rel_tol * s.max(f64::MIN_POSITIVE) {
            return s;
        }
        sigma = s;
        v = u;
    }
    sigma
}

/// `k` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect(),
    }
}

/// Sample mean and (n-1)-normalized standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// 95% two-sided z quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion at 95% confidence.
///
/// Always contains the point estimate `k/n` and stays inside `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the exact bound is the boundary itself; clamp
    // so roundoff cannot push it past the point estimate.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Ordinary least squares `y ~ intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LineFit { slope, intercept, r2, points: n })
}

/// Standard normal draw (Box-Muller; consumes two uniforms).
pub fn normal_draw<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.random();
        return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    }
}

/// Random unit vector, uniform on the sphere.
pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| normal_draw(rng));
        let n = v.norm();
        if n > 1e-100 {
            return v / n;
        }
    }
}

/// Projective distance between lines spanned by unit vectors:
/// sine of the principal angle.
pub fn projective_distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let c = a.dot(b).abs().min(1.0);
    (1.0 - c * c).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spectral_norm_matches_hand_case() {
        // [[3,0],[0,-4]] has spectral norm 4.
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -4.0]);
        assert_relative_eq!(spectral_norm(&m), 4.0, max_relative = 1e-14);
        assert_relative_eq!(spectral_norm_est(&m, 1e-12, 200), 4.0, max_relative = 1e-9);
    }

    #[test]
    fn power_iteration_agrees_with_svd_on_rectangles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = DMatrix::from_fn(7, 13, |_, _| normal_draw(&mut rng));
            let a = spectral_norm(&m);
            let b = spectral_norm_est(&m, 1e-12, 2000);
            assert_relative_eq!(a, b, max_relative = 1e-7);
        }
    }

    #[test]
    fn wilson_contains_point_estimate() {
        // Frozen case: k=390, n=400 -> [0.9545984121283544, 0.986364908254064].
        let (lo, hi) = wilson_interval(390, 400);
        assert_relative_eq!(lo, 0.9545984121283544, max_relative = 1e-12);
        assert_relative_eq!(hi, 0.986364908254064, max_relative = 1e-12);
        for &(k, n) in &[(0u64, 10u64), (10, 10), (3, 7), (199, 400)] {
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert_relative_eq!(f.slope, 2.5, max_relative = 1e-13);
        assert_relative_eq!(f.intercept, -1.0, max_relative = 1e-12);
        assert_relative_eq!(f.r2, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn projective_distance_is_sign_blind() {
        let a = DVector::from_vec(vec![1.0, 0.0]);
        let b = DVector::from_vec(vec![-1.0, 0.0]);
        assert!(projective_distance(&a, &b) < 1e-15);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        assert_relative_eq!(projective_distance(&a, &c), 1.0);
    }
}
