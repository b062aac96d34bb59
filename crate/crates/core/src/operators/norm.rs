use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Spectral norm of `m` by power iteration on `mᵀm`.
///
/// Stops once the relative change of the estimate drops below `tol`.
/// The zero matrix has norm 0.
pub fn estimate_operator_norm(m: &Matrix, iterations: usize, tol: f64) -> Result<f64> {
    if m.is_empty() || m.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = Vector::from_fn(m.ncols(), |_, _| rng.random_range(0.5..1.5));
    v /= v.norm();
    let mut estimate = 0.0f64;
    for _ in 0..iterations {
        let w = m.tr_mul(&(m * &v));
        let next = w.norm();
        if next == 0.0 {
            // started in the kernel of m; perturb deterministically
            v = Vector::from_fn(m.ncols(), |_, _| rng.random_range(-1.0..1.0));
            v /= v.norm();
            continue;
        }
        v = w / next;
        if (next - estimate).abs() <= tol * next {
            return Ok(next.sqrt());
        }
        estimate = next;
    }
    Err(Error::NoConvergence(iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let one = Matrix::from_element(1, 1, 2.0);
        assert!((estimate_operator_norm(&one, 100, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        let nil = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!((estimate_operator_norm(&nil, 100, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        // largest root of s^2 - 30 s + 4 = 0 is the squared singular value
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let exact = ((30.0 + (900.0f64 - 16.0).sqrt()) / 2.0).sqrt();
        assert!((exact - 5.4649857).abs() < 1e-7);
        assert!((estimate_operator_norm(&m, 1000, 1e-14).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_svd() {
        let m = Matrix::from_fn(4, 3, |i, j| ((i * 3 + j) as f64).cos());
        let est = estimate_operator_norm(&m, 10_000, 1e-14).unwrap();
        assert!((est - crate::linalg::spectral_norm(&m)).abs() < 1e-8);
    }

    #[test]
    fn reports_budget_exhaustion() {
        // nearly repeated singular values converge slowly
        let m = Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, 0.999_999]));
        assert!(matches!(estimate_operator_norm(&m, 2, 1e-15), Err(Error::NoConvergence(2))));
    }
}
