//! Smallest-eigenvalue computations and the closed-form oracle used to
//! cross-check the numerical solver.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::matrix::{MatrixError, SymmetricMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
}

fn to_dmatrix(m: &SymmetricMatrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = to_dmatrix(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min(m: &SymmetricMatrix) -> f64 {
    eigenvalues(m)[0]
}

/// Operator 2-norm of a symmetric matrix: the largest absolute eigenvalue.
pub fn spectral_norm(m: &SymmetricMatrix) -> f64 {
    eigenvalues(m).iter().fold(0.0, |acc, &v| acc.max(v.abs()))
}

/// `||a - b||_2` for symmetric matrices of equal dimension.
pub fn spectral_distance(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64, MatrixError> {
    if a.dim() != b.dim() {
        return Err(MatrixError::DimensionMismatch { a: a.dim(), b: b.dim() });
    }
    let n = a.dim();
    let diff = SymmetricMatrix::from_fn(n, |i, j| a.get(i, j) - b.get(i, j));
    Ok(spectral_norm(&diff))
}

/// The n x n all-ones matrix with its bottom-right corner lowered to
/// `1 - alpha`. Not a Gromov matrix in general; it is the fixture whose
/// smallest eigenvalue has the closed form below.
pub fn ones_corner_matrix(n: usize, alpha: f64) -> Result<SymmetricMatrix, SpectralError> {
    check_ones_corner_params(n, alpha)?;
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        if i == n - 1 && j == n - 1 {
            1.0 - alpha
        } else {
            1.0
        }
    }))
}

/// Closed-form smallest eigenvalue of [`ones_corner_matrix`]:
/// `(n - alpha - sqrt((n - alpha)^2 + 4 (n - 1) alpha)) / 2`.
pub fn ones_corner_lambda_min(n: usize, alpha: f64) -> Result<f64, SpectralError> {
    check_ones_corner_params(n, alpha)?;
    let nf = n as f64;
    let t = nf - alpha;
    Ok(0.5 * (t - (t * t + 4.0 * (nf - 1.0) * alpha).sqrt()))
}

fn check_ones_corner_params(n: usize, alpha: f64) -> Result<(), SpectralError> {
    if n < 2 {
        return Err(SpectralError::DimensionTooSmall(n));
    }
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(SpectralError::NonPositiveAlpha(alpha));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn branched_pair_matrix_spectrum() {
        // Two spokes of length 3 joined at distance 5 from the base vertex,
        // with a third base node at distance 2 on the stem. Eigenvalues are
        // (15 - sqrt(153))/2, 3, (15 + sqrt(153))/2.
        let m = sym(&[&[8.0, 5.0, 2.0], &[5.0, 8.0, 2.0], &[2.0, 2.0, 2.0]]);
        let ev = eigenvalues(&m);
        let s = 153f64.sqrt();
        assert!((ev[0] - (15.0 - s) / 2.0).abs() < 1e-9);
        assert!((ev[1] - 3.0).abs() < 1e-9);
        assert!((ev[2] - (15.0 + s) / 2.0).abs() < 1e-9);
        assert!((lambda_min(&m) - 1.315).abs() < 1e-3);
    }

    #[test]
    fn lambda_min_of_diagonal() {
        let m = sym(&[&[3.0, 0.0], &[0.0, 3.0]]);
        assert!((lambda_min(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ones_corner_closed_form_matches_solver() {
        let lm = ones_corner_lambda_min(3, 0.5).unwrap();
        assert!((lm - (2.5 - 10.25f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((lm - -0.3508).abs() < 1e-4);
        let m = ones_corner_matrix(3, 0.5).unwrap();
        assert!((lambda_min(&m) - lm).abs() < 1e-9);

        // n = 2, alpha = 1 is the matrix [[1, 1], [1, 0]].
        let lm = ones_corner_lambda_min(2, 1.0).unwrap();
        assert!((lm - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let m = sym(&[&[1.0, 1.0], &[1.0, 0.0]]);
        assert!((lambda_min(&m) - lm).abs() < 1e-9);
    }

    #[test]
    fn ones_corner_alpha_to_zero_limit() {
        // The all-ones matrix is rank one with lambda_min 0.
        for n in [2usize, 5, 9] {
            let lm = ones_corner_lambda_min(n, 1e-12).unwrap();
            assert!(lm.abs() < 1e-10, "n={n}: {lm}");
        }
    }

    #[test]
    fn ones_corner_parameter_errors() {
        assert!(matches!(ones_corner_lambda_min(1, 0.5), Err(SpectralError::DimensionTooSmall(1))));
        assert!(matches!(ones_corner_lambda_min(3, 0.0), Err(SpectralError::NonPositiveAlpha(_))));
        assert!(matches!(ones_corner_matrix(0, 1.0), Err(SpectralError::DimensionTooSmall(0))));
    }

    #[test]
    fn weyl_subadditivity_on_random_pairs() {
        // lambda_min(M + N) >= lambda_min(M) + lambda_min(N).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..7);
            let a = SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
            let b = SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
            let sum = SymmetricMatrix::from_fn(n, |i, j| a.get(i, j) + b.get(i, j));
            assert!(lambda_min(&sum) >= lambda_min(&a) + lambda_min(&b) - 1e-9);
        }
    }

    #[test]
    fn spectral_distance_requires_matching_dims() {
        let a = sym(&[&[1.0]]);
        let b = sym(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(spectral_distance(&a, &b).is_err());
        assert_eq!(spectral_distance(&a, &a).unwrap(), 0.0);
    }
}
