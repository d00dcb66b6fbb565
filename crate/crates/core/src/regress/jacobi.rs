//! Cyclic Jacobi eigendecomposition for small dense symmetric matrices.
//!
//! Sweeps annihilate every off-diagonal pair in turn until the off-diagonal
//! mass falls below a relative threshold. The accumulated rotations form an
//! orthonormal eigenvector matrix. Quadratic convergence makes a handful of
//! sweeps sufficient at the sizes used here (a few dozen rows at most).

use crate::scalar::RealScalar;

use super::{Matrix, RegressError};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (unsorted) and the matrix whose columns are the matching
/// eigenvectors.
pub(super) struct SymmetricEigen<F: RealScalar> {
    pub values: Vec<F>,
    pub vectors: Matrix<F>,
}

/// Decomposes a symmetric matrix. The off-diagonal convergence target is
/// [`crate::scalar::Scalar::tolerance`] relative to the Frobenius norm.
pub(super) fn jacobi_eigen_sym<F: RealScalar>(
    input: &Matrix<F>,
) -> Result<SymmetricEigen<F>, RegressError> {
    assert_eq!(
        input.rows(),
        input.cols(),
        "eigendecomposition needs a square matrix"
    );
    let n = input.rows();
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let threshold = F::tolerance() * input.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a.get(p, q).abs();
            }
        }
        if off <= threshold {
            let values = (0..n).map(|i| a.get(i, i)).collect();
            return Ok(SymmetricEigen { values, vectors: v });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    Err(RegressError::NoConvergence)
}

/// One Jacobi rotation in the (p, q) plane, zeroing a[p][q].
fn rotate<F: RealScalar>(a: &mut Matrix<F>, v: &mut Matrix<F>, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == F::zero() {
        return;
    }
    let half = F::from(0.5).expect("0.5 is representable");
    let theta = (a.get(q, q) - a.get(p, p)) * half / apq;
    // Smaller root of t² + 2θt − 1 = 0; degrades gracefully to t ≈ 0 when
    // θ overflows.
    let t = {
        let denom = theta.abs() + (theta * theta + F::one()).sqrt();
        if denom.is_finite() {
            F::one() / denom * theta.signum()
        } else {
            F::zero()
        }
    };
    let c = F::one() / (t * t + F::one()).sqrt();
    let s = t * c;
    let n = a.rows();

    // A <- A·J
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    // A <- Jᵀ·A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    // V <- V·J
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

/// Eigen pairs sorted by descending eigenvalue.
pub(super) fn sorted_eigen_desc<F: RealScalar>(eigen: SymmetricEigen<F>) -> (Vec<F>, Matrix<F>) {
    let n = eigen.values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigen.values[j]
            .partial_cmp(&eigen.values[i])
            .expect("eigenvalues of a finite symmetric matrix are finite")
    });
    let values = order.iter().map(|&i| eigen.values[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eigen.vectors.get(r, order[c]));
    (values, vectors)
}
