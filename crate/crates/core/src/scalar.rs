//! Scalar abstraction for the numerical core.
//!
//! Every algorithm in this crate is written against the [`Real`] trait so the
//! same code instantiates at `f32` or `f64`. Public types default their scalar
//! parameter to `f64`, which is the precision all documented tolerances assume.

use nalgebra::{DMatrix, DVector};

/// Real scalar usable throughout the crate.
///
/// Combines nalgebra's field operations with `num-traits` conversions. The
/// associated eigensolver hook lets concrete scalars override the dense
/// symmetric eigendecomposition with a faster backend.
pub trait Real:
    nalgebra::RealField
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Copy
    + Default
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Dense symmetric eigendecomposition, eigenvalues ascending, eigenvectors
    /// orthonormal in the columns of the returned matrix. `None` signals a
    /// convergence failure in the backend.
    fn eigh(matrix: DMatrix<Self>) -> Option<(DVector<Self>, DMatrix<Self>)> {
        eigh_fallback(matrix)
    }

    /// Name of the eigensolver backend selected for this scalar.
    fn eigh_backend() -> &'static str {
        "nalgebra"
    }
}

/// Converts an `f64` literal or intermediate into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 converts to any Real scalar")
}

/// Pure-Rust eigendecomposition used when no system backend is available.
pub(crate) fn eigh_fallback<T: Real>(matrix: DMatrix<T>) -> Option<(DVector<T>, DMatrix<T>)> {
    let n = matrix.nrows();
    let se = matrix.try_symmetric_eigen(T::default_epsilon() * real(32.0), 10_000)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let values = DVector::from_iterator(n, order.iter().map(|&q| se.eigenvalues[q]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &q) in order.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(q));
    }
    Some((values, vectors))
}

impl Real for f32 {}

impl Real for f64 {
    #[cfg(have_system_lapack)]
    fn eigh(matrix: DMatrix<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
        crate::lapack::eigh_f64(matrix)
    }

    #[cfg(have_system_lapack)]
    fn eigh_backend() -> &'static str {
        "lapack-dsyevd"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_matrix<T: Real>(n: usize) -> DMatrix<T> {
        // Deterministic symmetric test matrix with known spread.
        DMatrix::from_fn(n, n, |i, j| {
            let base = ((i * 31 + j * 17 + (i * j) % 7) % 13) as f64 / 13.0;
            let sym = if i <= j { base } else { ((j * 31 + i * 17 + (i * j) % 7) % 13) as f64 / 13.0 };
            real::<T>(sym + if i == j { 2.0 } else { 0.0 })
        })
    }

    #[test]
    fn eigh_sorted_and_orthonormal() {
        let n = 24;
        let m = sample_matrix::<f64>(n);
        let (vals, vecs) = f64::eigh(m.clone()).expect("eigh converges");
        for q in 1..n {
            assert!(vals[q] >= vals[q - 1], "eigenvalues must ascend");
        }
        let gram = vecs.transpose() * &vecs;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - target).abs() < 1e-12,
                    "gram[{i}][{j}] = {}",
                    gram[(i, j)]
                );
            }
        }
        // Reconstruction A = Q diag Q^T.
        let rec = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((rec - m).norm() < 1e-11);
    }

    #[test]
    fn eigh_backend_agrees_with_fallback() {
        let m = sample_matrix::<f64>(16);
        let (va, _) = f64::eigh(m.clone()).unwrap();
        let (vb, _) = eigh_fallback(m).unwrap();
        for q in 0..16 {
            assert!((va[q] - vb[q]).abs() < 1e-11);
        }
    }

    #[test]
    fn eigh_f32_instantiates() {
        let m = sample_matrix::<f32>(8);
        let (vals, vecs) = f32::eigh(m.clone()).expect("f32 eigh converges");
        let rec = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((rec - m).norm() < 1e-3);
    }
}
