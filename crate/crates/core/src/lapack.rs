//! Thin binding to the system LAPACK divide-and-conquer symmetric eigensolver.
//!
//! Compiled only when the build script finds a system BLAS/LAPACK library.

use nalgebra::{DMatrix, DVector};

extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
}

/// Eigendecomposition of a symmetric matrix via `dsyevd`.
///
/// Consumes the matrix as workspace. Returns ascending eigenvalues and the
/// matching orthonormal eigenvectors, or `None` when LAPACK reports failure.
pub(crate) fn eigh_f64(mut matrix: DMatrix<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "eigh requires a square matrix");
    if n == 0 {
        return Some((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let ni = i32::try_from(n).ok()?;
    let mut w = vec![0.0f64; n];
    let lwork = 1 + 6 * n + 2 * n * n;
    let liwork = 3 + 5 * n;
    let mut work = vec![0.0f64; lwork];
    let mut iwork = vec![0i32; liwork];
    let mut info = 0i32;
    unsafe {
        dsyevd_(
            &b'V',
            &b'L',
            &ni,
            matrix.as_mut_slice().as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &(lwork as i32),
            iwork.as_mut_ptr(),
            &(liwork as i32),
            &mut info,
        );
    }
    if info != 0 {
        return None;
    }
    Some((DVector::from_vec(w), matrix))
}
