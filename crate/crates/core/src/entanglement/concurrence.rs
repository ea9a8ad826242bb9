//! Pairwise concurrences of the defect triple.
//!
//! The defect reduced density matrix reduces, after tracing out one qubit, to
//! a two-qubit X state: nonzero entries appear only on the diagonal and the
//! anti-diagonal. For X states the Wootters concurrence collapses to a closed
//! form in four matrix entries, which is what [`concurrence_adjacent`] and
//! [`concurrence_outer`] evaluate. The full spin-flip construction
//! ([`wootters_oracle`]) is kept as an independent check; it applies to any
//! real two-qubit density matrix.
//!
//! Reflection symmetry of the defect pattern makes the two adjacent pairs
//! (1,2) and (2,3) share one concurrence value, so a single formula serves
//! both.

use nalgebra::DMatrix;

use crate::rdm::DefectRdm;
use crate::scalar::{real, Real};

/// Concurrence of an adjacent defect pair, from the X-state closed form.
///
/// Evaluates `2 max{0, |rho12 + rho35| - sqrt((rho00 + rho44)(rho33 + rho77))}`
/// on the 8x8 matrix entries. Equals the (2,3)-pair value by reflection.
pub fn concurrence_adjacent<T: Real>(rdm: &DefectRdm<T>) -> T {
    concurrence_adjacent_matrix(&rdm.to_matrix())
}

/// X-state concurrence of qubits (2,3) evaluated on a raw 8x8 matrix.
pub fn concurrence_adjacent_matrix<T: Real>(m: &DMatrix<T>) -> T {
    assert_eq!((m.nrows(), m.ncols()), (8, 8), "expected an 8x8 matrix");
    let coherence = (m[(1, 2)] + m[(3, 5)]).abs();
    let floor = ((m[(0, 0)] + m[(4, 4)]) * (m[(3, 3)] + m[(7, 7)])).max(T::zero());
    (real::<T>(2.0) * (coherence - floor.sqrt())).max(T::zero())
}

/// Concurrence of the outer defect pair (qubits 1 and 3).
///
/// Evaluates `2 max{0, |rho14 + rho36| - sqrt((rho00 + rho22)(rho55 + rho77))}`.
pub fn concurrence_outer<T: Real>(rdm: &DefectRdm<T>) -> T {
    concurrence_outer_matrix(&rdm.to_matrix())
}

/// X-state concurrence of qubits (1,3) evaluated on a raw 8x8 matrix.
pub fn concurrence_outer_matrix<T: Real>(m: &DMatrix<T>) -> T {
    assert_eq!((m.nrows(), m.ncols()), (8, 8), "expected an 8x8 matrix");
    let coherence = (m[(1, 4)] + m[(3, 6)]).abs();
    let floor = ((m[(0, 0)] + m[(2, 2)]) * (m[(5, 5)] + m[(7, 7)])).max(T::zero());
    (real::<T>(2.0) * (coherence - floor.sqrt())).max(T::zero())
}

/// Traces out qubit 1; the result lives on qubits (2,3).
pub fn trace_out_first<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    partial_trace(m, |a, b, c| (a, 2 * b + c))
}

/// Traces out qubit 2; the result lives on qubits (1,3).
pub fn trace_out_middle<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    partial_trace(m, |a, b, c| (b, 2 * a + c))
}

/// Traces out qubit 3; the result lives on qubits (1,2).
pub fn trace_out_third<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    partial_trace(m, |a, b, c| (c, 2 * a + b))
}

/// Sums over the qubit that `index_map` sends to the first slot; the second
/// slot is the surviving two-qubit index.
fn partial_trace<T: Real>(
    m: &DMatrix<T>,
    index_map: impl Fn(usize, usize, usize) -> (usize, usize),
) -> DMatrix<T> {
    assert_eq!((m.nrows(), m.ncols()), (8, 8), "expected an 8x8 matrix");
    let mut out = DMatrix::zeros(4, 4);
    for row in 0..8 {
        let (tr_r, keep_r) = index_map(row >> 2 & 1, row >> 1 & 1, row & 1);
        for col in 0..8 {
            let (tr_c, keep_c) = index_map(col >> 2 & 1, col >> 1 & 1, col & 1);
            if tr_r == tr_c {
                out[(keep_r, keep_c)] += m[(row, col)];
            }
        }
    }
    out
}

/// Full two-qubit concurrence of a real 4x4 density matrix.
///
/// Builds the spin-flipped partner through the antidiagonal flip matrix,
/// takes the square roots of the eigenvalues of `sqrt(rho) rho~ sqrt(rho)`,
/// and returns `max{0, s1 - s2 - s3 - s4}` with the roots descending. Used
/// as the oracle that the X-state closed forms must match.
pub fn wootters_oracle<T: Real>(rho: &DMatrix<T>) -> T {
    assert_eq!((rho.nrows(), rho.ncols()), (4, 4), "expected a 4x4 matrix");
    let (vals, vecs) = T::eigh(rho.clone()).expect("4x4 symmetric eigendecomposition converges");
    let mut sqrt_rho: DMatrix<T> = DMatrix::zeros(4, 4);
    for k in 0..4 {
        let s = vals[k].max(T::zero()).sqrt();
        let v = vecs.column(k);
        for i in 0..4 {
            for j in 0..4 {
                sqrt_rho[(i, j)] += s * v[i] * v[j];
            }
        }
    }

    // Spin flip on two qubits: antidiagonal sign pattern (-, +, +, -).
    let mut y: DMatrix<T> = DMatrix::zeros(4, 4);
    y[(0, 3)] = -T::one();
    y[(1, 2)] = T::one();
    y[(2, 1)] = T::one();
    y[(3, 0)] = -T::one();
    let rho_tilde = &y * rho * &y;

    let mut b: DMatrix<T> = &sqrt_rho * rho_tilde * &sqrt_rho;
    // Symmetrize away rounding before the second eigendecomposition.
    for i in 0..4 {
        for j in (i + 1)..4 {
            let avg = (b[(i, j)] + b[(j, i)]) * real(0.5);
            b[(i, j)] = avg;
            b[(j, i)] = avg;
        }
    }
    let (bvals, _) = T::eigh(b).expect("4x4 symmetric eigendecomposition converges");
    let s: Vec<T> = bvals.iter().map(|&x| x.max(T::zero()).sqrt()).collect();
    (s[3] - s[2] - s[1] - s[0]).max(T::zero())
}
