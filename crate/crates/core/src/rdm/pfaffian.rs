//! Pfaffian of small real antisymmetric matrices.
//!
//! Wick's theorem turns ground-state expectations of Majorana monomials into
//! Pfaffians of sub-blocks of the covariance matrix, so this is the numerical
//! core of the reduced-density-matrix construction. Matrices here are tiny
//! (at most 64x64 by contract, at most `2(2d+1)` in practice), so a dense
//! Parlett-Reid elimination with partial pivoting is both fast and accurate.

use crate::scalar::{real, Real};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PfaffianError {
    #[error("pfaffian needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("pfaffian dimension {0} exceeds the supported 64")]
    TooLarge(usize),
    #[error("matrix is not antisymmetric: |A + A^T| reaches {defect:e}")]
    NotAntisymmetric { defect: f64 },
}

/// Pfaffian of an even-dimensional real antisymmetric matrix (dim <= 64).
///
/// Uses Parlett-Reid-style skew elimination with partial pivoting: each 2x2
/// step contributes the pivot entry `A[k][k+1]`, row/column swaps flip the
/// sign, and a zero pivot column means the matrix is singular with Pf = 0.
/// The empty matrix has Pf = 1.
pub fn pfaffian<T: Real>(a: &DMatrix<T>) -> Result<T, PfaffianError> {
    let n = a.nrows();
    if a.ncols() != n || n % 2 != 0 {
        return Err(PfaffianError::OddDimension(if a.ncols() != n { n.max(a.ncols()) } else { n }));
    }
    if n > 64 {
        return Err(PfaffianError::TooLarge(n));
    }
    let scale = a.abs().max().max(T::one());
    let mut defect = T::zero();
    for i in 0..n {
        for j in 0..i {
            defect = defect.max((a[(i, j)] + a[(j, i)]).abs());
        }
    }
    if defect > real::<T>(1e-12) * scale {
        return Err(PfaffianError::NotAntisymmetric {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut m = a.clone();
    let mut pf = T::one();
    let mut k = 0usize;
    while k + 1 < n {
        // Partial pivot: bring the largest |m[i][k]|, i > k, into row k+1.
        let mut p = k + 1;
        for i in k + 2..n {
            if m[(i, k)].abs() > m[(p, k)].abs() {
                p = i;
            }
        }
        if m[(p, k)] == T::zero() {
            return Ok(T::zero());
        }
        if p != k + 1 {
            m.swap_rows(p, k + 1);
            m.swap_columns(p, k + 1);
            pf = -pf;
        }
        let pivot = m[(k, k + 1)];
        pf *= pivot;
        // Eliminate the trailing block: A' = A + tau b^T - b tau^T with
        // tau = A[k, k+2..] / pivot (row k) and b = A[k+2.., k+1].
        for i in k + 2..n {
            let tau = m[(k, i)] / pivot;
            for j in k + 2..n {
                let update = tau * m[(j, k + 1)] - m[(k, j)] / pivot * m[(i, k + 1)];
                m[(i, j)] += update;
            }
        }
        k += 2;
    }
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn random_antisymmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        a
    }

    /// First-row cofactor expansion; exponential but exact for tiny dims.
    fn pfaffian_recursive(a: &DMatrix<f64>) -> f64 {
        let n = a.nrows();
        if n == 0 {
            return 1.0;
        }
        let mut acc = 0.0;
        let mut sign = 1.0;
        for j in 1..n {
            let keep: Vec<usize> = (1..n).filter(|&i| i != j).collect();
            let sub = DMatrix::from_fn(n - 2, n - 2, |r, c| a[(keep[r], keep[c])]);
            acc += sign * a[(0, j)] * pfaffian_recursive(&sub);
            sign = -sign;
        }
        acc
    }

    #[test]
    fn two_by_two_is_the_upper_entry() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 3.5, -3.5, 0.0]);
        assert_eq!(pfaffian(&a).unwrap(), 3.5);
    }

    #[test]
    fn empty_matrix_has_unit_pfaffian() {
        let a = DMatrix::<f64>::zeros(0, 0);
        assert_eq!(pfaffian(&a).unwrap(), 1.0);
    }

    #[test]
    fn pair_swap_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_antisymmetric(6, &mut rng);
        let mut b = a.clone();
        b.swap_rows(1, 4);
        b.swap_columns(1, 4);
        let pa = pfaffian(&a).unwrap();
        let pb = pfaffian(&b).unwrap();
        assert!((pa + pb).abs() < 1e-12, "{pa} vs {pb}");
    }

    #[test]
    fn matches_recursive_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6, 8] {
            for _ in 0..20 {
                let a = random_antisymmetric(n, &mut rng);
                let fast = pfaffian(&a).unwrap();
                let slow = pfaffian_recursive(&a);
                assert!(
                    (fast - slow).abs() < 1e-11 * slow.abs().max(1.0),
                    "n={n}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let a = random_antisymmetric(10, &mut rng);
            let pf = pfaffian(&a).unwrap();
            let det = a.clone().lu().determinant();
            assert!(
                (pf * pf - det).abs() < 1e-9 * det.abs().max(1.0),
                "{} vs {det}",
                pf * pf
            );
        }
    }

    #[test]
    fn singular_matrix_gives_zero() {
        // Rank-deficient: row/column 2 entirely zero.
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = -1.0;
        assert_eq!(pfaffian(&a).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let odd = DMatrix::<f64>::zeros(3, 3);
        assert!(matches!(pfaffian(&odd), Err(PfaffianError::OddDimension(3))));
        let skewless = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            pfaffian(&skewless),
            Err(PfaffianError::NotAntisymmetric { .. })
        ));
        let huge = DMatrix::<f64>::zeros(66, 66);
        assert!(matches!(pfaffian(&huge), Err(PfaffianError::TooLarge(66))));
    }

    #[test]
    fn f32_matches_f64() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_antisymmetric(8, &mut rng);
        let a32 = a.map(|v| v as f32);
        let p64 = pfaffian(&a).unwrap();
        let p32 = pfaffian(&a32).unwrap();
        assert!((p64 - p32 as f64).abs() < 1e-4, "{p64} vs {p32}");
    }
}
