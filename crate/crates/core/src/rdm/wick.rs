//! Wick-theorem evaluation of three-site spin-operator expectations in the
//! free-fermion ground state.
//!
//! Every reduced-density-matrix entry is the ground-state expectation of a
//! product of single-site operators at the defect sites: spin projectors for
//! diagonal bits and raising/lowering operators (with their z-strings over
//! the sites in between) for off-diagonal bits. In Majorana variables
//! `x = c + c^dag`, `y = -i (c - c^dag)` each factor is a short polynomial in
//! Majorana monomials, the full entry is their product, and each monomial's
//! expectation is `i^n Pf(K_sub)` over the window covariance K.
//!
//! Strings outside the defect window cancel exactly: the physical entries
//! carry an even number of raising/lowering operators, each contributing the
//! identical parity string over the sites left of the window, and those
//! squares collapse to the identity. Odd counts have zero expectation by
//! fermion parity, so window-local data is always sufficient.

use super::pfaffian::{pfaffian, PfaffianError};
use crate::scalar::Real;
use crate::spectrum::CorrelationData;
use nalgebra::DMatrix;

/// Sorted, distinct Majorana indices; site-local index `l` owns `x = 2l` and
/// `y = 2l + 1`.
type Mono = Vec<u16>;

/// One polynomial term: complex coefficient `re + i im` times a monomial.
#[derive(Debug, Clone)]
struct Term<T> {
    re: T,
    im: T,
    mono: Mono,
}

#[derive(Debug, Clone)]
pub(crate) struct MajoranaPoly<T> {
    terms: Vec<Term<T>>,
}

impl<T: Real> MajoranaPoly<T> {
    fn new(terms: Vec<Term<T>>) -> Self {
        Self { terms }
    }

    /// Product with monomial canonicalization: concatenated index lists are
    /// merge-sorted with a transposition sign, and repeated indices cancel in
    /// adjacent pairs since each Majorana squares to one.
    fn mul(&self, other: &Self) -> Self {
        let mut terms: Vec<Term<T>> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let (mono, negate) = merge_monomials(&a.mono, &b.mono);
                // (a.re + i a.im)(b.re + i b.im), then the merge sign.
                let mut re = a.re * b.re - a.im * b.im;
                let mut im = a.re * b.im + a.im * b.re;
                if negate {
                    re = -re;
                    im = -im;
                }
                if let Some(t) = terms.iter_mut().find(|t| t.mono == mono) {
                    t.re += re;
                    t.im += im;
                } else {
                    terms.push(Term { re, im, mono });
                }
            }
        }
        Self::new(terms)
    }

    /// Ground-state expectation over the covariance encoded by `corr`,
    /// returned as (real part, imaginary part).
    pub(crate) fn expectation(
        &self,
        corr: &CorrelationData<T>,
    ) -> Result<(T, T), PfaffianError> {
        let mut re = T::zero();
        let mut im = T::zero();
        for term in &self.terms {
            if term.mono.len() % 2 == 1 {
                // Odd fermion parity: expectation vanishes identically.
                continue;
            }
            let n = term.mono.len() / 2;
            let k = DMatrix::from_fn(term.mono.len(), term.mono.len(), |r, c| {
                covariance_entry(corr, term.mono[r], term.mono[c])
            });
            let pf = pfaffian(&k)?;
            // Accumulate (term coefficient) * i^n * pf.
            let (tre, tim) = match n % 4 {
                0 => (term.re, term.im),
                1 => (-term.im, term.re),
                2 => (-term.re, -term.im),
                _ => (term.im, -term.re),
            };
            re += tre * pf;
            im += tim * pf;
        }
        Ok((re, im))
    }
}

/// Merges two sorted distinct lists, counting the transpositions needed and
/// cancelling equal pairs. Returns (canonical monomial, sign is negative).
fn merge_monomials(a: &[u16], b: &[u16]) -> (Mono, bool) {
    let mut out: Vec<u16> = Vec::with_capacity(a.len() + b.len());
    let mut swaps = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-elements.
            swaps += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    // Cancel adjacent equal pairs (m^2 = 1); removal of an adjacent pair
    // needs no extra transpositions.
    let mut canon: Mono = Vec::with_capacity(out.len());
    for v in out {
        if canon.last() == Some(&v) {
            canon.pop();
        } else {
            canon.push(v);
        }
    }
    (canon, swaps % 2 == 1)
}

/// Covariance K with `<m_p m_q> = delta_pq + i K_pq`: zero within the x and y
/// sectors, `K[x_a, y_b] = delta_ab - 2 C_ab` across them.
fn covariance_entry<T: Real>(corr: &CorrelationData<T>, p: u16, q: u16) -> T {
    let (sa, ya) = ((p / 2) as usize, p % 2 == 1);
    let (sb, yb) = ((q / 2) as usize, q % 2 == 1);
    if ya == yb {
        return T::zero();
    }
    let kron = if sa == sb { T::one() } else { T::zero() };
    let d = kron - (corr.matrix[(sa, sb)] + corr.matrix[(sa, sb)]);
    if ya {
        -d
    } else {
        d
    }
}

fn x_of(l: usize) -> u16 {
    2 * l as u16
}

fn y_of(l: usize) -> u16 {
    2 * l as u16 + 1
}

/// Spin-up projector `(1 - i x y) / 2` at window-local site `l`.
fn proj_up<T: Real>(l: usize) -> MajoranaPoly<T> {
    let half = T::one() / (T::one() + T::one());
    MajoranaPoly::new(vec![
        Term { re: half, im: T::zero(), mono: vec![] },
        Term { re: T::zero(), im: -half, mono: vec![x_of(l), y_of(l)] },
    ])
}

/// Spin-down projector `(1 + i x y) / 2` at window-local site `l`.
fn proj_down<T: Real>(l: usize) -> MajoranaPoly<T> {
    let half = T::one() / (T::one() + T::one());
    MajoranaPoly::new(vec![
        Term { re: half, im: T::zero(), mono: vec![] },
        Term { re: T::zero(), im: half, mono: vec![x_of(l), y_of(l)] },
    ])
}

/// Parity string over window-local sites `0..l`: product of `-i x_j y_j`.
fn window_string<T: Real>(l: usize) -> MajoranaPoly<T> {
    // (-i)^l times the sorted monomial x_0 y_0 ... x_{l-1} y_{l-1}.
    let mono: Mono = (0..l).flat_map(|j| [x_of(j), y_of(j)]).collect();
    let (re, im) = match l % 4 {
        0 => (T::one(), T::zero()),
        1 => (T::zero(), -T::one()),
        2 => (-T::one(), T::zero()),
        _ => (T::zero(), T::one()),
    };
    MajoranaPoly::new(vec![Term { re, im, mono }])
}

/// Spin lowering operator (up to down, i.e. fermion creation) with its
/// z-string inside the window: `string(l) * (x - i y) / 2`.
fn lower<T: Real>(l: usize) -> MajoranaPoly<T> {
    let half = T::one() / (T::one() + T::one());
    let cdag = MajoranaPoly::new(vec![
        Term { re: half, im: T::zero(), mono: vec![x_of(l)] },
        Term { re: T::zero(), im: -half, mono: vec![y_of(l)] },
    ]);
    window_string(l).mul(&cdag)
}

/// Spin raising operator (down to up, fermion annihilation) with its window
/// z-string: `string(l) * (x + i y) / 2`.
fn raise<T: Real>(l: usize) -> MajoranaPoly<T> {
    let half = T::one() / (T::one() + T::one());
    let c = MajoranaPoly::new(vec![
        Term { re: half, im: T::zero(), mono: vec![x_of(l)] },
        Term { re: T::zero(), im: half, mono: vec![y_of(l)] },
    ]);
    window_string(l).mul(&c)
}

/// Expectation `<|ket><bra|>` for three-bit window states, with bit 2 on the
/// leftmost defect and bit value 1 meaning spin-down/occupied. `corr` must
/// cover the full window `2d + 1` sites; the defects sit at local positions
/// `0`, `d`, `2d`.
pub(crate) fn entry_expectation<T: Real>(
    corr: &CorrelationData<T>,
    d: usize,
    bra: usize,
    ket: usize,
) -> Result<(T, T), PfaffianError> {
    debug_assert!(bra < 8 && ket < 8);
    debug_assert_eq!(corr.sites.len(), 2 * d + 1);
    let mut op: Option<MajoranaPoly<T>> = None;
    for (bit, local) in [(2usize, 0usize), (1, d), (0, 2 * d)] {
        let (b, k) = ((bra >> bit) & 1, (ket >> bit) & 1);
        let factor = match (b, k) {
            (0, 0) => proj_up(local),
            (1, 1) => proj_down(local),
            // |ket><bra| per site: |1><0| lowers, |0><1| raises.
            (0, 1) => lower(local),
            _ => raise(local),
        };
        op = Some(match op {
            None => factor,
            Some(p) => p.mul(&factor),
        });
    }
    op.unwrap().expectation(corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChainSpec;
    use crate::spectrum::diagonalize;

    #[test]
    fn merge_counts_transpositions() {
        // [1, 4] * [2, 3]: 2 jumps over 4 (one swap), 3 jumps over 4 (one
        // more); net even.
        let (mono, neg) = merge_monomials(&[1, 4], &[2, 3]);
        assert_eq!(mono, vec![1, 2, 3, 4]);
        assert!(!neg);
        let (mono, neg) = merge_monomials(&[2], &[1]);
        assert_eq!(mono, vec![1, 2]);
        assert!(neg);
        // Squares cancel without extra sign: x y * x y = -1 needs the merge
        // sign from y jumping over x.
        let (mono, neg) = merge_monomials(&[0, 1], &[0, 1]);
        assert!(mono.is_empty());
        assert!(neg);
    }

    #[test]
    fn projector_algebra_closes() {
        let up = proj_up::<f64>(0);
        let sq = up.mul(&up);
        // P^2 = P: same two terms.
        assert_eq!(sq.terms.len(), 2);
        for t in &sq.terms {
            let reference = up.terms.iter().find(|r| r.mono == t.mono).unwrap();
            assert!((t.re - reference.re).abs() < 1e-15);
            assert!((t.im - reference.im).abs() < 1e-15);
        }
        // P_up P_down = 0.
        let zero = up.mul(&proj_down(0));
        for t in &zero.terms {
            assert!(t.re.abs() < 1e-15 && t.im.abs() < 1e-15);
        }
    }

    #[test]
    fn polarized_state_projects_onto_vacuum() {
        // h = 5 puts every mode above zero: ground state has all spins up.
        let spec = ChainSpec::<f64>::new(32, 5.0, 0.5, 1);
        let s = diagonalize(&spec).unwrap();
        let corr = crate::spectrum::window_correlations(&spec, &s).unwrap();
        for bra in 0..8 {
            for ket in 0..8 {
                let (re, im) = entry_expectation(&corr, 1, bra, ket).unwrap();
                let want = if bra == 0 && ket == 0 { 1.0 } else { 0.0 };
                assert!(
                    (re - want).abs() < 1e-12 && im.abs() < 1e-12,
                    "entry ({bra},{ket}) = {re} + {im} i"
                );
            }
        }
    }

    #[test]
    fn diagonal_entries_sum_to_one() {
        let spec = ChainSpec::<f64>::new(64, 1.0, 0.8, 2);
        let s = diagonalize(&spec).unwrap();
        let corr = crate::spectrum::window_correlations(&spec, &s).unwrap();
        let mut trace = 0.0;
        for b in 0..8 {
            let (re, im) = entry_expectation(&corr, 2, b, b).unwrap();
            assert!(im.abs() < 1e-12, "imaginary diagonal at {b}");
            assert!(re > -1e-12, "negative probability at {b}");
            trace += re;
        }
        assert!((trace - 1.0).abs() < 1e-12, "trace {trace}");
    }

    #[test]
    fn single_site_occupation_matches_correlations() {
        // <P_down at center> must equal C at the center diagonal.
        let spec = ChainSpec::<f64>::new(64, 1.0, 0.8, 2);
        let s = diagonalize(&spec).unwrap();
        let corr = crate::spectrum::window_correlations(&spec, &s).unwrap();
        let center_local = 2;
        let pd = proj_down::<f64>(center_local);
        let (re, im) = pd.expectation(&corr).unwrap();
        assert!(im.abs() < 1e-14);
        assert!(
            (re - corr.matrix[(center_local, center_local)]).abs() < 1e-13,
            "occupation {re} vs {}",
            corr.matrix[(center_local, center_local)]
        );
    }
}
