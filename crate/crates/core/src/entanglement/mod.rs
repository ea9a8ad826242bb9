//! Entanglement measures for the three-defect reduced density matrix.
//!
//! The defect triple is a three-qubit system, so its entanglement content is
//! quantified by standard three-qubit tools:
//!
//! * pairwise concurrences from the closed X-state formulas
//!   ([`concurrence_adjacent`], [`concurrence_outer`]), validated against a
//!   full spin-flip oracle ([`wootters_oracle`]);
//! * pure-state measures: the bipartition-minimum GME concurrence
//!   ([`gme_pure`]) and the residual three-tangle ([`three_tangle_pure`]);
//! * the closed-form GME concurrence for states supported on the vacuum plus
//!   one spin flip ([`gme_rank2_analytic`]), where the convex roof is known;
//! * two certified lower bounds on the mixed-state GME concurrence, improved
//!   by optimizing over local unitary frames ([`gme_lower_bound_ma`],
//!   [`gme_lower_bound_hong`]);
//! * an iterative biseparability witness that tries to decompose the state
//!   into random biseparable pure states ([`biseparability_witness`]).
//!
//! Qubit 1 is the leftmost defect and occupies the most significant bit of
//! the 8-dimensional basis index, `b = 4 s_1 + 2 s_2 + s_3`.

mod bounds;
mod concurrence;
mod gme;
mod witness;

pub use bounds::{
    gme_lower_bound_hong, gme_lower_bound_hong_matrix, gme_lower_bound_ma,
    gme_lower_bound_ma_matrix, BoundResult, DEFAULT_BOUND_RUNS,
};
pub use concurrence::{
    concurrence_adjacent, concurrence_adjacent_matrix, concurrence_outer,
    concurrence_outer_matrix, trace_out_first, trace_out_middle, trace_out_third,
    wootters_oracle,
};
pub use gme::{gme_pure, gme_rank2_analytic, gme_rank2_pa_form, tau3_support_check, three_tangle_pure};
pub use witness::{
    biseparability_witness, biseparability_witness_matrix, random_biseparable_state,
    DEFAULT_WITNESS_ITERS, DEFAULT_WITNESS_SAMPLES,
};

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::numopt::NumOptError;
use crate::rdm::DefectRdm;
use crate::scalar::Real;

/// Failure modes of the entanglement measures.
#[derive(Debug, Error)]
pub enum EntanglementError {
    #[error("three-qubit state must have 8 components, got {len}")]
    WrongDimension { len: usize },
    #[error("state norm {norm} deviates from one beyond tolerance")]
    NotNormalized { norm: f64 },
    #[error("density matrix is not rank two on the vacuum plus one-flip sector: {detail}")]
    NotRankTwo { detail: String },
    #[error("dense eigendecomposition failed to converge")]
    EigenFailed,
    #[error(transparent)]
    NumOpt(#[from] NumOptError),
}

/// All entanglement quantities evaluated at one parameter point.
///
/// Measures that were not requested stay `None`. `gme_analytic` is also
/// `None` when the reduced density matrix is not in the rank-2 regime the
/// closed form requires. The trailing metadata records the randomized
/// protocol sizes so a report is reproducible on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport<T: Real = f64> {
    /// Concurrence of the adjacent defect pair (equal for both such pairs).
    pub c12: Option<T>,
    /// Concurrence of the outer defect pair.
    pub c13: Option<T>,
    /// Whether every support eigenvector carries zero three-tangle.
    pub tau3_support_check: bool,
    /// Closed-form GME concurrence, when the rank-2 precondition holds.
    pub gme_analytic: Option<T>,
    /// Optimized antidiagonal-coherence lower bound on the GME concurrence.
    pub gme_lb_ma: Option<T>,
    /// Optimized one-flip-coherence lower bound on the GME concurrence.
    pub gme_lb_hong: Option<T>,
    /// Biseparability witness value; negative certifies biseparability.
    pub witness_w: Option<T>,
    /// Master seed behind every randomized protocol at this point.
    pub seed: u64,
    /// Multistart count used by the optimized bounds.
    pub bound_runs: usize,
    /// Iteration count used by the witness.
    pub witness_iters: usize,
    /// Biseparable samples per witness iteration.
    pub witness_samples: usize,
}

impl<T: Real> MeasureReport<T> {
    /// Report with no measures evaluated.
    pub fn empty(seed: u64) -> Self {
        MeasureReport {
            c12: None,
            c13: None,
            tau3_support_check: false,
            gme_analytic: None,
            gme_lb_ma: None,
            gme_lb_hong: None,
            witness_w: None,
            seed,
            bound_runs: 0,
            witness_iters: 0,
            witness_samples: 0,
        }
    }
}

/// Which measures [`measure_rdm`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureToggles {
    /// Adjacent-pair concurrence.
    pub c12: bool,
    /// Outer-pair concurrence.
    pub c13: bool,
    /// Closed-form GME concurrence (rank-2 regime only).
    pub gme: bool,
    /// Optimized antidiagonal-coherence lower bound.
    pub ma: bool,
    /// Optimized one-flip-coherence lower bound.
    pub hong: bool,
    /// Iterative biseparability witness (the slow path).
    pub witness: bool,
}

impl MeasureToggles {
    /// Everything except the witness, which costs minutes per point.
    pub fn fast() -> Self {
        MeasureToggles {
            c12: true,
            c13: true,
            gme: true,
            ma: true,
            hong: true,
            witness: false,
        }
    }

    /// Every measure, witness included.
    pub fn all() -> Self {
        MeasureToggles {
            witness: true,
            ..Self::fast()
        }
    }

    /// No measures at all; [`measure_rdm`] then returns an empty report.
    pub fn none() -> Self {
        MeasureToggles {
            c12: false,
            c13: false,
            gme: false,
            ma: false,
            hong: false,
            witness: false,
        }
    }

    /// True when no measure is enabled.
    pub fn is_empty(&self) -> bool {
        *self == Self::none()
    }
}

impl Default for MeasureToggles {
    fn default() -> Self {
        Self::fast()
    }
}

/// Sizes of the randomized protocols behind [`measure_rdm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureSettings {
    /// Enabled measures.
    pub toggles: MeasureToggles,
    /// Multistart runs per optimized lower bound.
    pub bound_runs: usize,
    /// Witness iterations.
    pub witness_iters: usize,
    /// Biseparable samples per witness iteration.
    pub witness_samples: usize,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        MeasureSettings {
            toggles: MeasureToggles::default(),
            bound_runs: DEFAULT_BOUND_RUNS,
            witness_iters: DEFAULT_WITNESS_ITERS,
            witness_samples: DEFAULT_WITNESS_SAMPLES,
        }
    }
}

/// SplitMix64 finalizer; decorrelates derived seeds from their source.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `seed` and a salt.
///
/// Every randomized protocol at one parameter point draws its own child so
/// that enabling or disabling one measure never perturbs another.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// Evaluates the enabled measures on one reduced density matrix.
///
/// The three-tangle support check always runs (it is one small
/// eigendecomposition). The closed-form GME concurrence quietly stays `None`
/// outside its rank-2 regime; every other failure is an error. Each
/// randomized measure receives its own child of `seed` via [`mix_seed`], so
/// reports are deterministic given `(rdm, settings, seed)`.
pub fn measure_rdm<T: Real>(
    rdm: &DefectRdm<T>,
    settings: &MeasureSettings,
    seed: u64,
) -> Result<MeasureReport<T>, EntanglementError> {
    let toggles = &settings.toggles;
    let mut report = MeasureReport::empty(seed);
    report.tau3_support_check = tau3_support_check(rdm);
    if toggles.c12 {
        report.c12 = Some(concurrence_adjacent(rdm));
    }
    if toggles.c13 {
        report.c13 = Some(concurrence_outer(rdm));
    }
    if toggles.gme {
        match gme_rank2_analytic(rdm) {
            Ok(value) => report.gme_analytic = Some(value),
            Err(EntanglementError::NotRankTwo { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    if toggles.ma {
        let bound = gme_lower_bound_ma(rdm, settings.bound_runs, mix_seed(seed, 1))?;
        report.gme_lb_ma = Some(bound.value);
        report.bound_runs = settings.bound_runs;
    }
    if toggles.hong {
        let bound = gme_lower_bound_hong(rdm, settings.bound_runs, mix_seed(seed, 2))?;
        report.gme_lb_hong = Some(bound.value);
        report.bound_runs = settings.bound_runs;
    }
    if toggles.witness {
        report.witness_w = Some(biseparability_witness(
            rdm,
            settings.witness_iters,
            settings.witness_samples,
            mix_seed(seed, 3),
        ));
        report.witness_iters = settings.witness_iters;
        report.witness_samples = settings.witness_samples;
    }
    Ok(report)
}

/// Basis index of the lone-qubit amplitude `a` and pair amplitude index `r`
/// for bipartition `split` (0, 1, 2 single out qubit 1, 2, 3).
#[inline]
pub(crate) fn embed(split: usize, a: usize, r: usize) -> usize {
    match split {
        0 => 4 * a + r,
        1 => 4 * (r >> 1) + 2 * a + (r & 1),
        2 => 2 * r + a,
        _ => unreachable!("three qubits admit three bipartitions"),
    }
}

/// Widens an `f64` matrix to complex entries.
pub(crate) fn complexify<T: Real>(m: &DMatrix<T>) -> DMatrix<Complex<T>> {
    m.map(|x| Complex::new(x, T::zero()))
}

/// Hermitian eigendecomposition of a small complex matrix, eigenvalues
/// ascending.
pub(crate) fn eigh_hermitian<T: Real>(
    m: &DMatrix<Complex<T>>,
) -> Option<(Vec<T>, DMatrix<Complex<T>>)> {
    let n = m.nrows();
    let se = m
        .clone()
        .try_symmetric_eigen(T::default_epsilon() * crate::scalar::real(32.0), 10_000)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<T> = order.iter().map(|&q| se.eigenvalues[q]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &q) in order.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(q));
    }
    Some((values, vectors))
}
