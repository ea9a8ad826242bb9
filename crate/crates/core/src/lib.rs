//! Ground-state entanglement of magnetic defect triples in a transverse-field
//! XX chain.
//!
//! The crate models a spin-1/2 ring with three equally spaced, equally strong
//! magnetic defects. Through the Jordan-Wigner mapping the chain is free
//! fermions, so exact ground-state correlations for chains of thousands of
//! sites are a single dense symmetric eigendecomposition away. From those
//! correlations the crate reconstructs the reduced density matrix of the three
//! defect spins and quantifies their genuine multipartite entanglement.
//!
//! Everything is generic over the floating-point scalar through
//! [`scalar::Real`]; `f64` is the default and the type the aliases at the
//! crate root fix.

pub mod entanglement;
pub mod greens;
pub mod model;
pub mod numopt;
pub mod rdm;
pub mod scalar;
pub mod spectrum;
pub mod sweep;

#[cfg(have_system_lapack)]
mod lapack;

pub use entanglement::{
    biseparability_witness, concurrence_adjacent, concurrence_outer, gme_lower_bound_hong,
    gme_lower_bound_ma, gme_pure, gme_rank2_analytic, gme_rank2_pa_form, measure_rdm, mix_seed,
    random_biseparable_state, tau3_support_check, three_tangle_pure, wootters_oracle, BoundResult,
    EntanglementError, MeasureReport, MeasureSettings, MeasureToggles,
};
pub use greens::{
    bound_state_energies, region_classify, BoundStateRegion, GreensError, ImpuritySet,
};
pub use model::{Boundary, ChainSpec, ModelError};
pub use rdm::exact::{exact_ground, rdm_exact, ExactGround};
pub use rdm::pfaffian::pfaffian;
pub use rdm::{
    rdm_from_correlations, rdm_matrix_full, w_decompose, DefectRdm, RdmError, WChannel,
    WDecomposition,
};
pub use scalar::Real;
pub use spectrum::{
    count_bound_states, diagonalize, ground_state_correlations, window_correlations,
    BoundStateCount, CorrelationData, SpectrumResult,
};
pub use sweep::{
    grid_values, parse_measures, run_rdm_dump, run_regions, run_spectrum, run_sweep, SweepError,
    SweepOutput, SweepPlan, SweepPoint,
};
