//! Finite universes of events and the lattice of their ⊥-complete subsets.
//!
//! Every identity here is a statement about finite sets, so the checks are
//! exact. Grid universes also carry timelike lines, which makes the
//! determinacy set computable.

mod checks;
mod ops;
mod rcl;
mod universe;

pub use checks::{
    closure_law_check, determinacy_comparison, exhaustive_lab, orthomodularity_check, random_grid_universe,
    ClosureLawReport, DeterminacyReport, LatticeLabReport, OrthomodularityReport, SetWitness, MAX_WITNESSES,
};
pub use ops::{
    achronal_sets, closed_sets, determinacy_set, determinacy_set_with, is_achronal, is_perp_complete,
    perp_complement, perp_completion, realizable_directions, timelike_directions, GridDirection, MAX_ENUMERATED,
};
pub use rcl::{al_to_rcl_correspondence, maximal_achronal_subsets, RclMap, MAX_OPERATOR_DIM, WELL_DEFINED_TOL};
pub use universe::{EventSet, GridSpec, Universe, UniverseSpec, MAX_UNIVERSE};
