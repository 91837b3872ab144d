//! Maximal achronal surfaces as 1-Lipschitz graphs, regions on them, sampled
//! causal-structure checkers and regions of influence.

mod checks;
mod influence;
mod region;
mod set;
mod surface;

pub use checks::{
    analytic_lightlike_miss, causal_base_check, cauchy_surface_check, is_spacelike_sampled, lightlike_segment_check,
    lipschitz_estimate, lipschitz_sample, CausalBaseReport, CausalBaseVerdict, CausalWitness, CauchyReport,
    CauchyVerdict, LipschitzSample, DEFAULT_RADII,
};
pub use influence::{influence_indicator, region_of_influence, sampled_subset};
pub use region::Region;
pub use set::SpatialSet;
pub use surface::{AchronalSurface, GridSurface};
