//! Timelike-line space, the canonical localization and its verification
//! harness.

mod harness;
mod intersect;
mod kmap;
mod mc;
mod measure;
pub(crate) mod quadrature;
mod state;

pub use harness::{
    additivity_check, causality_check, covariance_check, localization_probability, AdditivityReport,
    CausalityReport, CovarianceReport,
};
pub use intersect::{
    lightlike_intersection, line_meets_region, line_surface_intersection, line_surface_intersection_from,
    max_iterations, Intersection, LightlikeLine,
};
pub use kmap::{k_inverse, k_jacobian_det, k_map};
pub use mc::{MCEstimate, McPlan, Tally};
pub use measure::{n_measure, n_measure_mc, VELOCITY_BALL};
pub use state::{StateDensity, VelocityLaw};
