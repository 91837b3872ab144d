//! Energy and mass on momentum line space, the fibration of the positive
//! region over the mass interval, the transform onto fibred mass shells,
//! and the representations and spin multiplicities that go with it.

mod multiplicity;
mod reps;
mod shell;

pub use multiplicity::{
    couplings, multiplicity, multiplicity_table, peter_weyl_dimension_check, tallied_multiplicity, PeterWeylReport,
    SpinBlock,
};
pub use reps::{
    apply_w_interval, apply_w_irreducible, apply_w_mom, intertwiner_defect, iota_isometry_check, iota_transform,
    unitarity_interval, unitarity_irreducible, unitarity_mom, GaussianSpinorState, IsometryReport, NormProposal,
    NormReport, SpinorValue,
};
pub use shell::{
    act_on_point, density_identity, energy, in_positive_region, in_positive_region_alt, iota_density, k_jacobian,
    k_m_inverse, k_m_map, mass_squared, pull_back, rest_velocity, s_matrix, spin_factor_identity_defect,
    MassShellPoint, MomentumVelocityPoint, SpinContext,
};
