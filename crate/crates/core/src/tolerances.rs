//! Numerical tolerances used across the crate.
//!
//! Every threshold a predicate or checker compares against lives here, so a
//! report can print the full set in its header.

/// Relative scale of the light-cone sign test; multiplied by
/// `max(1, |z|^2)` (Euclidean) before comparing a quadratic form to zero.
pub const CLASSIFY_REL: f64 = 1e-12;

/// Determinant deviation allowed for a matrix accepted as unimodular.
pub const UNIMODULAR: f64 = 1e-10;

/// Deviation from `B†B = I` allowed for a matrix accepted as unitary.
pub const UNITARY: f64 = 1e-10;

/// Number of spinor compositions after which products are renormalized.
pub const RENORMALIZE_EVERY: usize = 64;

/// Largest spin accepted by the Wigner D-matrix builder.
pub const J_MAX_DEFAULT: u32 = 6;

/// A ratio `|τ(x)-τ(y)|/|x-y| >= 1 - STRICT` is treated as lightlike.
pub const STRICT: f64 = 1e-9;

/// Margin granted to region-of-influence membership.
pub const ROI: f64 = 1e-9;

/// Distance from the graph below which a point counts as lying on a surface.
pub const ON_SURFACE: f64 = 1e-9;

/// Allowed slack on the declared Lipschitz bound of a valid surface.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

/// Residual at which the line/surface fixed-point solve stops.
pub const FIXED_POINT: f64 = 1e-11;

/// Fixed iteration budget added on top of the contraction estimate.
pub const FIXED_POINT_BASE_ITER: usize = 200;

/// Velocities with `|v| >= V_MAX` are resampled.
pub const V_MAX: f64 = 1.0 - 1e-6;

/// Upper exponent of the expanding bracket `[-2^k, 2^k]`.
pub const BRACKET_MAX_EXP: i32 = 40;

/// Maximum nesting depth of a spatial-set tree.
pub const SET_TREE_DEPTH: usize = 32;

/// Central-difference step for Jacobians.
pub const FD_STEP: f64 = 1e-5;

/// Minimum number of batches behind a batch-means standard error.
pub const MIN_BATCHES: usize = 32;

/// Unitarity defect a composed Wigner rotation may build up on badly
/// conditioned mass fibres before it is projected back onto SU(2).
pub const WIGNER_DRIFT: f64 = 1e-6;

/// Name/value pairs of every constant above, in declaration order.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("classify_rel", CLASSIFY_REL),
        ("unimodular", UNIMODULAR),
        ("unitary", UNITARY),
        ("renormalize_every", RENORMALIZE_EVERY as f64),
        ("j_max_default", J_MAX_DEFAULT as f64),
        ("strict", STRICT),
        ("roi", ROI),
        ("on_surface", ON_SURFACE),
        ("lipschitz_slack", LIPSCHITZ_SLACK),
        ("fixed_point", FIXED_POINT),
        ("fixed_point_base_iter", FIXED_POINT_BASE_ITER as f64),
        ("v_max", V_MAX),
        ("bracket_max_exp", BRACKET_MAX_EXP as f64),
        ("set_tree_depth", SET_TREE_DEPTH as f64),
        ("fd_step", FD_STEP),
        ("min_batches", MIN_BATCHES as f64),
        ("wigner_drift", WIGNER_DRIFT),
    ]
}
