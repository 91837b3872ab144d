//! SL(2,ℂ), its covering map onto the Lorentz group, the Poincaré group law
//! and its actions on spacetime and on the space of timelike lines.

mod boost;
mod group;
pub mod random;
mod spinor;
mod wigner;

use nalgebra::Vector3;

pub use boost::{canonical_boost, canonical_boost_with_mass, wigner_rotation, wigner_rotation_with_mass};
pub use group::{act_on_line, act_on_point, line_action_rn_derivative, LinePoint, PoincareElement, TimelikeLine};
pub use spinor::{covering_map, from_hermitian, hermitian, pauli, SpinorMatrix, C64};
pub use wigner::{symmetric_power, wigner_d, wigner_d_with_limit, Spin, WignerDMatrix};

use crate::minkowski::FourVector;

/// `E(p, v) = p·v + μ√(1 − v²)`.
pub fn line_energy(mu: f64, p: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    p.dot(v) + mu * (1.0 - v.norm_squared()).sqrt()
}

/// `A·(p, v) = (ϖ(A·𝔭), A∗v)` with `𝔭 = (E(p, v), p)`; `A∗v` is the velocity
/// of `A·(1, v)`.
pub fn act_on_momentum_velocity(
    a: &SpinorMatrix,
    mu: f64,
    p: &Vector3<f64>,
    v: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    let pp = a.act(&FourVector::from_parts(line_energy(mu, p, v), p));
    (pp.spatial(), star(a, v))
}

/// The velocity action `A∗v`.
pub fn star(a: &SpinorMatrix, v: &Vector3<f64>) -> Vector3<f64> {
    let w = a.act(&FourVector::from_parts(1.0, v));
    w.spatial() / w.x0
}
