use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, numeric, Result};
use crate::minkowski::FourVector;
use crate::poincare::{
    canonical_boost_with_mass, line_energy, star, wigner_d, wigner_rotation_with_mass, Spin, SpinorMatrix,
    WignerDMatrix,
};
use crate::tolerances::{FD_STEP, J_MAX_DEFAULT, WIGNER_DRIFT};

/// Fixed parameters of the inducing representation: the mass parameter
/// `μ`, the spinor index `J` and a truncation for Peter–Weyl tallies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinContext {
    pub mu: f64,
    pub spin: Spin,
    #[serde(default = "default_l_max")]
    pub l_max: u32,
}

fn default_l_max() -> u32 {
    4
}

impl SpinContext {
    pub fn new(mu: f64, spin: Spin, l_max: u32) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("μ must be positive and finite, got {mu}")));
        }
        if spin.twice() > 2 * J_MAX_DEFAULT {
            return Err(invalid(format!("spin {spin} exceeds the supported maximum {J_MAX_DEFAULT}")));
        }
        Ok(Self { mu, spin, l_max })
    }

    pub fn dimension(&self) -> usize {
        self.spin.dimension()
    }
}

impl Default for SpinContext {
    fn default() -> Self {
        Self { mu: 1.0, spin: Spin::ZERO, l_max: default_l_max() }
    }
}

/// A point `(p, v)` of momentum line space, `|v| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumVelocityPoint {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl MomentumVelocityPoint {
    pub fn new(p: Vector3<f64>, v: Vector3<f64>) -> Result<Self> {
        if !(v.norm() < 1.0) || !p.iter().all(|c| c.is_finite()) {
            return Err(invalid(format!("need finite p and |v| < 1, got |v| = {}", v.norm())));
        }
        Ok(Self { p, v })
    }

    /// `(1, v)`.
    pub fn velocity4(&self) -> FourVector {
        FourVector::from_parts(1.0, &self.v)
    }
}

/// A point `(m, p, ω)` of the fibred mass shell, `|ω| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassShellPoint {
    pub m: f64,
    pub p: Vector3<f64>,
    pub omega: Vector3<f64>,
}

impl MassShellPoint {
    pub fn new(m: f64, p: Vector3<f64>, omega: Vector3<f64>) -> Result<Self> {
        if !((omega.norm() - 1.0).abs() <= 1e-12) {
            return Err(invalid(format!("ω must be a unit vector, |ω| = {}", omega.norm())));
        }
        if !(m > 0.0 && m.is_finite()) || !p.iter().all(|c| c.is_finite()) {
            return Err(invalid(format!("need m > 0 and finite p, got m = {m}")));
        }
        Ok(Self { m, p, omega })
    }

    /// `ε(p) = √(m² + p²)`.
    pub fn shell_energy(&self) -> f64 {
        (self.m * self.m + self.p.norm_squared()).sqrt()
    }

    /// `𝔭 = (ε(p), p)`.
    pub fn momentum4(&self) -> FourVector {
        FourVector::from_parts(self.shell_energy(), &self.p)
    }
}

/// `E(p, v) = p·v + μ√(1 − v²)`.
pub fn energy(ctx: &SpinContext, pt: &MomentumVelocityPoint) -> f64 {
    line_energy(ctx.mu, &pt.p, &pt.v)
}

/// `γ = E² − p²`, never above `μ²`.
pub fn mass_squared(ctx: &SpinContext, pt: &MomentumVelocityPoint) -> f64 {
    let e = energy(ctx, pt);
    e * e - pt.p.norm_squared()
}

/// Membership in `{E > 0, γ ≥ 0}`.
pub fn in_positive_region(ctx: &SpinContext, pt: &MomentumVelocityPoint) -> bool {
    energy(ctx, pt) > 0.0 && mass_squared(ctx, pt) >= 0.0
}

/// The same region read as `{E − |p| ≥ 0}`.
pub fn in_positive_region_alt(ctx: &SpinContext, pt: &MomentumVelocityPoint) -> bool {
    energy(ctx, pt) - pt.p.norm() >= 0.0
}

/// `A·(p, v)`.
pub fn act_on_point(ctx: &SpinContext, a: &SpinorMatrix, pt: &MomentumVelocityPoint) -> MomentumVelocityPoint {
    let (p, v) = crate::poincare::act_on_momentum_velocity(a, ctx.mu, &pt.p, &pt.v);
    MomentumVelocityPoint { p, v }
}

/// `(1 − m²/μ²)^{1/2} ω`, the rest-frame velocity of the fibre point.
pub fn rest_velocity(ctx: &SpinContext, sp: &MassShellPoint) -> Vector3<f64> {
    sp.omega * (1.0 - (sp.m / ctx.mu).powi(2)).sqrt()
}

/// `D^{(J)}` of a composed Wigner rotation. Near the singular fibres the
/// product of boosts drifts off SU(2) by more than a fresh matrix would, so
/// it is projected back once the drift is confirmed small.
pub(crate) fn spin_d(spin: Spin, r: &SpinorMatrix) -> Result<WignerDMatrix> {
    let drift = r.unitarity_defect();
    if drift > WIGNER_DRIFT {
        return Err(numeric(format!("Wigner rotation drifted {drift:e} off SU(2)")));
    }
    wigner_d(spin, &r.nearest_su2())
}

fn check_mass(ctx: &SpinContext, m: f64) -> Result<()> {
    if !(m > 0.0 && m < ctx.mu) {
        return Err(invalid(format!("mass {m} outside (0, {})", ctx.mu)));
    }
    Ok(())
}

/// `k_m(p, ω) = (p, Q(𝔭)∗(1 − m²/μ²)^{1/2} ω)`.
pub fn k_m_map(ctx: &SpinContext, sp: &MassShellPoint) -> Result<MomentumVelocityPoint> {
    check_mass(ctx, sp.m)?;
    let q = canonical_boost_with_mass(&sp.momentum4(), sp.m)?;
    Ok(MomentumVelocityPoint { p: sp.p, v: star(&q, &rest_velocity(ctx, sp)) })
}

/// `(m, p, ω)` with `m = √γ` and `ω = (1 − m²/μ²)^{−1/2} Q(𝔭)⁻¹∗v`.
pub fn k_m_inverse(ctx: &SpinContext, pt: &MomentumVelocityPoint) -> Result<MassShellPoint> {
    let gamma = mass_squared(ctx, pt);
    let mu2 = ctx.mu * ctx.mu;
    if !(gamma > 0.0 && gamma < mu2) || energy(ctx, pt) <= 0.0 {
        return Err(invalid(format!("γ = {gamma} outside (0, {mu2}) or nonpositive energy")));
    }
    let m = gamma.sqrt();
    let q = canonical_boost_with_mass(&FourVector::from_parts((gamma + pt.p.norm_squared()).sqrt(), &pt.p), m)?;
    let w = star(&q.inverse(), &pt.v) / (1.0 - gamma / mu2).sqrt();
    // ω is a unit vector up to rounding
    Ok(MassShellPoint { m, p: pt.p, omega: w / w.norm() })
}

/// `(m, A⁻¹·p, R(𝔭, A)⁻¹·ω)`, the fibre point carried along by `A⁻¹`.
pub fn pull_back(sp: &MassShellPoint, a: &SpinorMatrix) -> Result<MassShellPoint> {
    let k = sp.momentum4();
    let r = wigner_rotation_with_mass(&k, sp.m, a)?;
    let p = a.inverse().act(&k).spatial();
    let omega = r.inverse().act_spatial(&sp.omega);
    Ok(MassShellPoint { m: sp.m, p, omega: omega / omega.norm() })
}

/// Two unit vectors completing `ω` to an orthonormal frame.
fn tangent_frame(omega: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let seed = if omega.x.abs() < 0.6 { Vector3::x() } else { Vector3::y() };
    let e1 = (seed - omega * omega.dot(&seed)).normalize();
    (e1, omega.cross(&e1))
}

/// `|det Dk|` in an orthonormal chart of `]0, μ[ × ℝ³ × S₁`.
///
/// `k` leaves `p` alone, so only the 3×3 block `∂v/∂(m, ω)` matters; it is
/// taken by central differences with `ω` moved along two tangent vectors
/// and renormalized.
pub fn k_jacobian(ctx: &SpinContext, sp: &MassShellPoint) -> Result<f64> {
    check_mass(ctx, sp.m)?;
    let h = FD_STEP;
    if sp.m - h <= 0.0 || sp.m + h >= ctx.mu {
        return Err(numeric(format!("mass {} within the difference step of a singular fibre", sp.m)));
    }
    let (e1, e2) = tangent_frame(&sp.omega);
    let velocity = |m: f64, omega: Vector3<f64>| -> Result<Vector3<f64>> {
        Ok(k_m_map(ctx, &MassShellPoint { m, p: sp.p, omega: omega.normalize() })?.v)
    };
    let dm = (velocity(sp.m + h, sp.omega)? - velocity(sp.m - h, sp.omega)?) / (2.0 * h);
    let ds = (velocity(sp.m, sp.omega + e1 * h)? - velocity(sp.m, sp.omega - e1 * h)?) / (2.0 * h);
    let dt = (velocity(sp.m, sp.omega + e2 * h)? - velocity(sp.m, sp.omega - e2 * h)?) / (2.0 * h);
    let det = Matrix3::from_columns(&[dm, ds, dt]).determinant().abs();
    // tiny determinants near m → 0 at large |p| are mostly difference error,
    // but the density they give carries no weight
    if !det.is_finite() {
        return Err(numeric(format!("non-finite Jacobian at m = {}", sp.m)));
    }
    Ok(det)
}

/// `d = √(4π |det Dk|)`: the density making `ι` an isometry, with the
/// `4π` converting the area measure on `S₁` to the normalized one.
pub fn iota_density(ctx: &SpinContext, sp: &MassShellPoint) -> Result<f64> {
    Ok((4.0 * PI * k_jacobian(ctx, sp)?).sqrt())
}

/// `S(m, p, ω) = D^{(J)}(R(𝔴, Q(𝔭)⁻¹))` with `𝔴 = (1, (1 − m²/μ²)^{1/2} ω)`.
pub fn s_matrix(ctx: &SpinContext, sp: &MassShellPoint) -> Result<WignerDMatrix> {
    spin_d(ctx.spin, &s_rotation(ctx, sp)?)
}

fn s_rotation(ctx: &SpinContext, sp: &MassShellPoint) -> Result<SpinorMatrix> {
    check_mass(ctx, sp.m)?;
    let w = FourVector::from_parts(1.0, &rest_velocity(ctx, sp));
    let q = canonical_boost_with_mass(&sp.momentum4(), sp.m)?;
    wigner_rotation_with_mass(&w, sp.m / ctx.mu, &q.inverse())
}

/// Defect of `D(R(𝔭, A)) = S(m, p, ω) D(R(Q(𝔭)·𝔴, A)) S(m, A⁻¹·p, R(𝔭, A)⁻¹·ω)⁻¹`.
pub fn spin_factor_identity_defect(ctx: &SpinContext, sp: &MassShellPoint, a: &SpinorMatrix) -> Result<f64> {
    let k = sp.momentum4();
    let lhs = spin_d(ctx.spin, &wigner_rotation_with_mass(&k, sp.m, a)?)?;
    let boosted_w =
        canonical_boost_with_mass(&k, sp.m)?.act(&FourVector::from_parts(1.0, &rest_velocity(ctx, sp)));
    let middle = spin_d(ctx.spin, &wigner_rotation_with_mass(&boosted_w, sp.m / ctx.mu, a)?)?;
    let back = pull_back(sp, a)?;
    let s_back_inv = spin_d(ctx.spin, &s_rotation(ctx, &back)?.inverse())?;
    let rhs = s_matrix(ctx, sp)?.into_entries() * middle.entries() * s_back_inv.entries();
    Ok((lhs.entries() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Both sides of the density identity
/// `√(ε(A⁻¹·p)/ε(p)) = d(m, p, ω) / d(m, A⁻¹·p, R(𝔭, A)⁻¹·ω) · (A⁻¹·𝔳)₀^{−3/2}`,
/// where `𝔳 = (1, v)` is the velocity of `k(m, p, ω)`.
pub fn density_identity(ctx: &SpinContext, sp: &MassShellPoint, a: &SpinorMatrix) -> Result<(f64, f64)> {
    let back = pull_back(sp, a)?;
    let lhs = (back.shell_energy() / sp.shell_energy()).sqrt();
    let v = k_m_map(ctx, sp)?.velocity4();
    let rhs = iota_density(ctx, sp)? / iota_density(ctx, &back)? * a.inverse().act(&v).x0.powf(-1.5);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::random::{random_in_ball, random_sl2c, random_unit_vector};
    use crate::poincare::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(spin: Spin) -> SpinContext {
        SpinContext::new(1.0, spin, 3).unwrap()
    }

    fn random_shell(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> MassShellPoint {
        let m = rng.random_range(lo..hi);
        MassShellPoint::new(m, random_in_ball(rng, 2.0), random_unit_vector(rng)).unwrap()
    }

    #[test]
    fn energy_examples() {
        let c = ctx(Spin::ZERO);
        let pt = MomentumVelocityPoint::new(Vector3::new(3.0, -1.0, 2.0), Vector3::zeros()).unwrap();
        assert_eq!(energy(&c, &pt), 1.0);
        let pt = MomentumVelocityPoint::new(Vector3::zeros(), Vector3::new(0.0, 0.6, 0.0)).unwrap();
        assert!((energy(&c, &pt) - 0.8).abs() < 1e-15);
        let rest = MomentumVelocityPoint::new(Vector3::zeros(), Vector3::zeros()).unwrap();
        assert_eq!(mass_squared(&c, &rest), 1.0);
        let v: Vector3<f64> = Vector3::new(0.3, -0.4, 0.5);
        let on_top = MomentumVelocityPoint::new(v / (1.0 - v.norm_squared()).sqrt(), v).unwrap();
        assert!((mass_squared(&c, &on_top) - 1.0).abs() < 1e-12);
        assert!(MomentumVelocityPoint::new(Vector3::zeros(), Vector3::x()).is_err());
    }

    #[test]
    fn covariance_and_invariance() {
        let c = SpinContext::new(1.7, Spin::ZERO, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5000 {
            let a = random_sl2c(&mut rng, 1.5);
            let pt = MomentumVelocityPoint::new(random_in_ball(&mut rng, 3.0), random_in_ball(&mut rng, 0.95)).unwrap();
            let moved = act_on_point(&c, &a, &pt);
            let e = a.act(&FourVector::from_parts(energy(&c, &pt), &pt.p)).x0;
            assert!((e - energy(&c, &moved)).abs() <= 1e-9 * e.abs().max(1.0));
            let (g0, g1) = (mass_squared(&c, &pt), mass_squared(&c, &moved));
            assert!((g0 - g1).abs() <= 1e-9 * g0.abs().max(1.0));
            assert!(g0 <= c.mu * c.mu + 1e-12);
            assert_eq!(in_positive_region(&c, &pt), in_positive_region_alt(&c, &pt));
        }
    }

    #[test]
    fn fibre_maps_round_trip() {
        let c = SpinContext::new(1.3, Spin::HALF, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5000 {
            // ω is recovered by dividing by (1 − m²/μ²)^{1/2}, so stay clear of μ
            let sp = random_shell(&mut rng, 0.01, 1.2);
            let pt = k_m_map(&c, &sp).unwrap();
            assert!((energy(&c, &pt) - sp.shell_energy()).abs() < 1e-9 * sp.shell_energy());
            let back = k_m_inverse(&c, &pt).unwrap();
            // the boost squeezes v toward the cone by about (ε/m)², which the inverse undoes
            let conditioning = (sp.shell_energy() / sp.m).powi(2);
            assert!((back.omega - sp.omega).norm() < 1e-11 * conditioning.max(1e2));
            assert_eq!(back.p, sp.p);
        }
        let rest = MassShellPoint::new(0.6, Vector3::zeros(), Vector3::z()).unwrap();
        let pt = k_m_map(&ctx(Spin::ZERO), &rest).unwrap();
        assert!((pt.v - Vector3::z() * 0.8).norm() < 1e-15);
        assert!((energy(&ctx(Spin::ZERO), &pt) - 0.6).abs() < 1e-15);
        assert!(k_m_map(&ctx(Spin::ZERO), &MassShellPoint { m: 1.2, ..rest }).is_err());
    }

    #[test]
    fn lorentz_action_fibres() {
        // A⁻¹·k(m, p, ω) = k(m, A⁻¹·p, R(𝔭, A)⁻¹·ω)
        let c = ctx(Spin::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let sp = random_shell(&mut rng, 0.1, 0.9);
            let a = random_sl2c(&mut rng, 1.0);
            let moved = act_on_point(&c, &a.inverse(), &k_m_map(&c, &sp).unwrap());
            let fibre = k_m_map(&c, &pull_back(&sp, &a).unwrap()).unwrap();
            assert!((moved.p - fibre.p).norm() < 1e-9 * (1.0 + moved.p.norm()));
            assert!((moved.v - fibre.v).norm() < 1e-9);
        }
    }

    #[test]
    fn density_at_rest_momentum() {
        // at p = 0, v = (1 − m²/μ²)^{1/2} ω, so |det Dk| = m (1 − m²/μ²)^{1/2} / μ²
        let c = SpinContext::new(2.0, Spin::ZERO, 0).unwrap();
        for m in [0.1, 0.5, 1.0, 1.7] {
            let sp = MassShellPoint::new(m, Vector3::zeros(), Vector3::new(0.6, 0.0, 0.8)).unwrap();
            let exact = m * (1.0 - m * m / 4.0).sqrt() / 4.0;
            assert!((k_jacobian(&c, &sp).unwrap() / exact - 1.0).abs() < 1e-8);
        }
        let edge = MassShellPoint::new(1e-6, Vector3::zeros(), Vector3::z()).unwrap();
        assert!(matches!(k_jacobian(&c, &edge), Err(crate::Error::NumericFailure(_))));
    }

    #[test]
    fn s_matrix_examples() {
        let c = ctx(Spin::ONE);
        let rest = MassShellPoint::new(0.4, Vector3::zeros(), Vector3::y()).unwrap();
        let s = s_matrix(&c, &rest).unwrap().into_entries();
        assert!((s - nalgebra::DMatrix::<C64>::identity(3, 3)).iter().all(|z| z.norm() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let sp = random_shell(&mut rng, 0.05, 0.95);
            assert_eq!(s_matrix(&ctx(Spin::ZERO), &sp).unwrap().entries()[(0, 0)].re, 1.0);
            assert!(s_matrix(&c, &sp).unwrap().unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn appendix_identities() {
        let c = SpinContext::new(1.0, Spin::from_twice(3), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let sp = random_shell(&mut rng, 0.3, 0.7);
            let a = random_sl2c(&mut rng, 1.0);
            assert!(spin_factor_identity_defect(&c, &sp, &a).unwrap() < 1e-9);
            let (lhs, rhs) = density_identity(&c, &sp, &a).unwrap();
            assert!((lhs - rhs).abs() < 1e-6 * lhs, "{lhs} vs {rhs}");
        }
    }

    // the identity written with (A⁻¹·𝔴)₀ in place of (A⁻¹·𝔳)₀ fails
    // already for pure boosts, so the velocity of k(m, p, ω) is meant
    #[test]
    fn density_identity_needs_the_line_velocity() {
        let c = ctx(Spin::ZERO);
        let sp = MassShellPoint::new(0.5, Vector3::new(0.4, -0.2, 0.7), Vector3::x()).unwrap();
        let a = SpinorMatrix::boost(&Vector3::new(0.0, 0.6, 0.8), 0.9);
        let back = pull_back(&sp, &a).unwrap();
        let lhs = (back.shell_energy() / sp.shell_energy()).sqrt();
        let w = FourVector::from_parts(1.0, &rest_velocity(&c, &sp));
        let literal = iota_density(&c, &sp).unwrap() / iota_density(&c, &back).unwrap()
            * a.inverse().act(&w).x0.powf(-1.5);
        assert!((lhs - literal).abs() > 1e-3);
        let (lhs2, rhs) = density_identity(&c, &sp, &a).unwrap();
        assert_eq!(lhs, lhs2);
        assert!((lhs - rhs).abs() < 1e-6 * lhs);
    }
}
