use nalgebra::{DVector, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linespace::{MCEstimate, McPlan, Tally};
use crate::minkowski::FourVector;
use crate::poincare::random::{gaussian, random_in_ball, random_unit_vector};
use crate::poincare::{wigner_rotation_with_mass, PoincareElement, Spin, C64};
use crate::tolerances::{FD_STEP, V_MAX};

use super::shell::{
    energy, in_positive_region, iota_density, k_m_map, mass_squared, pull_back, s_matrix, spin_d, MassShellPoint,
    MomentumVelocityPoint, SpinContext,
};

/// A value of a spinor field, a vector of `ℂ^{2J+1}`.
pub type SpinorValue = DVector<C64>;

fn check_dim(value: &SpinorValue, dim: usize) -> Result<()> {
    if value.len() != dim {
        return Err(invalid(format!("field has {} components, the spin needs {dim}", value.len())));
    }
    Ok(())
}

fn phase(a: &FourVector, k: &FourVector) -> C64 {
    C64::from_polar(1.0, a.dot(k))
}

/// `(W(𝔞, A)ψ)(p, v) = (A⁻¹·𝔳)₀^{−3/2} e^{i𝔞·𝔭} D^{(J)}(R(𝔳, A)) ψ(A⁻¹·(p, v))`
/// with `𝔳 = (1, v)` and `𝔭 = (E(p, v), p)`.
pub fn apply_w_mom<F>(ctx: &SpinContext, g: &PoincareElement, psi: F, pt: &MomentumVelocityPoint) -> Result<SpinorValue>
where
    F: Fn(&MomentumVelocityPoint) -> Result<SpinorValue>,
{
    let a = &g.spinor;
    let inv = a.inverse();
    let vel = pt.velocity4();
    let factor = inv.act(&vel).x0.powf(-1.5);
    let k = FourVector::from_parts(energy(ctx, pt), &pt.p);
    let speed = pt.v.norm();
    let d = spin_d(ctx.spin, &wigner_rotation_with_mass(&vel, ((1.0 - speed) * (1.0 + speed)).sqrt(), a)?)?;
    let source = super::shell::act_on_point(ctx, &inv, pt);
    let value = psi(&source)?;
    check_dim(&value, ctx.dimension())?;
    Ok(d.into_entries() * value * (phase(&g.translation, &k) * factor))
}

/// `(W(𝔞, A)φ)(m, p, ω) = (ε(A⁻¹·p)/ε(p))^{1/2} e^{i𝔞·𝔭} D^{(J)}(R(𝔭, A))
/// φ(m, A⁻¹·p, R(𝔭, A)⁻¹·ω)` with `𝔭 = (ε(p), p)`; each mass fibre is kept.
pub fn apply_w_interval<F>(ctx: &SpinContext, g: &PoincareElement, phi: F, sp: &MassShellPoint) -> Result<SpinorValue>
where
    F: Fn(&MassShellPoint) -> Result<SpinorValue>,
{
    let k = sp.momentum4();
    let d = spin_d(ctx.spin, &wigner_rotation_with_mass(&k, sp.m, &g.spinor)?)?;
    let source = pull_back(sp, &g.spinor)?;
    let factor = (source.shell_energy() / sp.shell_energy()).sqrt();
    let value = phi(&source)?;
    check_dim(&value, ctx.dimension())?;
    Ok(d.into_entries() * value * (phase(&g.translation, &k) * factor))
}

/// The irreducible `(m, j)` representation on `L²(ℝ³, ℂ^{2j+1})`:
/// `√(ε(A⁻¹·p)/ε(p)) e^{i𝔞·𝔭} D^{(j)}(R(𝔭, A)) φ(A⁻¹·p)`.
pub fn apply_w_irreducible<F>(
    m: f64,
    j: Spin,
    g: &PoincareElement,
    phi: F,
    p: &Vector3<f64>,
) -> Result<SpinorValue>
where
    F: Fn(&Vector3<f64>) -> Result<SpinorValue>,
{
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid(format!("mass must be positive, got {m}")));
    }
    let eps = |p: &Vector3<f64>| (m * m + p.norm_squared()).sqrt();
    let k = FourVector::from_parts(eps(p), p);
    let d = spin_d(j, &wigner_rotation_with_mass(&k, m, &g.spinor)?)?;
    let source = g.spinor.inverse().act(&k).spatial();
    let value = phi(&source)?;
    check_dim(&value, j.dimension())?;
    Ok(d.into_entries() * value * (phase(&g.translation, &k) * (eps(&source) / eps(p)).sqrt()))
}

/// `(ιψ)(m, p, ω) = d(m, p, ω) S(m, p, ω) ψ(k(m, p, ω))`.
pub fn iota_transform<F>(ctx: &SpinContext, psi: F, sp: &MassShellPoint) -> Result<SpinorValue>
where
    F: Fn(&MomentumVelocityPoint) -> Result<SpinorValue>,
{
    let value = psi(&k_m_map(ctx, sp)?)?;
    check_dim(&value, ctx.dimension())?;
    Ok(s_matrix(ctx, sp)?.into_entries() * value * C64::from(iota_density(ctx, sp)?))
}

/// A Gaussian wave packet with a fixed spinor, read on each carrier space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSpinorState {
    pub center: Vector3<f64>,
    pub width: f64,
    pub velocity_width: f64,
    /// Direction along which the profile on `S₁` tilts.
    pub tilt: Vector3<f64>,
    pub components: SpinorValue,
}

impl GaussianSpinorState {
    pub fn new(center: Vector3<f64>, width: f64, velocity_width: f64, components: SpinorValue) -> Result<Self> {
        if !(width > 0.0 && velocity_width > 0.0) {
            return Err(invalid("widths must be positive"));
        }
        if components.is_empty() {
            return Err(invalid("a state needs at least one component"));
        }
        Ok(Self { center, width, velocity_width, tilt: Vector3::new(0.3, -0.2, 0.5), components })
    }

    /// A packet at `center` with unit components along a fixed complex direction.
    pub fn standard(spin: Spin, center: Vector3<f64>) -> Self {
        let n = spin.dimension();
        let components = DVector::from_fn(n, |i, _| C64::new(1.0 + i as f64, 0.5 - 0.25 * i as f64));
        let components = components.clone() / C64::from(components.norm());
        Self::new(center, 0.6, 0.35, components).expect("valid widths")
    }

    fn momentum_profile(&self, p: &Vector3<f64>) -> f64 {
        (-(p - self.center).norm_squared() / (4.0 * self.width * self.width)).exp()
    }

    pub fn on_line_space(&self, pt: &MomentumVelocityPoint) -> Result<SpinorValue> {
        let vel = (-pt.v.norm_squared() / (4.0 * self.velocity_width.powi(2))).exp();
        Ok(&self.components * C64::from(self.momentum_profile(&pt.p) * vel))
    }

    /// Restricted to `{E > 0, γ ≥ 0}`.
    pub fn on_positive_region(&self, ctx: &SpinContext, pt: &MomentumVelocityPoint) -> Result<SpinorValue> {
        if in_positive_region(ctx, pt) {
            self.on_line_space(pt)
        } else {
            Ok(DVector::zeros(self.components.len()))
        }
    }

    pub fn on_mass_shell(&self, sp: &MassShellPoint) -> Result<SpinorValue> {
        let ang = (0.5 * sp.omega.dot(&self.tilt)).exp();
        Ok(&self.components * C64::from(self.momentum_profile(&sp.p) * ang))
    }

    pub fn on_momentum(&self, p: &Vector3<f64>) -> Result<SpinorValue> {
        Ok(&self.components * C64::from(self.momentum_profile(p)))
    }
}

/// Sampling region and proposal for an `L²` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormProposal {
    /// Standard deviation of the Gaussian momentum proposal about 0.
    pub momentum_scale: f64,
    /// Mass window for fibred fields.
    pub mass_window: (f64, f64),
}

impl Default for NormProposal {
    fn default() -> Self {
        Self { momentum_scale: 1.5, mass_window: (0.3, 0.7) }
    }
}

impl NormProposal {
    fn momentum<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vector3<f64>, f64) {
        let s = self.momentum_scale;
        let p = Vector3::from_fn(|_, _| s * gaussian(rng));
        let density = (-p.norm_squared() / (2.0 * s * s)).exp() / (2.0 * std::f64::consts::PI * s * s).powf(1.5);
        (p, density)
    }
}

/// `∫‖ψ‖²` before and after a transformation, with the paired difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub before: MCEstimate,
    pub after: MCEstimate,
    pub difference: MCEstimate,
    /// `z_score() ≤ 3`.
    pub passes: bool,
}

fn norm_sq(v: &SpinorValue) -> f64 {
    v.norm_squared()
}

/// Relative size below which a paired difference is rounding, not signal.
const ROUNDING: f64 = 1e-12;

impl NormReport {
    /// The paired difference in standard errors. A difference that is only
    /// rounding scores zero, since its standard error is rounding too.
    pub fn z_score(&self) -> f64 {
        let gap = self.difference.value.abs();
        if gap <= ROUNDING * self.before.value.abs() {
            0.0
        } else {
            gap / self.difference.std_error
        }
    }
}

fn paired_report(plan: &McPlan, tallies: &[[Tally; 3]]) -> NormReport {
    let pick = |k: usize| tallies.iter().map(|t| t[k]).collect::<Vec<_>>();
    let (before, after, difference) = (plan.estimate(&pick(0)), plan.estimate(&pick(1)), plan.estimate(&pick(2)));
    let mut report = NormReport { before, after, difference, passes: false };
    report.passes = report.z_score() <= 3.0;
    report
}

fn paired<S>(n_samples: usize, seed: u64, sample: S) -> Result<NormReport>
where
    S: Fn(&mut ChaCha8Rng) -> Result<(f64, f64)> + Sync,
{
    let plan = McPlan::new(n_samples, seed)?;
    let tallies = plan.run(|rng, n| {
        let mut t = [Tally::default(); 3];
        for _ in 0..n {
            let (before, after) = sample(rng)?;
            t[0].push(before);
            t[1].push(after);
            t[2].push(after - before);
        }
        Ok(t)
    })?;
    Ok(paired_report(&plan, &tallies))
}

/// Norm preservation of the line-space momentum representation.
pub fn unitarity_mom(
    ctx: &SpinContext,
    g: &PoincareElement,
    state: &GaussianSpinorState,
    proposal: &NormProposal,
    n_samples: usize,
    seed: u64,
) -> Result<NormReport> {
    let ball = 4.0 / 3.0 * std::f64::consts::PI * V_MAX.powi(3);
    paired(n_samples, seed, |rng| {
        let (p, q) = proposal.momentum(rng);
        let pt = MomentumVelocityPoint { p, v: random_in_ball(rng, V_MAX) };
        let weight = ball / q;
        let before = norm_sq(&state.on_line_space(&pt)?) * weight;
        let after = norm_sq(&apply_w_mom(ctx, g, |u| state.on_line_space(u), &pt)?) * weight;
        Ok((before, after))
    })
}

fn sample_shell(rng: &mut ChaCha8Rng, proposal: &NormProposal) -> (MassShellPoint, f64) {
    let (lo, hi) = proposal.mass_window;
    let m = rng.random_range(lo..hi);
    let (p, q) = proposal.momentum(rng);
    (MassShellPoint { m, p, omega: random_unit_vector(rng) }, (hi - lo) / q)
}

/// Norm preservation of the fibred representation on the mass window.
pub fn unitarity_interval(
    ctx: &SpinContext,
    g: &PoincareElement,
    state: &GaussianSpinorState,
    proposal: &NormProposal,
    n_samples: usize,
    seed: u64,
) -> Result<NormReport> {
    check_window(ctx, proposal)?;
    paired(n_samples, seed, |rng| {
        let (sp, weight) = sample_shell(rng, proposal);
        let before = norm_sq(&state.on_mass_shell(&sp)?) * weight;
        let after = norm_sq(&apply_w_interval(ctx, g, |s| state.on_mass_shell(s), &sp)?) * weight;
        Ok((before, after))
    })
}

/// Norm preservation of the irreducible `(m, j)` representation.
pub fn unitarity_irreducible(
    m: f64,
    j: Spin,
    g: &PoincareElement,
    state: &GaussianSpinorState,
    proposal: &NormProposal,
    n_samples: usize,
    seed: u64,
) -> Result<NormReport> {
    paired(n_samples, seed, |rng| {
        let (p, q) = proposal.momentum(rng);
        let before = norm_sq(&state.on_momentum(&p)?) / q;
        let after = norm_sq(&apply_w_irreducible(m, j, g, |k| state.on_momentum(k), &p)?) / q;
        Ok((before, after))
    })
}

fn check_window(ctx: &SpinContext, proposal: &NormProposal) -> Result<()> {
    let (lo, hi) = proposal.mass_window;
    if !(lo > 0.0 && lo < hi && hi < ctx.mu) {
        return Err(invalid(format!("mass window ({lo}, {hi}) must lie inside (0, {})", ctx.mu)));
    }
    Ok(())
}

/// `∫_Π ‖ψ‖² dλ⁶` against `∫ ‖ιψ‖² dν`, estimated independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub line_space: MCEstimate,
    pub mass_shell: MCEstimate,
    /// Agreement within three combined standard errors.
    pub passes: bool,
}

pub fn iota_isometry_check(
    ctx: &SpinContext,
    state: &GaussianSpinorState,
    proposal: &NormProposal,
    n_samples: usize,
    seed: u64,
) -> Result<IsometryReport> {
    let ball = 4.0 / 3.0 * std::f64::consts::PI * V_MAX.powi(3);
    let plan = McPlan::new(n_samples, seed)?;
    let positive = plan.run(|rng, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let (p, q) = proposal.momentum(rng);
            let pt = MomentumVelocityPoint { p, v: random_in_ball(rng, V_MAX) };
            // the fibres 0 < m < μ fill the region up to null sets
            let gamma = mass_squared(ctx, &pt);
            let inside = in_positive_region(ctx, &pt) && gamma > 0.0 && gamma < ctx.mu * ctx.mu;
            t.push(if inside { norm_sq(&state.on_line_space(&pt)?) * ball / q } else { 0.0 });
        }
        Ok(t)
    })?;
    // the difference step keeps the sampled masses off the singular fibres;
    // the slivers left out carry a fraction of order 1e-10 of the norm
    let margin = 2.0 * FD_STEP;
    let shell_plan = McPlan::new(n_samples, seed.wrapping_add(1))?;
    let fibred = shell_plan.run(|rng, n| {
        let mut t = Tally::default();
        let window = NormProposal { mass_window: (margin, ctx.mu - margin), ..*proposal };
        for _ in 0..n {
            let (sp, weight) = sample_shell(rng, &window);
            let value = iota_transform(ctx, |u| state.on_line_space(u), &sp)?;
            t.push(norm_sq(&value) * weight);
        }
        Ok(t)
    })?;
    let (line_space, mass_shell) = (plan.estimate(&positive), shell_plan.estimate(&fibred));
    let passes = line_space.agrees_with(&mass_shell, 3.0);
    Ok(IsometryReport { line_space, mass_shell, passes })
}

/// Worst pointwise `|ι(W^{mom}(g)ψ) − W^{[0,μ]}(g)(ιψ)|` relative to the
/// size of the left side, over `n` random fibre points in the proposal's
/// mass window.
pub fn intertwiner_defect(
    ctx: &SpinContext,
    g: &PoincareElement,
    state: &GaussianSpinorState,
    proposal: &NormProposal,
    n: usize,
    seed: u64,
) -> Result<f64> {
    check_window(ctx, proposal)?;
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let psi = |u: &MomentumVelocityPoint| state.on_positive_region(ctx, u);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (sp, _) = sample_shell(&mut rng, proposal);
        let lhs = iota_transform(ctx, |u| apply_w_mom(ctx, g, psi, u), &sp)?;
        let rhs = apply_w_interval(ctx, g, |s| iota_transform(ctx, psi, s), &sp)?;
        let scale = lhs.norm().max(state.components.norm() * 1e-3);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::random::{random_poincare, random_su2};
    use crate::poincare::{wigner_d, SpinorMatrix};
    use rand::SeedableRng;

    fn ctx(twice: u32) -> SpinContext {
        SpinContext::new(1.0, Spin::from_twice(twice), 2).unwrap()
    }

    fn close(a: &SpinorValue, b: &SpinorValue, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm())
    }

    #[test]
    fn identity_and_time_translation() {
        let c = ctx(2);
        let state = GaussianSpinorState::standard(c.spin, Vector3::new(0.2, 0.0, -0.1));
        let pt = MomentumVelocityPoint::new(Vector3::new(0.3, 0.1, -0.4), Vector3::new(0.2, -0.5, 0.1)).unwrap();
        let psi = |u: &MomentumVelocityPoint| state.on_line_space(u);
        let same = apply_w_mom(&c, &PoincareElement::identity(), psi, &pt).unwrap();
        assert!(close(&same, &psi(&pt).unwrap(), 1e-14));
        let t = 0.7;
        let shifted = apply_w_mom(&c, &PoincareElement::translation(FourVector::new(t, 0.0, 0.0, 0.0)), psi, &pt).unwrap();
        let expected = psi(&pt).unwrap() * C64::from_polar(1.0, t * energy(&c, &pt));
        assert!(close(&shifted, &expected, 1e-14));
        let sp = MassShellPoint::new(0.5, pt.p, Vector3::z()).unwrap();
        let fib = apply_w_interval(&c, &PoincareElement::identity(), |s| state.on_mass_shell(s), &sp).unwrap();
        assert!(close(&fib, &state.on_mass_shell(&sp).unwrap(), 1e-14));
        let irr = apply_w_irreducible(0.5, c.spin, &PoincareElement::identity(), |p| state.on_momentum(p), &pt.p).unwrap();
        assert!(close(&irr, &state.on_momentum(&pt.p).unwrap(), 1e-14));
    }

    #[test]
    fn rotations_act_by_their_own_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let j = Spin::from_twice(3);
        let state = GaussianSpinorState::standard(j, Vector3::new(0.5, -0.3, 0.2));
        for _ in 0..200 {
            let b = random_su2(&mut rng);
            let p = random_in_ball(&mut rng, 2.0);
            let got = apply_w_irreducible(0.8, j, &PoincareElement::homogeneous(b), |k| state.on_momentum(k), &p).unwrap();
            let expected =
                wigner_d(j, &b).unwrap().into_entries() * state.on_momentum(&b.inverse().act_spatial(&p)).unwrap();
            assert!(close(&got, &expected, 1e-10));
        }
    }

    #[test]
    fn compositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = ctx(1);
        let state = GaussianSpinorState::standard(c.spin, Vector3::new(0.1, 0.2, 0.0));
        let psi = |u: &MomentumVelocityPoint| state.on_line_space(u);
        let phi = |s: &MassShellPoint| state.on_mass_shell(s);
        let chi = |p: &Vector3<f64>| state.on_momentum(p);
        for _ in 0..300 {
            let (g1, g2) = (random_poincare(&mut rng, 1.0, 1.0), random_poincare(&mut rng, 1.0, 1.0));
            let g12 = g1 * g2;
            let pt = MomentumVelocityPoint::new(random_in_ball(&mut rng, 1.5), random_in_ball(&mut rng, 0.8)).unwrap();
            let nested = apply_w_mom(&c, &g1, |u| apply_w_mom(&c, &g2, psi, u), &pt).unwrap();
            assert!(close(&nested, &apply_w_mom(&c, &g12, psi, &pt).unwrap(), 1e-8));
            let sp = MassShellPoint::new(rng.random_range(0.3..0.7), pt.p, random_unit_vector(&mut rng)).unwrap();
            let nested = apply_w_interval(&c, &g1, |s| apply_w_interval(&c, &g2, phi, s), &sp).unwrap();
            assert!(close(&nested, &apply_w_interval(&c, &g12, phi, &sp).unwrap(), 1e-8));
            let nested = apply_w_irreducible(0.6, c.spin, &g1, |p| apply_w_irreducible(0.6, c.spin, &g2, chi, p), &pt.p).unwrap();
            assert!(close(&nested, &apply_w_irreducible(0.6, c.spin, &g12, chi, &pt.p).unwrap(), 1e-8));
        }
    }

    #[test]
    fn fibres_are_not_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = ctx(2);
        let state = GaussianSpinorState::standard(c.spin, Vector3::zeros());
        for _ in 0..200 {
            let g = random_poincare(&mut rng, 1.0, 1.0);
            let m = rng.random_range(0.3..0.7);
            let sp = MassShellPoint::new(m, random_in_ball(&mut rng, 1.0), random_unit_vector(&mut rng)).unwrap();
            let fibre_only = |s: &MassShellPoint| {
                assert_eq!(s.m, m);
                state.on_mass_shell(s)
            };
            apply_w_interval(&c, &g, fibre_only, &sp).unwrap();
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let c = ctx(2);
        let pt = MomentumVelocityPoint::new(Vector3::zeros(), Vector3::zeros()).unwrap();
        let bad = |_: &MomentumVelocityPoint| Ok(DVector::zeros(2));
        assert!(apply_w_mom(&c, &PoincareElement::identity(), bad, &pt).is_err());
    }

    #[test]
    fn intertwiner_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = ctx(1);
        let state = GaussianSpinorState::standard(c.spin, Vector3::new(0.2, -0.1, 0.3));
        for k in 0..10 {
            let g = random_poincare(&mut rng, 1.0, 1.0);
            let defect = intertwiner_defect(&c, &g, &state, &NormProposal::default(), 20, k).unwrap();
            assert!(defect < 1e-6, "{defect}");
        }
    }

    #[test]
    fn norms_are_preserved() {
        let c = ctx(1);
        let state = GaussianSpinorState::standard(c.spin, Vector3::new(0.2, 0.0, 0.1));
        let g = PoincareElement::new(
            FourVector::new(0.3, 0.5, -0.2, 0.1),
            SpinorMatrix::boost(&Vector3::new(0.6, 0.0, 0.8), 0.8) * SpinorMatrix::rotation(&Vector3::z(), 0.4),
        );
        let prop = NormProposal::default();
        let r = unitarity_mom(&c, &g, &state, &prop, 40_000, 1).unwrap();
        assert!(r.passes, "{r:?}");
        let r = unitarity_interval(&c, &g, &state, &prop, 40_000, 2).unwrap();
        assert!(r.passes, "{r:?}");
        let r = unitarity_irreducible(0.5, c.spin, &g, &state, &prop, 40_000, 3).unwrap();
        assert!(r.passes, "{r:?}");
        let r = iota_isometry_check(&c, &state, &prop, 40_000, 4).unwrap();
        assert!(r.passes, "{r:?}");
    }
}
