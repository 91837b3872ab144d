use achronal::linespace::{k_inverse, k_map};
use achronal::minkowski::FourVector;
use achronal::poincare::random::{random_in_ball, random_poincare, random_sl2c, random_unit_vector};
use achronal::poincare::{PoincareElement, Spin, SpinorMatrix};
use achronal::spectrum::{
    act_on_point, density_identity, energy, in_positive_region, in_positive_region_alt, intertwiner_defect,
    iota_isometry_check, k_m_inverse, k_m_map, mass_squared, multiplicity, peter_weyl_dimension_check,
    spin_factor_identity_defect, tallied_multiplicity, unitarity_interval, unitarity_irreducible, unitarity_mom,
    GaussianSpinorState, MassShellPoint, MomentumVelocityPoint, NormProposal, NormReport, SpinContext,
};
use achronal::tolerances::{J_MAX_DEFAULT, V_MAX};
use nalgebra::Vector3;
use rand::Rng;
use serde_json::json;

use super::surfaces::{builtin_surfaces, random_line};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Property, SuiteReport, Worst};

/// Spins used when the suite runs without a `--spin`.
const DEFAULT_SPINS: [Spin; 3] = [Spin::HALF, Spin::ONE, Spin::from_twice(3)];

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

/// Energy covariance `E(A·(p, v)) = (A·𝔭)₀` and invariance of `γ`.
fn energy_properties(cfg: &RunConfig, ctx: &SpinContext) -> Vec<Property> {
    let n = cfg.n(100_000);
    let mut rng = cfg.rng(40);
    let (mut covariance, mut invariance) = (Worst::default(), Worst::default());
    let mut region_mismatch = 0;
    for _ in 0..n {
        let a = random_sl2c(&mut rng, 1.5);
        let pt = MomentumVelocityPoint { p: random_in_ball(&mut rng, 3.0), v: random_in_ball(&mut rng, V_MAX) };
        let moved = act_on_point(ctx, &a, &pt);
        let e = a.act(&FourVector::from_parts(energy(ctx, &pt), &pt.p)).x0;
        covariance.push(relative(e, energy(ctx, &moved)));
        invariance.push(relative(mass_squared(ctx, &pt), mass_squared(ctx, &moved)));
        region_mismatch += usize::from(in_positive_region(ctx, &pt) != in_positive_region_alt(ctx, &pt));
    }
    let tol = cfg.thresholds.spectrum;
    vec![
        Property::within("energy-covariance", n, covariance.get(), tol),
        Property::within("mass-invariance", n, invariance.get(), tol),
        Property::count("positive-region-descriptions-agree", n, region_mismatch),
    ]
}

fn random_shell(rng: &mut impl Rng, ctx: &SpinContext, lo: f64, hi: f64, reach: f64) -> MassShellPoint {
    let m = rng.random_range(lo..hi) * ctx.mu;
    MassShellPoint { m, p: random_in_ball(rng, reach), omega: random_unit_vector(rng) }
}

/// `k_m` and the surface chart `k` composed with their inverses.
fn round_trips(cfg: &RunConfig, ctx: &SpinContext) -> CliResult<Vec<Property>> {
    let n = cfg.n(10_000);
    let mut rng = cfg.rng(41);
    let (mut fibre, mut chart) = (Worst::default(), Worst::default());
    for _ in 0..n {
        let sp = random_shell(&mut rng, ctx, 0.1, 0.9, 1.0);
        let back = k_m_inverse(ctx, &k_m_map(ctx, &sp)?)?;
        fibre.push((back.omega - sp.omega).norm().max(relative(back.m, sp.m)).max((back.p - sp.p).norm()));
    }
    let surfaces = builtin_surfaces();
    for i in 0..n {
        let surface = &surfaces[i % surfaces.len()];
        let u = random_line(&mut rng, 5.0);
        let (y, v) = k_map(surface, u.x(), u.v())?;
        let (x, w) = k_inverse(surface, &y, &v)?;
        chart.push(((x - u.x()).norm() / (1.0 + u.x().norm())).max((w - u.v()).norm()));
    }
    let tol = cfg.thresholds.spectrum;
    Ok(vec![
        Property::within("fibre-map-round-trip", n, fibre.get(), tol),
        Property::within("surface-chart-round-trip", n, chart.get(), tol),
    ])
}

/// The spin-factor and density identities behind the fibred intertwiner.
fn appendix_identities(cfg: &RunConfig, ctx: &SpinContext) -> CliResult<Vec<Property>> {
    let n = cfg.n(10_000);
    let mut rng = cfg.rng(42);
    let (mut spin_factor, mut density) = (Worst::default(), Worst::default());
    for _ in 0..n {
        let sp = random_shell(&mut rng, ctx, 0.3, 0.7, 2.0);
        let a = random_sl2c(&mut rng, 1.0);
        spin_factor.push(spin_factor_identity_defect(ctx, &sp, &a)?);
        let (lhs, rhs) = density_identity(ctx, &sp, &a)?;
        density.push((lhs - rhs).abs() / lhs);
    }
    let tol = cfg.thresholds.appendix;
    Ok(vec![
        Property::within(format!("spin-factor-identity-j{}", ctx.spin), n, spin_factor.get(), tol),
        Property::within(format!("density-identity-j{}", ctx.spin), n, density.get(), tol),
    ])
}

fn test_elements() -> Vec<(&'static str, PoincareElement)> {
    let boost = SpinorMatrix::boost(&Vector3::new(0.6, 0.0, 0.8), 0.8);
    vec![
        ("translation", PoincareElement::translation(FourVector::new(0.7, 0.4, -0.3, 0.2))),
        ("rotation", PoincareElement::homogeneous(SpinorMatrix::rotation(&Vector3::new(1.0, 1.0, 0.0).normalize(), 1.2))),
        ("boost", PoincareElement::homogeneous(boost)),
        (
            "composite",
            PoincareElement::new(FourVector::new(0.3, 0.5, -0.2, 0.1), boost * SpinorMatrix::rotation(&Vector3::z(), 0.4)),
        ),
    ]
}

fn norm_property(name: String, n: usize, r: &NormReport, sigmas: f64) -> Property {
    Property::within(name, n, r.z_score(), sigmas)
}

/// Unitarity of the three representations, the isometry of the fibre
/// transform and the pointwise intertwining relation.
fn representations(cfg: &RunConfig, ctx: &SpinContext, stream: u64) -> CliResult<(Vec<Property>, serde_json::Value)> {
    let n = cfg.n(40_000);
    let sigmas = cfg.thresholds.sigmas;
    let state = GaussianSpinorState::standard(ctx.spin, Vector3::new(0.2, -0.1, 0.1));
    let proposal = NormProposal::default();
    let irreducible_mass = 0.5 * ctx.mu;
    let j = ctx.spin;
    let mut props = Vec::new();
    let mut details = serde_json::Map::new();
    for (k, (name, g)) in test_elements().into_iter().enumerate() {
        let seed = cfg.seed_for(stream + 8 * k as u64);
        let mom = unitarity_mom(ctx, &g, &state, &proposal, n, seed)?;
        let interval = unitarity_interval(ctx, &g, &state, &proposal, n, seed + 1)?;
        let irreducible = unitarity_irreducible(irreducible_mass, j, &g, &state, &proposal, n, seed + 2)?;
        props.push(norm_property(format!("unitarity-line-space-{name}-j{j}"), n, &mom, sigmas));
        props.push(norm_property(format!("unitarity-mass-interval-{name}-j{j}"), n, &interval, sigmas));
        props.push(norm_property(format!("unitarity-irreducible-{name}-j{j}"), n, &irreducible, sigmas));
        details.insert(name.into(), json!({ "line_space": mom, "mass_interval": interval, "irreducible": irreducible }));
    }
    let iso = iota_isometry_check(ctx, &state, &proposal, n, cfg.seed_for(stream + 40))?;
    let spread = (iso.line_space.std_error.powi(2) + iso.mass_shell.std_error.powi(2)).sqrt();
    props.push(Property::within(format!("fibre-transform-isometry-j{j}"), n, (iso.line_space.value - iso.mass_shell.value).abs() / spread, sigmas));
    let mut rng = cfg.rng(stream + 41);
    let mut intertwining = Worst::default();
    let draws = cfg.n(400) / 20;
    for k in 0..draws {
        let g = random_poincare(&mut rng, 1.0, 1.0);
        intertwining.push(intertwiner_defect(ctx, &g, &state, &proposal, 20, cfg.seed_for(stream + 64 + k as u64))?);
    }
    props.push(Property::within(format!("fibre-transform-intertwines-j{j}"), draws * 20, intertwining.get(), cfg.thresholds.appendix));
    details.insert("isometry".into(), serde_json::to_value(&iso).expect("serializable"));
    Ok((props, details.into()))
}

/// The closed form of `ν_j` against the Clebsch–Gordan tally, and the
/// dimension count of the truncated Peter–Weyl decomposition.
fn multiplicities() -> Vec<Property> {
    let top = Spin::from_twice(2 * J_MAX_DEFAULT);
    let mut mismatches = 0;
    let mut asymmetric = 0;
    let mut pairs = 0;
    for spin in top.up_to() {
        for j in top.up_to() {
            pairs += 1;
            mismatches += usize::from(multiplicity(spin, j) != tallied_multiplicity(spin, j));
            asymmetric += usize::from(multiplicity(spin, j) != multiplicity(j, spin));
        }
    }
    let peter_weyl = top.up_to().filter(|&s| !peter_weyl_dimension_check(s, 8).passes).count();
    vec![
        Property::count("multiplicity-closed-form-matches-tally", pairs, mismatches),
        Property::count("multiplicity-symmetric", pairs, asymmetric),
        Property::count("peter-weyl-dimensions", top.up_to().count(), peter_weyl),
    ]
}

/// Identities and unitarity for one inducing representation.
pub fn run_decomposition(cfg: &RunConfig, ctx: &SpinContext) -> CliResult<SuiteReport> {
    let mut props = energy_properties(cfg, ctx);
    props.extend(round_trips(cfg, ctx)?);
    props.extend(appendix_identities(cfg, ctx)?);
    let (reps, details) = representations(cfg, ctx, 700)?;
    props.extend(reps);
    props.extend(multiplicities());
    Ok(SuiteReport::new("spectrum", props, json!({ "context": ctx, "representations": details })))
}

pub fn run(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let base = SpinContext::new(1.0, Spin::ZERO, 4)?;
    let mut props = energy_properties(cfg, &base);
    props.extend(round_trips(cfg, &base)?);
    let mut details = serde_json::Map::new();
    for (k, &spin) in DEFAULT_SPINS.iter().enumerate() {
        let ctx = SpinContext::new(1.0, spin, 4)?;
        props.extend(appendix_identities(cfg, &ctx)?);
        let (reps, d) = representations(cfg, &ctx, 700 + 100 * k as u64)?;
        props.extend(reps);
        details.insert(format!("j{spin}"), d);
    }
    props.extend(multiplicities());
    Ok(SuiteReport::new("spectrum", props, details.into()))
}
