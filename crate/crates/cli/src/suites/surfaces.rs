use achronal::linespace::{line_surface_intersection, lightlike_intersection, LightlikeLine};
use achronal::minkowski::{separation, FourVector, Separation};
use achronal::poincare::random::{random_in_ball, random_unit_vector};
use achronal::poincare::LinePoint;
use achronal::surfaces::{
    causal_base_check, cauchy_surface_check, is_spacelike_sampled, lightlike_segment_check, lipschitz_estimate,
    region_of_influence, AchronalSurface, CausalBaseVerdict, CausalWitness, CauchyVerdict, GridSurface, Region,
    SpatialSet, DEFAULT_RADII,
};
use achronal::tolerances::{LIPSCHITZ_SLACK, V_MAX};
use nalgebra::Vector3;
use rand::Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Property, SuiteReport, Worst};

/// A smooth tabulated surface with slope well below 1.
pub fn wavy_grid() -> AchronalSurface {
    let g = GridSurface::from_fn(Vector3::repeat(-6.0), Vector3::repeat(0.5), [25, 25, 25], |x| {
        0.45 * x.x.sin() + 0.35 * x.y.cos() + 0.2 * (0.5 * x.z).sin()
    })
    .expect("slope below 1");
    AchronalSurface::Grid(g)
}

/// Every built-in family, with the grid.
pub fn builtin_surfaces() -> Vec<AchronalSurface> {
    vec![
        AchronalSurface::flat(0.7).expect("finite"),
        AchronalSurface::tilted(Vector3::new(0.3, -0.4, 0.5), 0.2).expect("slope below 1"),
        AchronalSurface::null_plane(),
        AchronalSurface::LightCone,
        AchronalSurface::SqrtShell,
        AchronalSurface::Clamp,
        wavy_grid(),
    ]
}

pub fn random_line(rng: &mut impl Rng, reach: f64) -> LinePoint {
    LinePoint::new(random_in_ball(rng, reach), random_in_ball(rng, V_MAX)).expect("subluminal")
}

fn intersection_properties(cfg: &RunConfig) -> CliResult<Vec<Property>> {
    let n = cfg.n(100_000);
    let surfaces = builtin_surfaces();
    let mut rng = cfg.rng(10);
    let mut residual = Worst::default();
    let mut failures = 0;
    for i in 0..n {
        let surface = &surfaces[i % surfaces.len()];
        let u = random_line(&mut rng, 10.0);
        match line_surface_intersection(&u, surface) {
            Ok(hit) => residual.push(hit.residual / hit.s.abs().max(1.0)),
            Err(_) => failures += 1,
        }
    }
    let m = cfg.n(10_000);
    let (mut flat, mut tilted) = (Worst::default(), Worst::default());
    for _ in 0..m {
        let t0 = rng.random_range(-5.0..5.0);
        let u = random_line(&mut rng, 10.0);
        let hit = line_surface_intersection(&u, &AchronalSurface::flat(t0)?)?;
        flat.push((hit.s - t0).abs() / t0.abs().max(1.0));
        // |w| ≤ 1 including the null plane w = e₃
        let w = if rng.random_bool(0.2) { Vector3::z() } else { random_in_ball(&mut rng, 1.0) };
        let offset = rng.random_range(-2.0..2.0);
        let exact = (w.dot(u.x()) + offset) / (1.0 - w.dot(u.v()));
        let hit = line_surface_intersection(&u, &AchronalSurface::tilted(w, offset)?)?;
        tilted.push((hit.s - exact).abs() / exact.abs().max(1.0));
    }
    let tol = cfg.thresholds.closed_form;
    Ok(vec![
        Property::count("intersection-exists", n, failures),
        Property::within("intersection-residual", n, residual.get(), cfg.thresholds.residual),
        Property::within("intersection-closed-form-flat", m, flat.get(), tol),
        Property::within("intersection-closed-form-tilted", m, tilted.get(), tol),
    ])
}

fn meets_every_sampled_line(surface: &AchronalSurface, n: usize, rng: &mut impl Rng) -> usize {
    (0..n).filter(|_| line_surface_intersection(&random_line(rng, 10.0), surface).is_err()).count()
}

/// The hyperplane `x₀ = x₃`: achronal, not spacelike, maximal, and met by a
/// lightlike line `a + ℝz` exactly when `a` lies on it or `z` does not.
fn null_plane_example(cfg: &RunConfig) -> Vec<Property> {
    let chi = AchronalSurface::null_plane();
    let n = cfg.n(10_000);
    let mut rng = cfg.rng(11);
    let lipschitz = lipschitz_estimate(&chi, n, cfg.seed_for(11));
    let spacelike = is_spacelike_sampled(&chi, n, cfg.seed_for(12));
    let missed = meets_every_sampled_line(&chi, n, &mut rng);
    let mut criterion = 0;
    for _ in 0..n {
        let mut base = FourVector::from_parts(rng.random_range(-3.0..3.0), &random_in_ball(&mut rng, 3.0));
        let on = rng.random_bool(0.5);
        if on {
            base.x0 = base.x3;
        }
        let along = rng.random_bool(0.5);
        let direction = if along { Vector3::z() } else { random_unit_vector(&mut rng) };
        let meets = lightlike_intersection(&LightlikeLine { base, direction }, &chi).is_some();
        criterion += usize::from(meets != (on || !along));
    }
    vec![
        Property::within("null-plane-achronal", n, lipschitz, 1.0 + LIPSCHITZ_SLACK),
        Property::holds("null-plane-not-spacelike", n, !spacelike),
        Property::count("null-plane-maximal", n, missed),
        Property::count("null-plane-lightlike-criterion", n, criterion),
    ]
}

fn cone_and_shell_examples(cfg: &RunConfig) -> Vec<Property> {
    let n = cfg.n(10_000);
    let mut rng = cfg.rng(13);
    let cone = AchronalSurface::LightCone;
    let lipschitz = lipschitz_estimate(&cone, n, cfg.seed_for(13));
    let missed = meets_every_sampled_line(&cone, n, &mut rng);
    let shell = causal_base_check(&AchronalSurface::SqrtShell, 64, &DEFAULT_RADII, cfg.seed_for(14));
    let witnessed = matches!(shell.witness, Some(CausalWitness::MissedLine { .. }));
    vec![
        Property::within("light-cone-achronal", n, lipschitz, 1.0 + LIPSCHITZ_SLACK),
        Property::count("light-cone-maximal", n, missed),
        Property::holds("sqrt-shell-spacelike", n, is_spacelike_sampled(&AchronalSurface::SqrtShell, n, cfg.seed_for(15))),
        Property::holds("sqrt-shell-not-causal-base", 1, shell.verdict == CausalBaseVerdict::NotCausalBase && witnessed),
    ]
}

/// The clamp `τ = min(max(x₃, 0), 1)` meets every causal line, and the two
/// flat pieces `x₃ < 0` at time 0 and `x₃ > 1` at time 1 are spacelike
/// separated.
fn clamp_example(cfg: &RunConfig) -> Vec<Property> {
    let n = cfg.n(10_000);
    let mut rng = cfg.rng(16);
    let clamp = AchronalSurface::Clamp;
    let cauchy = cauchy_surface_check(&clamp, n, cfg.seed_for(16));
    let missed = meets_every_sampled_line(&clamp, n, &mut rng);
    let mut causal = 0;
    for _ in 0..n {
        let mut x = random_in_ball(&mut rng, 5.0);
        x.z = -rng.random_range(1e-6..5.0);
        let mut y = random_in_ball(&mut rng, 5.0);
        y.z = 1.0 + rng.random_range(1e-6..5.0);
        let s = separation(&FourVector::from_parts(0.0, &x), &FourVector::from_parts(1.0, &y));
        causal += usize::from(s != Separation::Spacelike);
    }
    vec![
        Property::holds("clamp-meets-lightlike-lines", cauchy.tested, cauchy.verdict == CauchyVerdict::Cauchy),
        Property::count("clamp-meets-timelike-lines", n, missed),
        Property::count("clamp-pieces-spacelike", n, causal),
    ]
}

/// Lightlike pairs on the null plane and the cone span segments inside
/// the surface.
fn segment_example(cfg: &RunConfig) -> CliResult<Vec<Property>> {
    let n = cfg.n(1000);
    let mut rng = cfg.rng(17);
    let chi = AchronalSurface::null_plane();
    let mut off = 0;
    for _ in 0..n {
        let x3 = rng.random_range(-3.0..3.0);
        let x = FourVector::new(x3, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), x3);
        let lambda = rng.random_range(0.1..3.0);
        let y = x + lambda * FourVector::new(1.0, 0.0, 0.0, 1.0);
        off += usize::from(!lightlike_segment_check(&chi, &x, &y, 64)?);
        let omega = random_unit_vector(&mut rng);
        let tip = FourVector::from_parts(lambda, &(omega * lambda));
        off += usize::from(!lightlike_segment_check(&AchronalSurface::LightCone, &FourVector::ZERO, &tip, 64)?);
    }
    let example = lightlike_segment_check(&chi, &FourVector::ZERO, &FourVector::new(1.0, 0.0, 0.0, 1.0), 100)?;
    Ok(vec![Property::holds("lightlike-segment-example", 1, example), Property::count("lightlike-segments", 2 * n, off)])
}

/// A ball of radius `r` at time 0 influences the disc of radius `r + t` of
/// the plane at time `t`.
fn influence_example(cfg: &RunConfig) -> CliResult<Vec<Property>> {
    let n = cfg.n(2000);
    let mut rng = cfg.rng(18);
    let (r, t) = (1.0, 1.5);
    let delta = Region::new(AchronalSurface::flat(0.0)?, SpatialSet::ball(Vector3::zeros(), r)?);
    let sigma = AchronalSurface::flat(t)?;
    let mut wrong = 0;
    let mut tested = 0;
    for _ in 0..n {
        let y = random_in_ball(&mut rng, 5.0);
        if (y.norm() - (r + t)).abs() < 1e-6 {
            continue;
        }
        tested += 1;
        wrong += usize::from(region_of_influence(&delta, &sigma, &y)? != (y.norm() < r + t));
    }
    Ok(vec![Property::count("influence-of-ball-on-plane", tested, wrong)])
}

pub fn run(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let mut properties = intersection_properties(cfg)?;
    properties.extend(null_plane_example(cfg));
    properties.extend(cone_and_shell_examples(cfg));
    properties.extend(clamp_example(cfg));
    properties.extend(segment_example(cfg)?);
    properties.extend(influence_example(cfg)?);
    let kinds: Vec<&str> = builtin_surfaces().iter().map(|s| s.kind()).collect();
    Ok(SuiteReport::new("surfaces", properties, json!({ "surfaces": kinds })))
}
