use achronal::linespace::{
    additivity_check, causality_check, covariance_check, n_measure, n_measure_mc, AdditivityReport, CausalityReport,
    CovarianceReport, StateDensity, VELOCITY_BALL,
};
use achronal::minkowski::FourVector;
use achronal::poincare::random::{random_in_ball, random_poincare, random_su2, random_unit_vector};
use achronal::poincare::{LinePoint, PoincareElement, SpinorMatrix};
use achronal::surfaces::{AchronalSurface, Region, SpatialSet};
use achronal::tolerances::FD_STEP;
use nalgebra::{Matrix6, Vector3};
use rand::Rng;
use serde_json::json;

use super::surfaces::wavy_grid;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{z_score, Property, SuiteReport, Worst};

fn ball(c: [f64; 3], r: f64) -> SpatialSet {
    SpatialSet::ball(Vector3::from(c), r).expect("positive radius")
}

fn halfspace(n: Vector3<f64>, offset: f64) -> SpatialSet {
    SpatialSet::halfspace(n, offset).expect("nonzero normal")
}

fn tilted(w: [f64; 3], offset: f64) -> AchronalSurface {
    AchronalSurface::tilted(Vector3::from(w), offset).expect("slope below 1")
}

fn flat(t0: f64) -> AchronalSurface {
    AchronalSurface::flat(t0).expect("finite")
}

/// Halfspace pairs and, every third time, a ball cut out of both halves.
fn partitions(surface: &AchronalSurface, count: usize, rng: &mut impl Rng) -> Vec<Vec<Region>> {
    (0..count)
        .map(|k| {
            let h = halfspace(random_unit_vector(rng), rng.random_range(-1.0..1.0));
            let pieces = if k % 3 == 2 {
                let b = SpatialSet::ball(random_in_ball(rng, 1.0), rng.random_range(0.3..1.5)).expect("positive radius");
                let outside = b.clone().complement();
                vec![
                    b,
                    SpatialSet::Intersection(vec![h.clone(), outside.clone()]),
                    SpatialSet::Intersection(vec![h.complement(), outside]),
                ]
            } else {
                vec![h.clone(), h.complement()]
            };
            pieces.into_iter().map(|p| Region::new(surface.clone(), p)).collect()
        })
        .collect()
}

/// A partition passes when every sampled line falls in exactly one piece,
/// so the piece probabilities add up to one without sampling error.
pub fn additivity_property(report: &AdditivityReport, name: &str) -> Property {
    let exact = report.sum == 1.0 && report.uncovered == 0;
    Property::holds(name, report.n_samples, exact)
}

fn additivity(cfg: &RunConfig) -> CliResult<(Vec<Property>, serde_json::Value)> {
    let psi = StateDensity::standard();
    let surfaces = [flat(0.0), tilted([0.2, 0.3, -0.4], 0.5), AchronalSurface::SqrtShell, AchronalSurface::Clamp, wavy_grid()];
    let mut rng = cfg.rng(30);
    let n = cfg.n(4000);
    let mut failures = 0;
    let mut tested = 0;
    let mut sums = Vec::new();
    for (i, surface) in surfaces.iter().enumerate() {
        for (k, partition) in partitions(surface, 10, &mut rng).iter().enumerate() {
            let r = additivity_check(&psi, partition, n, cfg.seed_for(300 + 16 * i as u64 + k as u64))?;
            failures += usize::from(!additivity_property(&r, "").passes);
            tested += 1;
            sums.push(r.sum);
        }
    }
    let props = vec![Property::count("partition-probabilities-sum-to-one", tested * n, failures)];
    let kinds: Vec<&str> = surfaces.iter().map(|s| s.kind()).collect();
    Ok((props, json!({ "surfaces": kinds, "partitions": tested, "sums": sums })))
}

/// Zero pathwise violations; the two probabilities are logged.
pub fn causality_property(report: &CausalityReport, name: &str) -> Property {
    Property::count(name, report.n_samples, report.violations)
}

pub fn causality_scenarios() -> Vec<(&'static str, Region, AchronalSurface)> {
    vec![
        ("ball-to-later-plane", Region::new(flat(0.0), ball([0.0; 3], 1.0)), flat(2.0)),
        (
            "box-to-tilted-plane",
            Region::new(flat(0.0), SpatialSet::cuboid(Vector3::new(-1.0, -0.5, 0.0), Vector3::new(0.5, 1.0, 1.0)).expect("box")),
            tilted([0.0, 0.0, 0.5], 3.0),
        ),
        ("shell-ball-to-wavy-grid", Region::new(AchronalSurface::SqrtShell, ball([0.3, 0.0, 0.0], 0.8)), wavy_grid()),
        (
            "tilted-halfspace-to-earlier-plane",
            Region::new(tilted([0.3, 0.0, 0.0], 0.0), halfspace(Vector3::new(0.0, 1.0, 0.0), -0.5)),
            flat(-2.0),
        ),
        ("clamp-ball-to-tilted-plane", Region::new(AchronalSurface::Clamp, ball([0.0, 0.0, 0.5], 0.7)), tilted([0.0, 0.4, 0.3], 1.5)),
    ]
}

fn causality(cfg: &RunConfig) -> CliResult<(Vec<Property>, serde_json::Value)> {
    let psi = StateDensity::standard();
    let n = cfg.n(200_000);
    let mut props = Vec::new();
    let mut details = serde_json::Map::new();
    for (k, (name, region, sigma)) in causality_scenarios().into_iter().enumerate() {
        let r = causality_check(&psi, &region, &sigma, n, cfg.seed_for(400 + k as u64))?;
        props.push(causality_property(&r, &format!("causality-{name}")));
        props.push(Property::count(format!("causality-undecided-{name}"), r.n_samples, r.undecided).logged());
        details.insert(name.into(), serde_json::to_value(&r).expect("serializable"));
    }
    Ok((props, details.into()))
}

/// No pathwise mismatch, and the transported probability agrees with the
/// original one.
pub fn covariance_properties(report: &CovarianceReport, name: &str, sigmas: f64) -> Vec<Property> {
    vec![
        Property::count(format!("covariance-{name}"), report.n_samples, report.mismatches),
        Property::within(format!("covariance-probability-{name}"), report.n_samples, z_score(&report.original, &report.transported), sigmas),
    ]
}

pub fn covariance_scenarios(cfg: &RunConfig) -> Vec<(&'static str, Region, PoincareElement)> {
    let mut rng = cfg.rng(31);
    let shift = FourVector::new(0.4, -0.3, 0.2, 0.5);
    let rotation = SpinorMatrix::rotation(&random_unit_vector(&mut rng), 1.1);
    let boost = SpinorMatrix::boost(&random_unit_vector(&mut rng), 0.9);
    vec![
        ("translation", Region::new(flat(0.0), ball([0.2, 0.0, 0.0], 1.0)), PoincareElement::translation(shift)),
        ("rotation", Region::new(tilted([0.2, 0.0, 0.3], 0.1), halfspace(Vector3::new(1.0, 1.0, 0.0), 0.3)), PoincareElement::homogeneous(rotation)),
        ("boost", Region::new(flat(0.0), ball([0.0, 0.3, 0.0], 1.2)), PoincareElement::homogeneous(boost)),
        (
            "composite",
            Region::new(flat(0.5), SpatialSet::cuboid(Vector3::repeat(-0.8), Vector3::repeat(0.6)).expect("box")),
            PoincareElement::new(shift, boost * random_su2(&mut rng)),
        ),
    ]
}

fn covariance(cfg: &RunConfig) -> CliResult<(Vec<Property>, serde_json::Value)> {
    let psi = StateDensity::standard();
    let n = cfg.n(25_000);
    let mut props = Vec::new();
    let mut details = serde_json::Map::new();
    for (k, (name, region, g)) in covariance_scenarios(cfg).into_iter().enumerate() {
        let r = covariance_check(&psi, &region, &g, n, cfg.seed_for(500 + k as u64))?;
        props.extend(covariance_properties(&r, name, cfg.thresholds.sigmas));
        details.insert(
            name.into(),
            json!({ "mismatches": r.mismatches, "original": r.original, "transported": r.transported, "witnesses": r.witnesses }),
        );
    }
    Ok((props, details.into()))
}

fn line_coordinates(u: &LinePoint) -> [f64; 6] {
    u.to_array()
}

/// `|det ∂(g·u)/∂u|` by central differences in the six line coordinates.
fn fd_jacobian(g: &PoincareElement, u: &LinePoint) -> Option<f64> {
    let base = line_coordinates(u);
    let mut jac = Matrix6::zeros();
    for c in 0..6 {
        let shifted = |sign: f64| {
            let mut q = base;
            q[c] += sign * FD_STEP;
            let moved = LinePoint::new(Vector3::new(q[0], q[1], q[2]), Vector3::new(q[3], q[4], q[5])).ok()?;
            Some(line_coordinates(&g.act_on_line(&moved)))
        };
        let (plus, minus) = (shifted(1.0)?, shifted(-1.0)?);
        for r in 0..6 {
            jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * FD_STEP);
        }
    }
    Some(jac.determinant().abs())
}

fn rn_derivative(cfg: &RunConfig) -> Property {
    let n = cfg.n(1000);
    let mut rng = cfg.rng(32);
    let mut worst = Worst::default();
    for _ in 0..n {
        let g = random_poincare(&mut rng, 2.0, 1.0);
        let u = LinePoint::new(random_in_ball(&mut rng, 2.0), random_in_ball(&mut rng, 0.9)).expect("subluminal");
        let exact = g.line_action_rn_derivative(&u);
        worst.push(fd_jacobian(&g.inverse(), &u).map_or(f64::NAN, |fd| (fd - exact).abs() / exact));
    }
    Property::within("rn-derivative-matches-jacobian", n, worst.get(), cfg.thresholds.rn_derivative)
}

fn measure(cfg: &RunConfig) -> CliResult<(Vec<Property>, serde_json::Value)> {
    let cases = [
        ("flat-ball", flat(0.3), ball([0.0; 3], 1.0)),
        ("tilted-box", tilted([0.0, 0.3, 0.5], -0.2), SpatialSet::cuboid(Vector3::zeros(), Vector3::new(1.0, 2.0, 0.5))?),
        ("shell-ball", AchronalSurface::SqrtShell, ball([0.5, 0.0, 0.0], 0.8)),
        ("shell-box", AchronalSurface::SqrtShell, SpatialSet::cuboid(Vector3::new(-1.0, 0.0, -0.5), Vector3::new(0.5, 1.0, 1.0))?),
    ];
    let n = cfg.n(200_000);
    let (mut quad_worst, mut z_worst) = (Worst::default(), Worst::default());
    let mut details = serde_json::Map::new();
    for (k, (name, surface, base)) in cases.iter().enumerate() {
        let exact = VELOCITY_BALL * base.volume().expect("bounded base");
        let quad = n_measure(surface, base)?;
        let mc = n_measure_mc(surface, base, n, cfg.seed_for(600 + k as u64))?;
        quad_worst.push(((quad - exact) / exact).abs());
        let z = (mc.value - exact).abs() / mc.std_error;
        z_worst.push(if mc.value == exact { 0.0 } else { z });
        details.insert((*name).into(), json!({ "closed_form": exact, "quadrature": quad, "monte_carlo": mc }));
    }
    let props = vec![
        Property::within("line-measure-quadrature", cases.len(), quad_worst.get(), cfg.thresholds.measure),
        Property::within("line-measure-monte-carlo", cases.len() * n, z_worst.get(), cfg.thresholds.sigmas),
    ];
    Ok((props, details.into()))
}

pub fn run_additivity(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (props, details) = additivity(cfg)?;
    Ok(SuiteReport::new("additivity", props, details))
}

pub fn run_causality(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (props, details) = causality(cfg)?;
    Ok(SuiteReport::new("causality", props, details))
}

pub fn run_covariance(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (mut props, details) = covariance(cfg)?;
    props.push(rn_derivative(cfg));
    Ok(SuiteReport::new("covariance", props, details))
}

pub fn run_measure(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (props, details) = measure(cfg)?;
    Ok(SuiteReport::new("measure", props, details))
}

/// Normalization, additivity, causality, covariance and the line measure.
pub fn run(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let parts = [run_additivity(cfg)?, run_causality(cfg)?, run_covariance(cfg)?, run_measure(cfg)?];
    let details: serde_json::Map<String, serde_json::Value> = parts.iter().map(|p| (p.suite.clone(), p.details.clone())).collect();
    let props = parts.into_iter().flat_map(|p| p.properties).collect();
    Ok(SuiteReport::new("localization", props, details.into()))
}
