//! End-to-end checks that cross module boundaries: group action, surfaces,
//! line-space localization and the spectrum charts.

use achronal::linespace::{
    additivity_check, causality_check, covariance_check, line_meets_region, line_surface_intersection,
    localization_probability, StateDensity, VelocityLaw,
};
use achronal::minkowski::FourVector;
use achronal::poincare::random::{random_in_ball, random_poincare, random_sl2c, random_timelike, random_unit_vector};
use achronal::poincare::{canonical_boost, wigner_rotation, LinePoint, Spin};
use achronal::spectrum::{k_m_inverse, k_m_map, multiplicity, MassShellPoint, SpinContext};
use achronal::surfaces::{AchronalSurface, Region, SpatialSet};
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state() -> StateDensity {
    StateDensity::new(Vector3::new(0.1, -0.2, 0.0), 1.2, VelocityLaw::Gaussian { sigma: 0.4 }).unwrap()
}

fn ball(c: [f64; 3], r: f64) -> SpatialSet {
    SpatialSet::ball(Vector3::from(c), r).unwrap()
}

fn halfspace(n: [f64; 3], offset: f64) -> SpatialSet {
    SpatialSet::halfspace(Vector3::from(n), offset).unwrap()
}

#[test]
fn whole_surface_holds_all_probability() {
    for surface in [AchronalSurface::SqrtShell, AchronalSurface::Clamp, AchronalSurface::LightCone] {
        let p = localization_probability(&state(), &Region::whole(surface), 500, 3).unwrap();
        assert_eq!((p.value, p.std_error), (1.0, 0.0));
    }
}

#[test]
fn three_piece_partition_of_a_curved_surface() {
    let surface = AchronalSurface::SqrtShell;
    let inner = ball([0.0; 3], 1.0);
    let outer = SpatialSet::Complement(Box::new(inner.clone()));
    let partition = [
        Region::new(surface.clone(), inner),
        Region::new(surface.clone(), SpatialSet::Intersection(vec![outer.clone(), halfspace([1.0, 0.0, 0.0], 0.0)])),
        Region::new(surface, SpatialSet::Intersection(vec![outer, halfspace([-1.0, 0.0, 0.0], 0.0)])),
    ];
    let report = additivity_check(&state(), &partition, 4000, 5).unwrap();
    assert_eq!((report.sum, report.uncovered), (1.0, 0));
}

#[test]
fn no_causality_violation_from_a_cone_cap() {
    let region = Region::new(AchronalSurface::LightCone, ball([0.0, 0.5, 0.0], 0.7));
    let target = AchronalSurface::tilted(Vector3::new(0.2, 0.0, -0.3), 2.5).unwrap();
    let report = causality_check(&state(), &region, &target, 4000, 7).unwrap();
    assert_eq!(report.violations, 0);
    assert_eq!(report.undecided, 0);
    // the target region contains every line through the source region
    assert!(report.in_influence.value >= report.in_region.value);
}

#[test]
fn covariance_under_a_random_boost() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let region = Region::new(AchronalSurface::flat(0.3).unwrap(), ball([0.0, 0.0, 0.2], 0.9));
    let g = random_poincare(&mut rng, 1.0, 1.0);
    let report = covariance_check(&state(), &region, &g, 3000, 13).unwrap();
    assert_eq!(report.mismatches, 0);
}

#[test]
fn crossing_point_lies_in_the_region_iff_the_line_meets_it() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let region = Region::new(AchronalSurface::Clamp, ball([0.2, 0.0, 0.5], 0.8));
    for _ in 0..2000 {
        let u = LinePoint::new(random_in_ball(&mut rng, 2.0), random_in_ball(&mut rng, 0.95)).unwrap();
        let hit = line_surface_intersection(&u, &region.surface).unwrap();
        let point = u.x() + u.v() * hit.s;
        assert_eq!(line_meets_region(&u, &region).unwrap(), region.base.contains(&point));
    }
}

#[test]
fn multiplicity_is_symmetric_and_parity_gated() {
    for a in 0..=12 {
        for b in 0..=12 {
            let (j1, j2) = (Spin::from_twice(a), Spin::from_twice(b));
            assert_eq!(multiplicity(j1, j2), multiplicity(j2, j1));
            assert_eq!(multiplicity(j1, j2) == 0, (a + b) % 2 == 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner_rotation_completes_the_boost(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_timelike(&mut rng, 3.0);
        let a = random_sl2c(&mut rng, 1.5);
        let r = wigner_rotation(&k, &a).unwrap();
        // Q(k) R = A Q(A⁻¹·k)
        let lhs = canonical_boost(&k).unwrap() * r;
        let rhs = a * canonical_boost(&a.inverse().act(&k)).unwrap();
        let gap = (lhs.matrix() - rhs.matrix()).norm() / rhs.matrix().norm();
        prop_assert!(gap < 1e-10, "gap {gap}");
        prop_assert!(r.unitarity_defect() < 1e-12);
    }

    #[test]
    fn group_action_on_lines_is_a_homomorphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (random_poincare(&mut rng, 2.0, 1.0), random_poincare(&mut rng, 2.0, 1.0));
        let u = LinePoint::new(random_in_ball(&mut rng, 2.0), random_in_ball(&mut rng, 0.8)).unwrap();
        let direct = (g * h).act_on_line(&u);
        let stepwise = g.act_on_line(&h.act_on_line(&u));
        prop_assert!((direct.x() - stepwise.x()).norm() < 1e-9 * (1.0 + direct.x().norm()));
        prop_assert!((direct.v() - stepwise.v()).norm() < 1e-9);
    }

    #[test]
    fn fibre_chart_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(1.3, Spin::from_twice(1), 4).unwrap();
        let m = rng.random_range(0.05..0.95) * ctx.mu;
        let sp = MassShellPoint::new(m, random_in_ball(&mut rng, 2.0), random_unit_vector(&mut rng)).unwrap();
        let back = k_m_inverse(&ctx, &k_m_map(&ctx, &sp).unwrap()).unwrap();
        prop_assert!((back.m - sp.m).abs() < 1e-9);
        prop_assert!((back.p - sp.p).norm() < 1e-9);
        prop_assert!((back.omega - sp.omega).norm() < 1e-8);
    }

    #[test]
    fn crossings_lie_on_the_surface(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let surface = AchronalSurface::tilted(Vector3::new(0.3, 0.1, -0.2), 0.4).unwrap();
        let u = LinePoint::new(random_in_ball(&mut rng, 2.0), random_in_ball(&mut rng, 0.9)).unwrap();
        let hit = line_surface_intersection(&u, &surface).unwrap();
        let event = FourVector::from_parts(hit.s, &(u.x() + u.v() * hit.s));
        prop_assert!((surface.tau(&event.spatial()) - event.x0).abs() < 1e-10 * (1.0 + hit.s.abs()));
    }
}
