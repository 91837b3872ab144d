use achronal::minkowski::FourVector;
use achronal::poincare::random::{random_four_vector, random_poincare, random_sl2c, random_su2, random_timelike};
use achronal::poincare::{canonical_boost, covering_map, wigner_d, wigner_rotation, Spin, SpinorMatrix, TimelikeLine};
use nalgebra::{Matrix4, Vector3, Vector4};
use rand::Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{Property, SuiteReport, Worst};

const MAX_RAPIDITY: f64 = 1.5;

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

fn spinor_gap(a: &SpinorMatrix, b: &SpinorMatrix) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Covering map, Minkowski form, sign invariance and the group law, each
/// error relative to the size of the matrices involved.
fn lorentz_properties(cfg: &RunConfig) -> CliResult<Vec<Property>> {
    let n = cfg.n(1000);
    let tol = cfg.thresholds.group;
    let mut rng = cfg.rng(1);
    let [mut hom, mut form, mut sign, mut action] = [Worst::default(); 4];
    for _ in 0..n {
        let a = random_sl2c(&mut rng, MAX_RAPIDITY);
        let b = random_sl2c(&mut rng, MAX_RAPIDITY);
        let la = covering_map(a.matrix())?;
        let lb = covering_map(b.matrix())?;
        let lab = covering_map((a * b).matrix())?;
        hom.push((lab - la * lb).abs().max() / (la.norm() * lb.norm()));
        form.push((la.transpose() * eta() * la - eta()).abs().max() / la.norm_squared());
        sign.push((covering_map(a.neg().matrix())? - la).abs().max() / la.norm());
        let x = random_four_vector(&mut rng, 3.0);
        let direct = a.act(&x);
        let via = la * Vector4::new(x.x0, x.x1, x.x2, x.x3);
        let gap = (Vector4::from(direct.to_array()) - via).abs().max() / (la.norm() * x.euclidean_norm_squared().sqrt());
        action.push(gap);
    }
    Ok(vec![
        Property::within("covering-map-homomorphism", n, hom.get(), tol),
        Property::within("minkowski-form-preserved", n, form.get(), tol),
        Property::within("covering-map-sign-invariance", n, sign.get(), tol),
        Property::within("spinor-action-matches-covering-map", n, action.get(), tol),
    ])
}

fn poincare_law(cfg: &RunConfig) -> Vec<Property> {
    let n = cfg.n(1000);
    let mut rng = cfg.rng(2);
    let [mut points, mut lines, mut inverse] = [Worst::default(); 3];
    for _ in 0..n {
        let g = random_poincare(&mut rng, 2.0, 1.0);
        let h = random_poincare(&mut rng, 2.0, 1.0);
        let x = random_four_vector(&mut rng, 3.0);
        let scale = 1.0 + x.euclidean_norm_squared().sqrt();
        let lhs = g.compose(&h).act_on_point(&x);
        let rhs = g.act_on_point(&h.act_on_point(&x));
        points.push((lhs - rhs).euclidean_norm_squared().sqrt() / scale);
        let back = g.inverse().act_on_point(&g.act_on_point(&x));
        inverse.push((back - x).euclidean_norm_squared().sqrt() / scale);
        let v = Vector3::from_fn(|_, _| rng.random_range(-0.5..0.5));
        let u = TimelikeLine::new(Vector3::from_fn(|_, _| rng.random_range(-3.0..3.0)), v).expect("slow line");
        let a = g.compose(&h).act_on_line(&u);
        let b = g.act_on_line(&h.act_on_line(&u));
        let gap = (a.x() - b.x()).norm().max((a.v() - b.v()).norm()) / (1.0 + u.x().norm());
        lines.push(gap);
    }
    let tol = cfg.thresholds.group;
    vec![
        Property::within("poincare-law-on-points", n, points.get(), tol),
        Property::within("poincare-inverse", n, inverse.get(), tol),
        Property::within("poincare-law-on-lines", n, lines.get(), tol),
    ]
}

fn wigner_properties(cfg: &RunConfig) -> CliResult<Vec<Property>> {
    let n = cfg.n(1000);
    let tol = cfg.thresholds.wigner;
    let mut rng = cfg.rng(3);
    let [mut rotation, mut unitary, mut scale, mut covariant, mut rest, mut dhom] = [Worst::default(); 6];
    for i in 0..n {
        let k = random_timelike(&mut rng, 2.0);
        let b = random_su2(&mut rng);
        let a = random_sl2c(&mut rng, MAX_RAPIDITY);
        rotation.push(spinor_gap(&wigner_rotation(&k, &b)?, &b));
        unitary.push(wigner_rotation(&k, &a)?.unitarity_defect());
        let q = canonical_boost(&k)?;
        let alpha = rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        scale.push(spinor_gap(&canonical_boost(&(alpha * k))?, &q));
        let conj = b * q * b.inverse();
        covariant.push(spinor_gap(&canonical_boost(&b.act(&k))?, &conj));
        // Q(k) boosts the rest vector of the same mass onto k, future-directed
        let m = k.square().sqrt();
        let lifted = q.act(&FourVector::new(m, 0.0, 0.0, 0.0));
        let k_future = if k.x0 > 0.0 { k } else { -1.0 * k };
        rest.push((lifted - k_future).euclidean_norm_squared().sqrt() / k.euclidean_norm_squared().sqrt());
        let spin = Spin::from_twice((i % 13) as u32);
        let b2 = random_su2(&mut rng);
        let lhs = wigner_d(spin, &(b * b2))?;
        let rhs = wigner_d(spin, &b)?.into_entries() * wigner_d(spin, &b2)?.entries();
        dhom.push((lhs.entries() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(vec![
        Property::within("wigner-rotation-of-rotation", n, rotation.get(), tol),
        Property::within("wigner-rotation-in-su2", n, unitary.get(), tol),
        Property::within("canonical-boost-scale-invariance", n, scale.get(), tol),
        Property::within("canonical-boost-rotation-covariance", n, covariant.get(), tol),
        Property::within("canonical-boost-lifts-rest-frame", n, rest.get(), tol),
        Property::within("wigner-d-homomorphism", n, dhom.get(), tol),
    ])
}

/// Group kernel and Wigner machinery.
pub fn run(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let mut properties = lorentz_properties(cfg)?;
    properties.extend(poincare_law(cfg));
    properties.extend(wigner_properties(cfg)?);
    let details = json!({ "max_rapidity": MAX_RAPIDITY, "max_spin": Spin::from_twice(12) });
    Ok(SuiteReport::new("group", properties, details))
}
