//! Random group elements and vectors for property tests and suites.

use nalgebra::{Matrix2, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::group::PoincareElement;
use super::spinor::{SpinorMatrix, C64};
use crate::minkowski::FourVector;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng));
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// Uniform in the open ball of radius `r`.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Vector3<f64> {
    random_unit_vector(rng) * r * rng.random::<f64>().cbrt()
}

/// Haar-random SU(2) element from a uniform unit quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> SpinorMatrix {
    let q: [f64; 4] = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    SpinorMatrix::new_unchecked(Matrix2::new(
        C64::new(a, -d),
        C64::new(-c, -b),
        C64::new(c, -b),
        C64::new(a, d),
    ))
}

/// `B · boost(n, ρ)` with `B` Haar-random, `n` uniform and `ρ ∈ [0, max_rapidity]`.
/// Every SL(2,ℂ) element of boost rapidity at most `max_rapidity` has this form.
pub fn random_sl2c<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> SpinorMatrix {
    let b = random_su2(rng);
    let n = random_unit_vector(rng);
    let rho = max_rapidity * rng.random::<f64>();
    b * SpinorMatrix::boost(&n, rho)
}

/// Timelike vector with mass in `[0.2, 0.2 + scale]`, spatial part of size ≲ `scale`,
/// and random time orientation.
pub fn random_timelike<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> FourVector {
    let m = 0.2 + scale * rng.random::<f64>();
    let p = Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * scale;
    let e = (m * m + p.norm_squared()).sqrt();
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    FourVector::from_parts(sign * e, &p)
}

pub fn random_four_vector<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> FourVector {
    FourVector::new(
        scale * gaussian(rng),
        scale * gaussian(rng),
        scale * gaussian(rng),
        scale * gaussian(rng),
    )
}

pub fn random_poincare<R: Rng + ?Sized>(rng: &mut R, shift: f64, max_rapidity: f64) -> PoincareElement {
    PoincareElement::new(random_four_vector(rng, shift), random_sl2c(rng, max_rapidity))
}
