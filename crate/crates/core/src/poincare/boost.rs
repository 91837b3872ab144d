use nalgebra::Matrix2;

use super::spinor::{hermitian, SpinorMatrix, C64};
use crate::error::{invalid, Result};
use crate::minkowski::FourVector;

/// The canonical cross section `Q(k)`: the positive unimodular matrix with
/// `Q(k)·(ηm, 0, 0, 0) = k`, `m = √(k·k)`, `η = sgn k₀`.
///
/// `Q² = ηK/m`, and for a positive 2×2 matrix `M` with `det M = 1` the
/// positive root is `(M + 1)/√(tr M + 2)`.
pub fn canonical_boost(k: &FourVector) -> Result<SpinorMatrix> {
    let q = k.square();
    if !(q > 0.0) || !q.is_finite() {
        return Err(invalid(format!("canonical boost needs a timelike vector, got k·k = {q}")));
    }
    let m = q.sqrt();
    let eta = k.x0.signum();
    let target = hermitian(k) * C64::from(eta / m);
    let tr = target[(0, 0)].re + target[(1, 1)].re;
    let root = (target + Matrix2::identity()) / C64::from((tr + 2.0).sqrt());
    Ok(SpinorMatrix::new_unchecked(root))
}

/// `Q(k)` for a `k` whose mass `√(k·k)` is known in closed form. Near the
/// light cone `k·k` cancels badly, while `Q = (ηK/m + 1)/√(2|k₀|/m + 2)`
/// only needs `m`.
pub fn canonical_boost_with_mass(k: &FourVector, mass: f64) -> Result<SpinorMatrix> {
    if !(mass > 0.0 && mass.is_finite()) || !(k.x0.abs() >= mass * (1.0 - 1e-9)) {
        return Err(invalid(format!("mass {mass} does not fit k₀ = {}", k.x0)));
    }
    let eta = k.x0.signum();
    let target = hermitian(k) * C64::from(eta / mass);
    let root = (target + Matrix2::identity()) / C64::from((2.0 * k.x0.abs() / mass + 2.0).sqrt());
    Ok(SpinorMatrix::new_unchecked(root))
}

/// `R(k, A) = Q(k)⁻¹ A Q(A⁻¹·k)`.
///
/// `B = A Q(A⁻¹·k)` carries the rest frame to `k` just as `Q(k)` does, so
/// `B = Q(k) R` is the polar decomposition of `B` and `R` is its unitary
/// factor. Reading it off that way keeps `R` accurate to rounding even when
/// the boosts are huge, where the literal product loses many digits.
pub fn wigner_rotation(k: &FourVector, a: &SpinorMatrix) -> Result<SpinorMatrix> {
    let qb = canonical_boost(&a.inverse().act(k))?;
    Ok((*a * qb).nearest_su2())
}

/// [`wigner_rotation`] for a `k` of known mass, which `A⁻¹` preserves.
pub fn wigner_rotation_with_mass(k: &FourVector, mass: f64, a: &SpinorMatrix) -> Result<SpinorMatrix> {
    let qb = canonical_boost_with_mass(&a.inverse().act(k), mass)?;
    Ok((*a * qb).nearest_su2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::random::{random_sl2c, random_su2, random_timelike};
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &SpinorMatrix, b: &SpinorMatrix) -> f64 {
        (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rest_frame_is_identity() {
        let q = canonical_boost(&FourVector::new(2.5, 0.0, 0.0, 0.0)).unwrap();
        assert!(close(&q, &SpinorMatrix::identity()) < 1e-15);
    }

    #[test]
    fn boost_along_axis_three() {
        let (m, rho) = (1.7, 0.8);
        let k = FourVector::new(m * f64::cosh(rho), 0.0, 0.0, m * f64::sinh(rho));
        let q = canonical_boost(&k).unwrap();
        let expect = SpinorMatrix::boost(&Vector3::z(), rho);
        assert!(close(&q, &expect) < 1e-12);
        // oracle: Q maps the rest vector to k
        let back = q.act(&FourVector::new(m, 0.0, 0.0, 0.0));
        assert!((back - k).euclidean_norm_squared().sqrt() < 1e-12);
    }

    #[test]
    fn rejects_non_timelike() {
        assert!(canonical_boost(&FourVector::new(1.0, 0.0, 0.0, 1.0)).is_err());
        assert!(canonical_boost(&FourVector::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn properties_of_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = random_timelike(&mut rng, 3.0);
            let q = canonical_boost(&k).unwrap();
            let m = q.matrix();
            assert!((m - m.adjoint()).iter().all(|z| z.norm() < 1e-14));
            assert!(m[(0, 0)].re > 0.0 && (q.determinant() - C64::from(1.0)).norm() < 1e-12);
            let eta = k.x0.signum();
            let img = q.act(&FourVector::new(eta * k.square().sqrt(), 0.0, 0.0, 0.0));
            assert!((img - k).euclidean_norm_squared().sqrt() < 1e-10 * (1.0 + k.euclidean_norm_squared()));
            assert!(close(&canonical_boost(&(2.0 * k)).unwrap(), &q) < 1e-12);
            assert!(close(&canonical_boost(&(-0.5 * k)).unwrap(), &q) < 1e-12);
            let b = random_su2(&mut rng);
            let lhs = canonical_boost(&b.act(&k)).unwrap();
            let rhs = b * q * b.inverse();
            assert!(close(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn wigner_rotation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let k = random_timelike(&mut rng, 3.0);
            let b = random_su2(&mut rng);
            assert!(close(&wigner_rotation(&k, &b).unwrap(), &b) < 1e-10);
            let q = canonical_boost(&k).unwrap();
            assert!(close(&wigner_rotation(&k, &q).unwrap(), &SpinorMatrix::identity()) < 1e-10);
            let a = random_sl2c(&mut rng, 1.0);
            let r = wigner_rotation(&k, &a).unwrap();
            assert!(r.unitarity_defect() < 1e-10);
            assert!((r.determinant() - C64::from(1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn polar_factor_matches_literal_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let k = random_timelike(&mut rng, 3.0);
            let a = random_sl2c(&mut rng, 1.0);
            let literal = canonical_boost(&k).unwrap().inverse() * a * canonical_boost(&a.inverse().act(&k)).unwrap();
            assert!(close(&wigner_rotation(&k, &a).unwrap(), &literal) < 1e-10);
        }
    }

    #[test]
    fn rotation_stays_exact_near_the_light_cone() {
        // mass 1e-6 at unit momentum: the literal product loses about twelve digits
        let (m, p) = (1e-6_f64, Vector3::new(0.6_f64, 0.0, 0.8));
        let k = FourVector::from_parts((m * m + p.norm_squared()).sqrt(), &p);
        let a = SpinorMatrix::boost(&Vector3::new(0.0, 1.0, 0.0), 0.7);
        let r = wigner_rotation_with_mass(&k, m, &a).unwrap();
        assert!(r.unitarity_defect() < 1e-14);
        // R maps the fixed rest frame of A⁻¹·k onto that of k
        let lhs = canonical_boost_with_mass(&k, m).unwrap() * r;
        let rhs = a * canonical_boost_with_mass(&a.inverse().act(&k), m).unwrap();
        let scale = rhs.matrix().norm();
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-12 * scale);
    }

    #[test]
    fn cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let k = random_timelike(&mut rng, 2.0);
            let a1 = random_sl2c(&mut rng, 1.0);
            let a2 = random_sl2c(&mut rng, 1.0);
            let lhs = wigner_rotation(&k, &(a1 * a2)).unwrap();
            let rhs = wigner_rotation(&k, &a1).unwrap()
                * wigner_rotation(&a1.inverse().act(&k), &a2).unwrap();
            assert!(close(&lhs, &rhs) < 1e-9);
        }
    }
}
