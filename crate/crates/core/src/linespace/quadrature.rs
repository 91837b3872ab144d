use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::Vector3;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub(crate) fn legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("nonzero"));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect()
}

/// Product rule over the ball of radius `r` about `c` in spherical
/// coordinates: Gauss–Legendre in radius and `cos θ`, trapezoid in `φ`.
pub(crate) fn ball_rule(c: &Vector3<f64>, r: f64, n: usize) -> Vec<(Vector3<f64>, f64)> {
    let radial = legendre(n, 0.0, r);
    let polar = legendre(n, -1.0, 1.0);
    let n_phi = 2 * n;
    let mut out = Vec::with_capacity(radial.len() * polar.len() * n_phi);
    for &(rho, wr) in &radial {
        for &(ct, wt) in &polar {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
                let dir = Vector3::new(st * phi.cos(), st * phi.sin(), ct);
                out.push((c + dir * rho, wr * rho * rho * wt * 2.0 * PI / n_phi as f64));
            }
        }
    }
    out
}

pub(crate) fn box_rule(lo: &Vector3<f64>, hi: &Vector3<f64>, n: usize) -> Vec<(Vector3<f64>, f64)> {
    let axes: Vec<Vec<(f64, f64)>> = (0..3).map(|a| legendre(n, lo[a], hi[a])).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for &(x, wx) in &axes[0] {
        for &(y, wy) in &axes[1] {
            for &(z, wz) in &axes[2] {
                out.push((Vector3::new(x, y, z), wx * wy * wz));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_and_moments() {
        let ball: f64 = ball_rule(&Vector3::zeros(), 2.0, 8).iter().map(|p| p.1).sum();
        assert!((ball - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        let second: f64 = ball_rule(&Vector3::zeros(), 1.0, 8).iter().map(|(x, w)| w * x.z * x.z).sum();
        assert!((second - 4.0 * PI / 15.0).abs() < 1e-12);
        let cube: f64 = box_rule(&Vector3::zeros(), &Vector3::new(1.0, 2.0, 3.0), 4)
            .iter()
            .map(|(x, w)| w * x.x * x.y)
            .sum();
        assert!((cube - 0.5 * 2.0 * 3.0).abs() < 1e-12);
    }
}
