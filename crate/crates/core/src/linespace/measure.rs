use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;

use super::intersect::line_meets_region;
use super::kmap::k_jacobian_det;
use super::mc::{MCEstimate, McPlan, Tally};
use super::quadrature::{ball_rule, box_rule};
use crate::error::{invalid, Result};
use crate::poincare::random::random_in_ball;
use crate::poincare::LinePoint;
use crate::surfaces::{AchronalSurface, Region, SpatialSet};

/// Volume of the velocity ball `O₁`.
pub const VELOCITY_BALL: f64 = 4.0 / 3.0 * PI;

const QUADRATURE_ORDER: usize = 12;

/// Line measure of the set of lines meeting the region over `base`,
/// `∫_{base × O₁} |det Dk| d(x, v)`, by product quadrature. Needs a C¹
/// surface and a bounded base.
pub fn n_measure(surface: &AchronalSurface, base: &SpatialSet) -> Result<f64> {
    if !surface.has_gradient() {
        return Err(invalid(format!("{} surface has no gradient", surface.kind())));
    }
    let outer = match base {
        SpatialSet::Empty => return Ok(0.0),
        SpatialSet::Ball { center, radius } => ball_rule(center, *radius, QUADRATURE_ORDER),
        SpatialSet::Box { min, max } => box_rule(min, max, QUADRATURE_ORDER),
        other => {
            let (lo, hi) = other.bounding_box().ok_or_else(|| invalid("n_measure needs a bounded base"))?;
            box_rule(&lo, &hi, 4 * QUADRATURE_ORDER)
                .into_iter()
                .filter(|(x, _)| other.contains(x))
                .collect()
        }
    };
    let inner = ball_rule(&Vector3::zeros(), 1.0, QUADRATURE_ORDER);
    let mut total = 0.0;
    for (x, wx) in &outer {
        let fiber: f64 = inner
            .iter()
            .map(|(v, wv)| wv * k_jacobian_det(surface, x, v).expect("gradient checked").abs())
            .sum();
        total += wx * fiber;
    }
    Ok(total)
}

/// Independent estimate of the same measure: lines drawn uniformly from a
/// box of intercepts that contains every line meeting the region, counted
/// when they meet it. Uses no Jacobian.
pub fn n_measure_mc(surface: &AchronalSurface, base: &SpatialSet, n_samples: usize, seed: u64) -> Result<MCEstimate> {
    let (lo, hi) = base.bounding_box().ok_or_else(|| invalid("n_measure needs a bounded base"))?;
    let center = (lo + hi) * 0.5;
    // an intercept is x − τ(x)v with |v| < 1 and x in the box
    let reach = surface.tau(&center).abs() + surface.lipschitz_bound() * (hi - lo).norm() * 0.5;
    let (lo, hi) = (lo - Vector3::repeat(reach), hi + Vector3::repeat(reach));
    let volume = (hi - lo).iter().product::<f64>() * VELOCITY_BALL;
    let region = Region::new(surface.clone(), base.clone());
    let plan = McPlan::new(n_samples, seed)?;
    let tallies = plan.run(|rng, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let y = Vector3::from_fn(|a, _| rng.random_range(lo[a]..hi[a]));
            let u = LinePoint::new(y, random_in_ball(rng, 1.0))?;
            t.push(if line_meets_region(&u, &region)? { volume } else { 0.0 });
        }
        Ok(t)
    })?;
    Ok(plan.estimate(&tallies))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let flat = AchronalSurface::flat(0.0).unwrap();
        let ball = SpatialSet::ball(Vector3::zeros(), 1.0).unwrap();
        let n = n_measure(&flat, &ball).unwrap();
        assert!((n - VELOCITY_BALL * VELOCITY_BALL).abs() < 1e-10);
        let tilted = AchronalSurface::tilted(Vector3::new(0.0, 0.0, 0.5), 0.0).unwrap();
        let cube = SpatialSet::cuboid(Vector3::zeros(), Vector3::new(1.0, 2.0, 0.5)).unwrap();
        assert!((n_measure(&tilted, &cube).unwrap() - VELOCITY_BALL).abs() < 1e-10);
        assert_eq!(n_measure(&flat, &SpatialSet::Empty).unwrap(), 0.0);
        assert!(n_measure(&AchronalSurface::Clamp, &ball).is_err());
        assert!(n_measure(&flat, &SpatialSet::Everything).is_err());
    }

    #[test]
    fn curved_surface_and_monte_carlo() {
        let shell = AchronalSurface::SqrtShell;
        let base = SpatialSet::ball(Vector3::new(0.5, 0.0, 0.0), 0.8).unwrap();
        let exact = VELOCITY_BALL * base.volume().unwrap();
        let quad = n_measure(&shell, &base).unwrap();
        assert!(((quad - exact) / exact).abs() < 1e-4);
        let mc = n_measure_mc(&shell, &base, 200_000, 9).unwrap();
        assert!((mc.value - exact).abs() < 3.0 * mc.std_error, "{mc:?} vs {exact}");
    }
}
