use nalgebra::Vector3;

use super::intersect::line_surface_intersection;
use crate::error::{invalid, Result};
use crate::poincare::LinePoint;
use crate::surfaces::AchronalSurface;

fn check_speed(v: &Vector3<f64>) -> Result<()> {
    if v.norm() < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("velocity must satisfy |v| < 1, got {}", v.norm())))
    }
}

/// `k(x, v) = (x − τ(x) v, v)`: the line through the surface point over `x`
/// with velocity `v`, in intercept coordinates.
pub fn k_map(surface: &AchronalSurface, x: &Vector3<f64>, v: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    check_speed(v)?;
    Ok((x - v * surface.tau(x), *v))
}

/// Solves `x = y + τ(x) v`, which is the crossing of the line `(y, v)`
/// with the surface.
pub fn k_inverse(surface: &AchronalSurface, y: &Vector3<f64>, v: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let u = LinePoint::new(*y, *v)?;
    let hit = line_surface_intersection(&u, surface)?;
    Ok((hit.point.spatial(), *v))
}

/// `det Dk = 1 − ∇τ(x)·v`; the Jacobian is block triangular.
pub fn k_jacobian_det(surface: &AchronalSurface, x: &Vector3<f64>, v: &Vector3<f64>) -> Option<f64> {
    surface.gradient(x).map(|g| 1.0 - g.dot(v))
}
