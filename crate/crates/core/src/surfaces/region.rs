use nalgebra::{Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::set::SpatialSet;
use super::surface::AchronalSurface;
use crate::error::{invalid, Result};
use crate::minkowski::FourVector;
use crate::poincare::{PoincareElement, SpinorMatrix};
use crate::tolerances::{LIPSCHITZ_SLACK, ON_SURFACE};

/// The achronal set `{(τ(x), x) : x ∈ base}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub surface: AchronalSurface,
    pub base: SpatialSet,
}

impl Region {
    pub fn new(surface: AchronalSurface, base: SpatialSet) -> Self {
        Self { surface, base }
    }

    pub fn whole(surface: AchronalSurface) -> Self {
        Self::new(surface, SpatialSet::Everything)
    }

    pub fn point_over(&self, x: &Vector3<f64>) -> FourVector {
        FourVector::from_parts(self.surface.tau(x), x)
    }

    pub fn contains_point(&self, p: &FourVector) -> bool {
        let x = p.spatial();
        (p.x0 - self.surface.tau(&x)).abs() <= ON_SURFACE * p.x0.abs().max(1.0) && self.base.contains(&x)
    }

    /// The image `g·Δ`, which is again a graph region when the surface is
    /// affine. Pure translations of affine surfaces keep simple bases simple.
    pub fn transformed(&self, g: &PoincareElement) -> Result<Region> {
        let (w, t0) = self
            .surface
            .affine()
            .ok_or_else(|| invalid(format!("image of a {} surface is not a supported family", self.surface.kind())))?;
        let image = image_plane(&w, t0, g)?;
        let a = g.translation;
        if g.spinor == SpinorMatrix::identity() {
            if let Some(base) = self.base.translated(&a.spatial()) {
                return Ok(Region::new(image, base));
            }
        }
        let base = SpatialSet::Transformed {
            set: Box::new(self.base.clone()),
            surface: Box::new(image.clone()),
            inverse: g.inverse(),
        };
        Ok(Region::new(image, base))
    }
}

/// Image of the plane `t = w·x + t0` under `g`. With `n = (1, −w)` the plane
/// is `n·X = t0` (Euclidean dot); it pulls back to `m·X′ = t0 + m·a` with
/// `m = (Λ⁻¹)ᵀ n`.
fn image_plane(w: &Vector3<f64>, t0: f64, g: &PoincareElement) -> Result<AchronalSurface> {
    let lambda_inv = g.spinor.inverse().lorentz();
    let n = Vector4::new(1.0, -w.x, -w.y, -w.z);
    let m = lambda_inv.transpose() * n;
    let a = Vector4::from(g.translation.to_array());
    let mut w2 = -Vector3::new(m[1], m[2], m[3]) / m[0];
    let t2 = (t0 + m.dot(&a)) / m[0];
    let norm = w2.norm();
    if norm > 1.0 && norm <= 1.0 + LIPSCHITZ_SLACK {
        w2 /= norm;
    }
    if w2 == Vector3::zeros() {
        AchronalSurface::flat(t2)
    } else {
        AchronalSurface::tilted(w2, t2)
    }
}
