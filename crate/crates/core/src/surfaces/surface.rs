use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::set::SpatialSet;
use crate::error::{invalid, Error, Result};
use crate::tolerances::LIPSCHITZ_SLACK;

/// A maximal achronal surface, the graph `{(τ(x), x)}` of a 1-Lipschitz `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceSpec", into = "SurfaceSpec")]
pub enum AchronalSurface {
    /// `τ ≡ t0`.
    Flat { t0: f64 },
    /// `τ(x) = w·x + offset`, `|w| ≤ 1`.
    Tilted { w: Vector3<f64>, offset: f64 },
    /// `τ(x) = |x|`.
    LightCone,
    /// `τ(x) = √(|x|² + 1)`.
    SqrtShell,
    /// `τ(x) = min(max(x₃, 0), 1)`.
    Clamp,
    Grid(GridSurface),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SurfaceSpec {
    Flat {
        #[serde(default)]
        t0: f64,
    },
    Tilted {
        w: [f64; 3],
        #[serde(default)]
        offset: f64,
    },
    Lightcone,
    Sqrtshell,
    Clamp,
    Grid(GridSpec),
}

impl TryFrom<SurfaceSpec> for AchronalSurface {
    type Error = Error;
    fn try_from(s: SurfaceSpec) -> Result<Self> {
        Ok(match s {
            SurfaceSpec::Flat { t0 } => AchronalSurface::flat(t0)?,
            SurfaceSpec::Tilted { w, offset } => AchronalSurface::tilted(Vector3::from(w), offset)?,
            SurfaceSpec::Lightcone => AchronalSurface::LightCone,
            SurfaceSpec::Sqrtshell => AchronalSurface::SqrtShell,
            SurfaceSpec::Clamp => AchronalSurface::Clamp,
            SurfaceSpec::Grid(g) => AchronalSurface::Grid(GridSurface::try_from(g)?),
        })
    }
}

impl From<AchronalSurface> for SurfaceSpec {
    fn from(s: AchronalSurface) -> Self {
        match s {
            AchronalSurface::Flat { t0 } => SurfaceSpec::Flat { t0 },
            AchronalSurface::Tilted { w, offset } => SurfaceSpec::Tilted { w: w.into(), offset },
            AchronalSurface::LightCone => SurfaceSpec::Lightcone,
            AchronalSurface::SqrtShell => SurfaceSpec::Sqrtshell,
            AchronalSurface::Clamp => SurfaceSpec::Clamp,
            AchronalSurface::Grid(g) => SurfaceSpec::Grid(g.into()),
        }
    }
}

impl AchronalSurface {
    pub fn flat(t0: f64) -> Result<Self> {
        if !t0.is_finite() {
            return Err(invalid("flat surface needs a finite time"));
        }
        Ok(AchronalSurface::Flat { t0 })
    }

    pub fn tilted(w: Vector3<f64>, offset: f64) -> Result<Self> {
        if !(w.norm() <= 1.0 + LIPSCHITZ_SLACK) || !offset.is_finite() {
            if !offset.is_finite() {
                return Err(invalid("tilted plane needs a finite offset"));
            }
            return Err(Error::NotAchronal(format!("tilted plane needs |w| <= 1, got {}", w.norm())));
        }
        Ok(AchronalSurface::Tilted { w, offset })
    }

    /// The plane `τ(x) = x₃`, achronal but not spacelike.
    pub fn null_plane() -> Self {
        AchronalSurface::Tilted { w: Vector3::z(), offset: 0.0 }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AchronalSurface::Flat { .. } => "flat",
            AchronalSurface::Tilted { .. } => "tilted",
            AchronalSurface::LightCone => "lightcone",
            AchronalSurface::SqrtShell => "sqrtshell",
            AchronalSurface::Clamp => "clamp",
            AchronalSurface::Grid(_) => "grid",
        }
    }

    pub fn tau(&self, x: &Vector3<f64>) -> f64 {
        match self {
            AchronalSurface::Flat { t0 } => *t0,
            AchronalSurface::Tilted { w, offset } => w.dot(x) + offset,
            AchronalSurface::LightCone => x.norm(),
            AchronalSurface::SqrtShell => (x.norm_squared() + 1.0).sqrt(),
            AchronalSurface::Clamp => x.z.clamp(0.0, 1.0),
            AchronalSurface::Grid(g) => g.eval(x),
        }
    }

    /// `∇τ` where the surface is C¹ everywhere; `None` otherwise.
    pub fn gradient(&self, x: &Vector3<f64>) -> Option<Vector3<f64>> {
        match self {
            AchronalSurface::Flat { .. } => Some(Vector3::zeros()),
            AchronalSurface::Tilted { w, .. } => Some(*w),
            AchronalSurface::SqrtShell => Some(x / (x.norm_squared() + 1.0).sqrt()),
            _ => None,
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient(&Vector3::zeros()).is_some()
    }

    /// Declared global Lipschitz constant.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            AchronalSurface::Flat { .. } => 0.0,
            AchronalSurface::Tilted { w, .. } => w.norm(),
            AchronalSurface::Grid(g) => g.lipschitz_bound(),
            _ => 1.0,
        }
    }

    /// `(w, offset)` when `τ(x) = w·x + offset`.
    pub fn affine(&self) -> Option<(Vector3<f64>, f64)> {
        match self {
            AchronalSurface::Flat { t0 } => Some((Vector3::zeros(), *t0)),
            AchronalSurface::Tilted { w, offset } => Some((*w, *offset)),
            _ => None,
        }
    }

    /// Closed convex pieces covering ℝ³ on each of which `τ = w·x + offset`.
    pub fn affine_pieces(&self) -> Option<Vec<(SpatialSet, Vector3<f64>, f64)>> {
        match self {
            AchronalSurface::Clamp => {
                let below = SpatialSet::Halfspace { normal: Vector3::z(), offset: 0.0 };
                let above = SpatialSet::Halfspace { normal: -Vector3::z(), offset: -1.0 };
                let slab = SpatialSet::Intersection(vec![
                    SpatialSet::Halfspace { normal: -Vector3::z(), offset: 0.0 },
                    SpatialSet::Halfspace { normal: Vector3::z(), offset: 1.0 },
                ]);
                Some(vec![(below, Vector3::zeros(), 0.0), (slab, Vector3::z(), 0.0), (above, Vector3::zeros(), 1.0)])
            }
            _ => self.affine().map(|(w, offset)| vec![(SpatialSet::Everything, w, offset)]),
        }
    }

    /// A box outside of which the surface has no new features, for samplers.
    pub fn feature_box(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        match self {
            AchronalSurface::Grid(g) => Some(g.bounds()),
            _ => None,
        }
    }
}

/// A function tabulated on a regular grid and interpolated piecewise
/// multilinearly, with coordinates clamped to the grid box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSurface {
    origin: Vector3<f64>,
    spacing: Vector3<f64>,
    shape: [usize; 3],
    values: Vec<f64>,
    lipschitz: f64,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    origin: [f64; 3],
    spacing: [f64; 3],
    shape: [usize; 3],
    values: Vec<f64>,
}

impl TryFrom<GridSpec> for GridSurface {
    type Error = Error;
    fn try_from(g: GridSpec) -> Result<Self> {
        GridSurface::new(Vector3::from(g.origin), Vector3::from(g.spacing), g.shape, g.values)
    }
}

impl From<GridSurface> for GridSpec {
    fn from(g: GridSurface) -> Self {
        GridSpec { origin: g.origin.into(), spacing: g.spacing.into(), shape: g.shape, values: g.values }
    }
}

impl GridSurface {
    /// Values are indexed `i + nx·(j + ny·k)`. Fails unless the certified
    /// Lipschitz bound of the interpolant is at most 1.
    pub fn new(origin: Vector3<f64>, spacing: Vector3<f64>, shape: [usize; 3], values: Vec<f64>) -> Result<Self> {
        if shape.contains(&0) || values.len() != shape.iter().product::<usize>() {
            return Err(invalid(format!(
                "grid shape {shape:?} does not match {} values",
                values.len()
            )));
        }
        if !spacing.iter().all(|h| *h > 0.0 && h.is_finite()) || !values.iter().all(|v| v.is_finite()) {
            return Err(invalid("grid needs positive spacing and finite values"));
        }
        let mut g = GridSurface { origin, spacing, shape, values, lipschitz: 0.0 };
        g.lipschitz = g.certified_lipschitz();
        if g.lipschitz > 1.0 + LIPSCHITZ_SLACK {
            return Err(Error::NotAchronal(format!("grid interpolant has Lipschitz bound {} > 1", g.lipschitz)));
        }
        Ok(g)
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(
        origin: Vector3<f64>,
        spacing: Vector3<f64>,
        shape: [usize; 3],
        f: impl Fn(&Vector3<f64>) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.iter().product());
        for k in 0..shape[2] {
            for j in 0..shape[1] {
                for i in 0..shape[0] {
                    let x = origin + spacing.component_mul(&Vector3::new(i as f64, j as f64, k as f64));
                    values.push(f(&x));
                }
            }
        }
        Self::new(origin, spacing, shape, values)
    }

    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[i + self.shape[0] * (j + self.shape[1] * k)]
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    pub fn bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let extent = Vector3::from_fn(|a, _| (self.shape[a] - 1) as f64 * self.spacing[a]);
        (self.origin, self.origin + extent)
    }

    /// Within a cell each partial derivative is a convex combination of the
    /// slopes of the cell's edges along that axis, so the gradient norm is
    /// bounded by the norm of the per-axis maximal edge slopes.
    fn certified_lipschitz(&self) -> f64 {
        let [nx, ny, nz] = self.shape;
        let cells = |n: usize| 0..n.saturating_sub(1).max(1);
        let mut worst: f64 = 0.0;
        for k in cells(nz) {
            for j in cells(ny) {
                for i in cells(nx) {
                    let mut s = [0.0f64; 3];
                    for (dj, dk) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                        if nx > 1 && j + dj < ny && k + dk < nz {
                            let d = self.at(i + 1, j + dj, k + dk) - self.at(i, j + dj, k + dk);
                            s[0] = s[0].max(d.abs() / self.spacing.x);
                        }
                        if ny > 1 && i + dj < nx && k + dk < nz {
                            let d = self.at(i + dj, j + 1, k + dk) - self.at(i + dj, j, k + dk);
                            s[1] = s[1].max(d.abs() / self.spacing.y);
                        }
                        if nz > 1 && i + dj < nx && j + dk < ny {
                            let d = self.at(i + dj, j + dk, k + 1) - self.at(i + dj, j + dk, k);
                            s[2] = s[2].max(d.abs() / self.spacing.z);
                        }
                    }
                    worst = worst.max((s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt());
                }
            }
        }
        worst
    }

    pub fn eval(&self, x: &Vector3<f64>) -> f64 {
        let mut idx = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let n = self.shape[a];
            if n == 1 {
                continue;
            }
            let u = ((x[a] - self.origin[a]) / self.spacing[a]).clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n - 2);
            idx[a] = i;
            frac[a] = u - i as f64;
        }
        let mut sum = 0.0;
        for corner in 0..8usize {
            let mut weight = 1.0;
            let mut node = idx;
            for a in 0..3 {
                let up = (corner >> a) & 1 == 1;
                if up {
                    if self.shape[a] == 1 {
                        weight = 0.0;
                        break;
                    }
                    node[a] += 1;
                    weight *= frac[a];
                } else {
                    weight *= 1.0 - frac[a];
                }
            }
            if weight != 0.0 {
                sum += weight * self.at(node[0], node[1], node[2]);
            }
        }
        sum
    }
}
