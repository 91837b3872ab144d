use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::surface::AchronalSurface;
use crate::error::{invalid, Error, Result};
use crate::minkowski::FourVector;
use crate::poincare::PoincareElement;
use crate::tolerances::SET_TREE_DEPTH;

/// An indicator over ℝ³. Balls and halfspaces are closed, boxes are
/// half-open `[min, max)`, complements flip closedness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetSpec", into = "SetSpec")]
pub enum SpatialSet {
    Ball { center: Vector3<f64>, radius: f64 },
    /// `{x : normal·x ≤ offset}`.
    Halfspace { normal: Vector3<f64>, offset: f64 },
    Box { min: Vector3<f64>, max: Vector3<f64> },
    Complement(Box<SpatialSet>),
    Union(Vec<SpatialSet>),
    Intersection(Vec<SpatialSet>),
    Everything,
    Empty,
    /// Spatial image of a region under a Poincaré element: `x` belongs when
    /// `inverse·(τ(x), x)` projects into `set`, `τ` being the image surface.
    Transformed { set: Box<SpatialSet>, surface: Box<AchronalSurface>, inverse: PoincareElement },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SetSpec {
    Ball { center: [f64; 3], radius: f64 },
    Halfspace { normal: [f64; 3], offset: f64 },
    Box { min: [f64; 3], max: [f64; 3] },
    Complement { set: Box<SetSpec> },
    Union { sets: Vec<SetSpec> },
    Intersection { sets: Vec<SetSpec> },
    Everything,
    Empty,
    Transformed { set: Box<SetSpec>, surface: AchronalSurface, inverse: PoincareElement },
}

impl TryFrom<SetSpec> for SpatialSet {
    type Error = Error;
    fn try_from(s: SetSpec) -> Result<Self> {
        let set = build(s)?;
        set.validate()?;
        Ok(set)
    }
}

fn build(s: SetSpec) -> Result<SpatialSet> {
    let all = |v: Vec<SetSpec>| v.into_iter().map(build).collect::<Result<Vec<_>>>();
    Ok(match s {
        SetSpec::Ball { center, radius } => SpatialSet::Ball { center: center.into(), radius },
        SetSpec::Halfspace { normal, offset } => SpatialSet::Halfspace { normal: normal.into(), offset },
        SetSpec::Box { min, max } => SpatialSet::Box { min: min.into(), max: max.into() },
        SetSpec::Complement { set } => SpatialSet::Complement(Box::new(build(*set)?)),
        SetSpec::Union { sets } => SpatialSet::Union(all(sets)?),
        SetSpec::Intersection { sets } => SpatialSet::Intersection(all(sets)?),
        SetSpec::Everything => SpatialSet::Everything,
        SetSpec::Empty => SpatialSet::Empty,
        SetSpec::Transformed { set, surface, inverse } => SpatialSet::Transformed {
            set: Box::new(build(*set)?),
            surface: Box::new(surface),
            inverse,
        },
    })
}

impl From<SpatialSet> for SetSpec {
    fn from(s: SpatialSet) -> Self {
        let all = |v: Vec<SpatialSet>| v.into_iter().map(SetSpec::from).collect();
        match s {
            SpatialSet::Ball { center, radius } => SetSpec::Ball { center: center.into(), radius },
            SpatialSet::Halfspace { normal, offset } => SetSpec::Halfspace { normal: normal.into(), offset },
            SpatialSet::Box { min, max } => SetSpec::Box { min: min.into(), max: max.into() },
            SpatialSet::Complement(set) => SetSpec::Complement { set: Box::new((*set).into()) },
            SpatialSet::Union(sets) => SetSpec::Union { sets: all(sets) },
            SpatialSet::Intersection(sets) => SetSpec::Intersection { sets: all(sets) },
            SpatialSet::Everything => SetSpec::Everything,
            SpatialSet::Empty => SetSpec::Empty,
            SpatialSet::Transformed { set, surface, inverse } => SetSpec::Transformed {
                set: Box::new((*set).into()),
                surface: *surface,
                inverse,
            },
        }
    }
}

type Aabb = (Vector3<f64>, Vector3<f64>);

const DYKSTRA_ROUNDS: usize = 500;

impl SpatialSet {
    pub fn ball(center: Vector3<f64>, radius: f64) -> Result<Self> {
        let s = SpatialSet::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn halfspace(normal: Vector3<f64>, offset: f64) -> Result<Self> {
        let s = SpatialSet::Halfspace { normal, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn cuboid(min: Vector3<f64>, max: Vector3<f64>) -> Result<Self> {
        let s = SpatialSet::Box { min, max };
        s.validate()?;
        Ok(s)
    }

    pub fn complement(self) -> Self {
        SpatialSet::Complement(Box::new(self))
    }

    pub fn depth(&self) -> usize {
        match self {
            SpatialSet::Complement(s) => 1 + s.depth(),
            SpatialSet::Transformed { set, .. } => 1 + set.depth(),
            SpatialSet::Union(v) | SpatialSet::Intersection(v) => 1 + v.iter().map(|s| s.depth()).max().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth() > SET_TREE_DEPTH {
            return Err(invalid(format!("set tree deeper than {SET_TREE_DEPTH}")));
        }
        self.validate_leaves()
    }

    fn validate_leaves(&self) -> Result<()> {
        let finite = |v: &Vector3<f64>| v.iter().all(|c| c.is_finite());
        match self {
            SpatialSet::Ball { center, radius } if !(finite(center) && *radius >= 0.0 && radius.is_finite()) => {
                Err(invalid("ball needs a finite centre and radius >= 0"))
            }
            SpatialSet::Halfspace { normal, offset } if !(finite(normal) && normal.norm() > 0.0 && offset.is_finite()) => {
                Err(invalid("halfspace needs a nonzero normal"))
            }
            SpatialSet::Box { min, max } if !(finite(min) && finite(max) && (0..3).all(|a| min[a] <= max[a])) => {
                Err(invalid("box needs min <= max componentwise"))
            }
            SpatialSet::Complement(s) => s.validate_leaves(),
            SpatialSet::Transformed { set, .. } => set.validate_leaves(),
            SpatialSet::Union(v) | SpatialSet::Intersection(v) => v.iter().try_for_each(|s| s.validate_leaves()),
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        match self {
            SpatialSet::Ball { center, radius } => (x - center).norm_squared() <= radius * radius,
            SpatialSet::Halfspace { normal, offset } => normal.dot(x) <= *offset,
            SpatialSet::Box { min, max } => (0..3).all(|a| min[a] <= x[a] && x[a] < max[a]),
            SpatialSet::Complement(s) => !s.contains(x),
            SpatialSet::Union(v) => v.iter().any(|s| s.contains(x)),
            SpatialSet::Intersection(v) => v.iter().all(|s| s.contains(x)),
            SpatialSet::Everything => true,
            SpatialSet::Empty => false,
            SpatialSet::Transformed { set, surface, inverse } => {
                let p = inverse.act_on_point(&FourVector::from_parts(surface.tau(x), x));
                set.contains(&p.spatial())
            }
        }
    }

    /// Axis-aligned box containing the set, when it is bounded and the bound
    /// is cheap to derive.
    pub fn bounding_box(&self) -> Option<Aabb> {
        match self {
            SpatialSet::Ball { center, radius } => {
                let r = Vector3::repeat(*radius);
                Some((center - r, center + r))
            }
            SpatialSet::Box { min, max } => Some((*min, *max)),
            SpatialSet::Empty => Some((Vector3::zeros(), Vector3::zeros())),
            SpatialSet::Union(v) => v.iter().try_fold(None::<Aabb>, |acc, s| {
                let b = s.bounding_box()?;
                Some(Some(match acc {
                    None => b,
                    Some(a) => (a.0.inf(&b.0), a.1.sup(&b.1)),
                }))
            })?,
            SpatialSet::Intersection(v) => {
                let boxes: Vec<Aabb> = v.iter().filter_map(|s| s.bounding_box()).collect();
                let first = *boxes.first()?;
                Some(boxes.iter().fold(first, |a, b| (a.0.sup(&b.0), a.1.inf(&b.1).sup(&a.0.sup(&b.0)))))
            }
            _ => None,
        }
    }

    /// Lebesgue volume where it has a closed form.
    pub fn volume(&self) -> Option<f64> {
        match self {
            SpatialSet::Ball { radius, .. } => Some(4.0 / 3.0 * std::f64::consts::PI * radius.powi(3)),
            SpatialSet::Box { min, max } => Some((max - min).iter().product()),
            SpatialSet::Empty => Some(0.0),
            _ => None,
        }
    }

    /// Conservative: `false` only when the box and the set are disjoint.
    pub fn may_intersect_box(&self, lo: &Vector3<f64>, hi: &Vector3<f64>) -> bool {
        match self {
            SpatialSet::Ball { center, radius } => {
                let nearest = center.sup(lo).inf(hi);
                (nearest - center).norm_squared() <= radius * radius
            }
            SpatialSet::Halfspace { normal, offset } => {
                let lowest = Vector3::from_fn(|a, _| if normal[a] >= 0.0 { lo[a] } else { hi[a] });
                normal.dot(&lowest) <= *offset
            }
            SpatialSet::Box { min, max } => (0..3).all(|a| lo[a] < max[a] && min[a] <= hi[a]),
            SpatialSet::Complement(s) => !s.contains_box(lo, hi),
            SpatialSet::Union(v) => v.iter().any(|s| s.may_intersect_box(lo, hi)),
            SpatialSet::Intersection(v) => v.iter().all(|s| s.may_intersect_box(lo, hi)),
            SpatialSet::Everything => true,
            SpatialSet::Empty => false,
            SpatialSet::Transformed { .. } => true,
        }
    }

    /// Conservative: `true` only when the closed box lies inside the set.
    pub fn contains_box(&self, lo: &Vector3<f64>, hi: &Vector3<f64>) -> bool {
        let corners = (0..8).map(|c: usize| Vector3::from_fn(|a, _| if (c >> a) & 1 == 1 { hi[a] } else { lo[a] }));
        match self {
            SpatialSet::Ball { .. } | SpatialSet::Halfspace { .. } => corners.into_iter().all(|p| self.contains(&p)),
            SpatialSet::Box { min, max } => (0..3).all(|a| min[a] <= lo[a] && hi[a] < max[a]),
            SpatialSet::Complement(s) => !s.may_intersect_box(lo, hi),
            SpatialSet::Union(v) => v.iter().any(|s| s.contains_box(lo, hi)),
            SpatialSet::Intersection(v) => v.iter().all(|s| s.contains_box(lo, hi)),
            SpatialSet::Everything => true,
            SpatialSet::Empty | SpatialSet::Transformed { .. } => false,
        }
    }

    /// Euclidean distance to the closure, for the leaves where it is exact.
    pub fn distance(&self, y: &Vector3<f64>) -> Option<f64> {
        match self {
            SpatialSet::Ball { center, radius } => Some(((y - center).norm() - radius).max(0.0)),
            SpatialSet::Halfspace { normal, offset } => Some(((normal.dot(y) - offset) / normal.norm()).max(0.0)),
            SpatialSet::Box { min, max } => Some((y - y.sup(min).inf(max)).norm()),
            SpatialSet::Everything => Some(0.0),
            SpatialSet::Empty => Some(f64::INFINITY),
            SpatialSet::Union(v) => v.iter().map(|s| s.distance(y)).try_fold(f64::INFINITY, |m, d| Some(m.min(d?))),
            _ => None,
        }
    }

    /// Nearest point of the closure for convex sets built from balls, boxes
    /// and halfspaces; `None` for everything else and for empty
    /// intersections. Intersections use Dykstra's alternating projections.
    pub fn project(&self, x: &Vector3<f64>) -> Option<Vector3<f64>> {
        match self {
            SpatialSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                Some(if n <= *radius { *x } else { center + d * (radius / n) })
            }
            SpatialSet::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                Some(if excess <= 0.0 { *x } else { x - normal * (excess / normal.norm_squared()) })
            }
            SpatialSet::Box { min, max } => Some(x.sup(min).inf(max)),
            SpatialSet::Everything => Some(*x),
            SpatialSet::Intersection(v) if v.iter().all(|s| s.is_convex()) => {
                let mut p = *x;
                let mut corrections = vec![Vector3::zeros(); v.len()];
                for _ in 0..DYKSTRA_ROUNDS {
                    let before = p;
                    for (s, c) in v.iter().zip(corrections.iter_mut()) {
                        let shifted = p + *c;
                        p = s.project(&shifted)?;
                        *c = shifted - p;
                    }
                    if (p - before).norm() <= 1e-15 * (1.0 + p.norm()) {
                        break;
                    }
                }
                // disjoint pieces leave the iterates outside some of them
                let slack = 1e-10 * (1.0 + p.norm());
                v.iter().all(|s| s.project(&p).is_some_and(|q| (q - p).norm() <= slack)).then_some(p)
            }
            _ => None,
        }
    }

    /// Whether [`SpatialSet::project`] applies.
    pub fn is_convex(&self) -> bool {
        match self {
            SpatialSet::Ball { .. } | SpatialSet::Halfspace { .. } | SpatialSet::Box { .. } | SpatialSet::Everything => true,
            SpatialSet::Intersection(v) => v.iter().all(|s| s.is_convex()),
            _ => false,
        }
    }

    /// Exact image under `x ↦ x + b`, when the tree has no transformed node.
    pub fn translated(&self, b: &Vector3<f64>) -> Option<SpatialSet> {
        let all = |v: &[SpatialSet]| v.iter().map(|s| s.translated(b)).collect::<Option<Vec<_>>>();
        Some(match self {
            SpatialSet::Ball { center, radius } => SpatialSet::Ball { center: center + b, radius: *radius },
            SpatialSet::Halfspace { normal, offset } => {
                SpatialSet::Halfspace { normal: *normal, offset: offset + normal.dot(b) }
            }
            SpatialSet::Box { min, max } => SpatialSet::Box { min: min + b, max: max + b },
            SpatialSet::Complement(s) => SpatialSet::Complement(Box::new(s.translated(b)?)),
            SpatialSet::Union(v) => SpatialSet::Union(all(v)?),
            SpatialSet::Intersection(v) => SpatialSet::Intersection(all(v)?),
            SpatialSet::Everything => SpatialSet::Everything,
            SpatialSet::Empty => SpatialSet::Empty,
            SpatialSet::Transformed { .. } => return None,
        })
    }
}
