use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::minkowski::{is_perp, FourVector};

/// Largest universe accepted; the ⊥ relation is stored as a dense bit matrix.
pub const MAX_UNIVERSE: usize = 4096;

/// A regular grid `origin + (i₀h₀, i₁h₁, i₂h₂, i₃h₃)`, `0 ≤ iₐ < shapeₐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default)]
    pub origin: FourVector,
    pub spacing: [f64; 4],
    pub shape: [usize; 4],
}

impl GridSpec {
    pub fn new(spacing: [f64; 4], shape: [usize; 4]) -> Result<Self> {
        let spec = Self { origin: FourVector::ZERO, spacing, shape };
        spec.validate()?;
        Ok(spec)
    }

    /// A `nt × nx` grid in the `(x₀, x₁)` plane.
    pub fn plane(nt: usize, nx: usize, dt: f64, dx: f64) -> Result<Self> {
        Self::new([dt, dx, 1.0, 1.0], [nt, nx, 1, 1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(invalid(format!("grid spacing must be positive, got {:?}", self.spacing)));
        }
        if self.shape.contains(&0) {
            return Err(invalid("grid shape entries must be at least 1"));
        }
        let n = self.len();
        if n > MAX_UNIVERSE {
            return Err(invalid(format!("grid has {n} points, above the limit of {MAX_UNIVERSE}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major position with time varying slowest.
    pub fn flat_index(&self, idx: [i64; 4]) -> Option<usize> {
        let mut flat = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            if i < 0 || i as usize >= self.shape[a] {
                return None;
            }
            flat = flat * self.shape[a] + i as usize;
        }
        Some(flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> [i64; 4] {
        let mut idx = [0i64; 4];
        for a in (0..4).rev() {
            idx[a] = (flat % self.shape[a]) as i64;
            flat /= self.shape[a];
        }
        idx
    }

    pub fn point(&self, idx: [i64; 4]) -> FourVector {
        let o = self.origin.to_array();
        FourVector::from(std::array::from_fn(|a| o[a] + idx[a] as f64 * self.spacing[a]))
    }
}

/// A finite universe 𝒰 of distinct events, with ⊥ precomputed.
#[derive(Debug, Clone)]
pub struct Universe {
    tag: String,
    points: Vec<FourVector>,
    perp: Vec<FixedBitSet>,
    grid: Option<GridSpec>,
}

impl Universe {
    pub fn new(tag: impl Into<String>, points: Vec<FourVector>) -> Result<Self> {
        Self::build(tag.into(), points, None)
    }

    pub fn grid(tag: impl Into<String>, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let points = (0..spec.len()).map(|i| spec.point(spec.multi_index(i))).collect();
        Self::build(tag.into(), points, Some(spec))
    }

    fn build(tag: String, points: Vec<FourVector>, grid: Option<GridSpec>) -> Result<Self> {
        if points.len() > MAX_UNIVERSE {
            return Err(invalid(format!("{} points exceed the limit of {MAX_UNIVERSE}", points.len())));
        }
        if let Some(p) = points.iter().find(|p| p.to_array().iter().any(|c| !c.is_finite())) {
            return Err(invalid(format!("non-finite event {:?}", p.to_array())));
        }
        let n = points.len();
        let mut perp = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(invalid(format!("event {:?} listed twice", points[i].to_array())));
                }
                if is_perp(&points[i], &points[j]) {
                    perp[i].insert(j);
                    perp[j].insert(i);
                }
            }
        }
        Ok(Self { tag, points, perp, grid })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[FourVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> FourVector {
        self.points[i]
    }

    pub fn grid_spec(&self) -> Option<&GridSpec> {
        self.grid.as_ref()
    }

    /// Indices of the events ⊥ to event `i`.
    pub fn perp_row(&self, i: usize) -> &FixedBitSet {
        &self.perp[i]
    }

    pub fn perp(&self, i: usize, j: usize) -> bool {
        self.perp[i].contains(j)
    }

    pub fn empty_set(&self) -> EventSet {
        EventSet(FixedBitSet::with_capacity(self.len()))
    }

    pub fn full_set(&self) -> EventSet {
        let mut s = self.empty_set();
        s.0.insert_range(..);
        s
    }

    pub fn set_from_indices(&self, indices: impl IntoIterator<Item = usize>) -> Result<EventSet> {
        let mut s = self.empty_set();
        for i in indices {
            if i >= self.len() {
                return Err(invalid(format!("event index {i} outside a universe of {}", self.len())));
            }
            s.0.insert(i);
        }
        Ok(s)
    }

    pub fn set_where(&self, pred: impl Fn(&FourVector) -> bool) -> EventSet {
        let mut s = self.empty_set();
        for (i, p) in self.points.iter().enumerate() {
            if pred(p) {
                s.0.insert(i);
            }
        }
        s
    }

    /// The subset whose bits are those of `mask`; needs `len ≤ 64`.
    pub fn set_from_mask(&self, mask: u64) -> EventSet {
        let mut s = self.empty_set();
        for i in (0..self.len().min(64)).filter(|i| mask >> i & 1 == 1) {
            s.0.insert(i);
        }
        s
    }

    pub fn random_subset<R: Rng + ?Sized>(&self, rng: &mut R, p: f64) -> EventSet {
        let mut s = self.empty_set();
        for i in 0..self.len() {
            if rng.random_bool(p) {
                s.0.insert(i);
            }
        }
        s
    }

    /// The sub-universe spanned by `set`, with grid structure dropped.
    pub fn restrict(&self, set: &EventSet, tag: impl Into<String>) -> Result<Universe> {
        Universe::new(tag, set.iter().map(|i| self.points[i]).collect())
    }
}

/// A subset of a [`Universe`], stored as a bitset over its indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet(FixedBitSet);

impl EventSet {
    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        let mut s = self.clone();
        s.0.union_with(&other.0);
        s
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        let mut s = self.clone();
        s.0.intersect_with(&other.0);
        s
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        let mut s = self.clone();
        s.0.difference_with(&other.0);
        s
    }

    pub(crate) fn bits(&self) -> &FixedBitSet {
        &self.0
    }

    pub(crate) fn bits_mut(&mut self) -> &mut FixedBitSet {
        &mut self.0
    }

    pub fn points(&self, universe: &Universe) -> Vec<FourVector> {
        self.iter().map(|i| universe.point(i)).collect()
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A universe description as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UniverseSpec {
    Grid(GridSpec),
    Points { points: Vec<FourVector> },
}

impl UniverseSpec {
    pub fn build(&self, tag: impl Into<String>) -> Result<Universe> {
        match self {
            UniverseSpec::Grid(spec) => Universe::grid(tag, spec.clone()),
            UniverseSpec::Points { points } => Universe::new(tag, points.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_round_trips() {
        let spec = GridSpec::new([1.0, 0.5, 2.0, 1.0], [3, 4, 2, 1]).unwrap();
        for i in 0..spec.len() {
            assert_eq!(spec.flat_index(spec.multi_index(i)), Some(i));
        }
        assert_eq!(spec.flat_index([3, 0, 0, 0]), None);
        assert_eq!(spec.flat_index([0, -1, 0, 0]), None);
        assert_eq!(spec.point([2, 1, 1, 0]), FourVector::new(2.0, 0.5, 2.0, 0.0));
    }

    #[test]
    fn rejects_bad_universes() {
        let p = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert!(Universe::new("dup", vec![p, p]).is_err());
        assert!(GridSpec::new([1.0, 0.0, 1.0, 1.0], [2, 2, 1, 1]).is_err());
        assert!(GridSpec::new([1.0; 4], [100, 100, 1, 1]).is_err());
    }

    #[test]
    fn perp_rows_match_predicate() {
        let u = Universe::grid("g", GridSpec::plane(3, 3, 1.0, 1.0).unwrap()).unwrap();
        for i in 0..u.len() {
            assert!(!u.perp(i, i));
            for j in 0..u.len() {
                assert_eq!(u.perp(i, j), is_perp(&u.point(i), &u.point(j)));
            }
        }
    }

    #[test]
    fn spec_json() {
        let s: UniverseSpec =
            serde_json::from_str(r#"{"kind":"grid","spacing":[1,1,1,1],"shape":[2,3,1,1]}"#).unwrap();
        assert_eq!(s.build("g").unwrap().len(), 6);
        let s: UniverseSpec = serde_json::from_str(r#"{"kind":"points","points":[[0,0,0,0],[1,0,0,0]]}"#).unwrap();
        assert_eq!(s.build("p").unwrap().len(), 2);
    }
}
