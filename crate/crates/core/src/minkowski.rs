//! Minkowski vector algebra and causal classification.
//!
//! Signature (+,−,−,−), natural units. Sign tests on quadratic forms use the
//! hybrid tolerance `CLASSIFY_REL · max(1, |z|²)` with `|z|` the Euclidean
//! norm, so every downstream predicate is deterministic near the cone.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::tolerances::CLASSIFY_REL;

/// A point or vector of ℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector::new(0.0, 0.0, 0.0, 0.0);
    pub const TIME: FourVector = FourVector::new(1.0, 0.0, 0.0, 0.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn from_parts(x0: f64, x: &Vector3<f64>) -> Self {
        Self::new(x0, x.x, x.y, x.z)
    }

    /// The spatial projection ϖ.
    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        self.x0 * other.x0 - self.x1 * other.x1 - self.x2 * other.x2 - self.x3 * other.x3
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclidean_norm_squared(&self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn is_zero(&self) -> bool {
        self.x0 == 0.0 && self.x1 == 0.0 && self.x2 == 0.0 && self.x3 == 0.0
    }

    pub fn classify(&self) -> CausalClass {
        classify(self)
    }
}

impl From<[f64; 4]> for FourVector {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> Self {
        v.to_array()
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        FourVector::new(self * v.x0, self * v.x1, self * v.x2, self * v.x3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalClass {
    Spacelike,
    Timelike,
    LightlikeNonzero,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Separation {
    Timelike,
    Lightlike,
    Spacelike,
    Equal,
}

/// `a·b = a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃`.
pub fn minkowski_product(a: &FourVector, b: &FourVector) -> f64 {
    a.dot(b)
}

/// Absolute tolerance for the sign of `z·z`.
pub fn classify_tolerance(z: &FourVector) -> f64 {
    CLASSIFY_REL * z.euclidean_norm_squared().max(1.0)
}

pub fn classify(z: &FourVector) -> CausalClass {
    if z.is_zero() {
        return CausalClass::Zero;
    }
    let q = z.square();
    let eps = classify_tolerance(z);
    if q > eps {
        CausalClass::Timelike
    } else if q < -eps {
        CausalClass::Spacelike
    } else {
        CausalClass::LightlikeNonzero
    }
}

pub fn separation(x: &FourVector, y: &FourVector) -> Separation {
    if x == y {
        return Separation::Equal;
    }
    match classify(&(*x - *y)) {
        CausalClass::Timelike => Separation::Timelike,
        CausalClass::Spacelike => Separation::Spacelike,
        CausalClass::LightlikeNonzero => Separation::Lightlike,
        // x != y but the difference underflowed to zero
        CausalClass::Zero => Separation::Equal,
    }
}

/// Achronal separation `x ⊥ y`: distinct and `(x−y)² ≤ 0`.
pub fn is_perp(x: &FourVector, y: &FourVector) -> bool {
    matches!(
        separation(x, y),
        Separation::Spacelike | Separation::Lightlike
    )
}
