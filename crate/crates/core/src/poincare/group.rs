use std::ops::Mul;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::spinor::SpinorMatrix;
use crate::error::{invalid, Result};
use crate::minkowski::FourVector;

/// A point `u = (x, v)` of the timelike-line space `ℝ³ × O₁`, standing for
/// the line `{(s, x + s v) : s ∈ ℝ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinePointRepr", into = "LinePointRepr")]
pub struct LinePoint {
    x: Vector3<f64>,
    v: Vector3<f64>,
}

pub type TimelikeLine = LinePoint;

#[derive(Serialize, Deserialize)]
struct LinePointRepr {
    x: [f64; 3],
    v: [f64; 3],
}

impl TryFrom<LinePointRepr> for LinePoint {
    type Error = crate::error::Error;
    fn try_from(r: LinePointRepr) -> Result<Self> {
        LinePoint::new(Vector3::from(r.x), Vector3::from(r.v))
    }
}

impl From<LinePoint> for LinePointRepr {
    fn from(u: LinePoint) -> Self {
        LinePointRepr { x: u.x.into(), v: u.v.into() }
    }
}

impl LinePoint {
    pub fn new(x: Vector3<f64>, v: Vector3<f64>) -> Result<Self> {
        if !(x.iter().all(|c| c.is_finite()) && v.norm() < 1.0) {
            return Err(invalid(format!("line point needs finite x and |v| < 1, got |v| = {}", v.norm())));
        }
        Ok(Self { x, v })
    }

    pub(crate) fn new_unchecked(x: Vector3<f64>, v: Vector3<f64>) -> Self {
        Self { x, v }
    }

    pub fn x(&self) -> &Vector3<f64> {
        &self.x
    }

    pub fn v(&self) -> &Vector3<f64> {
        &self.v
    }

    /// The direction `(1, v)`.
    pub fn velocity4(&self) -> FourVector {
        FourVector::from_parts(1.0, &self.v)
    }

    /// The point `(s, x + s v)`.
    pub fn at(&self, s: f64) -> FourVector {
        FourVector::from_parts(s, &(self.x + self.v * s))
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x.x, self.x.y, self.x.z, self.v.x, self.v.y, self.v.z]
    }
}

/// An element `(a, A)` of ISL(2,ℂ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareElement {
    pub translation: FourVector,
    pub spinor: SpinorMatrix,
}

impl PoincareElement {
    pub fn new(translation: FourVector, spinor: SpinorMatrix) -> Self {
        Self { translation, spinor }
    }

    pub fn identity() -> Self {
        Self::new(FourVector::ZERO, SpinorMatrix::identity())
    }

    pub fn translation(a: FourVector) -> Self {
        Self::new(a, SpinorMatrix::identity())
    }

    pub fn homogeneous(spinor: SpinorMatrix) -> Self {
        Self::new(FourVector::ZERO, spinor)
    }

    /// `(a, A)(a′, A′) = (a + A·a′, AA′)`.
    pub fn compose(&self, other: &PoincareElement) -> PoincareElement {
        PoincareElement::new(
            self.translation + self.spinor.act(&other.translation),
            self.spinor * other.spinor,
        )
    }

    /// `(−A⁻¹·a, A⁻¹)`.
    pub fn inverse(&self) -> PoincareElement {
        let inv = self.spinor.inverse();
        PoincareElement::new(-inv.act(&self.translation), inv)
    }

    pub fn act_on_point(&self, x: &FourVector) -> FourVector {
        self.translation + self.spinor.act(x)
    }

    /// Image of the line under `g`, re-read in the `x₀ = 0` chart.
    pub fn act_on_line(&self, u: &LinePoint) -> LinePoint {
        let w = self.spinor.act(&u.velocity4());
        let v = w.spatial() / w.x0;
        let y = self.act_on_point(&FourVector::from_parts(0.0, &u.x));
        LinePoint::new_unchecked(y.spatial() - v * y.x0, v)
    }

    /// Radon–Nikodym derivative `((A⁻¹·(1, v))₀)⁻⁵` of the line measure
    /// transported by `g`, equal to the Jacobian of `u ↦ g⁻¹·u`.
    pub fn line_action_rn_derivative(&self, u: &LinePoint) -> f64 {
        self.spinor.inverse().act(&u.velocity4()).x0.powi(-5)
    }
}

impl Mul for PoincareElement {
    type Output = PoincareElement;
    fn mul(self, rhs: PoincareElement) -> PoincareElement {
        self.compose(&rhs)
    }
}

pub fn act_on_point(g: &PoincareElement, x: &FourVector) -> FourVector {
    g.act_on_point(x)
}

pub fn act_on_line(g: &PoincareElement, u: &LinePoint) -> LinePoint {
    g.act_on_line(u)
}

pub fn line_action_rn_derivative(g: &PoincareElement, u: &LinePoint) -> f64 {
    g.line_action_rn_derivative(u)
}
