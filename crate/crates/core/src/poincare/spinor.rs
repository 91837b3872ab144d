use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::minkowski::FourVector;
use crate::tolerances::{RENORMALIZE_EVERY, UNIMODULAR, UNITARY};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// An element of SL(2,ℂ).
///
/// Four-vectors are identified with Hermitian matrices
/// `X = x₀·1 + x₁σ₁ + x₂σ₂ + x₃σ₃` and `A` acts by `X ↦ A X A†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 8]", into = "[f64; 8]")]
pub struct SpinorMatrix(Matrix2<C64>);

impl SpinorMatrix {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let det = m.determinant();
        if !(det - ONE).norm().is_finite() || (det - ONE).norm() > UNIMODULAR {
            return Err(invalid(format!("matrix is not unimodular: det = {det}")));
        }
        Ok(Self(m))
    }

    pub fn from_entries(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::new(Matrix2::new(a, b, c, d))
    }

    /// Rescale an invertible matrix by `det^{-1/2}`.
    pub fn normalize(m: Matrix2<C64>) -> Result<Self> {
        let det = m.determinant();
        if det.norm() == 0.0 || !det.norm().is_finite() {
            return Err(invalid("matrix is singular"));
        }
        Ok(Self(m / det.sqrt()))
    }

    pub(crate) fn new_unchecked(m: Matrix2<C64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// `exp(ρ/2 n·σ)`: a pure boost of rapidity `ρ` along the unit axis `n`.
    pub fn boost(axis: &Vector3<f64>, rapidity: f64) -> Self {
        let n = axis.normalize();
        let (c, s) = ((rapidity / 2.0).cosh(), (rapidity / 2.0).sinh());
        Self(Matrix2::identity() * C64::from(c) + pauli_dot(&n) * C64::from(s))
    }

    /// `exp(−iθ/2 n·σ)`: rotation by `θ` about the unit axis `n`.
    pub fn rotation(axis: &Vector3<f64>, angle: f64) -> Self {
        let n = axis.normalize();
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        Self(Matrix2::identity() * C64::from(c) - pauli_dot(&n) * (I * s))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    pub fn inverse(&self) -> Self {
        let m = &self.0;
        // adjugate; exact inverse when det = 1
        Self(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }

    pub fn renormalized(&self) -> Self {
        Self(self.0 / self.0.determinant().sqrt())
    }

    /// The SU(2) element `[[a, b], [−b̄, ā]]` nearest to the matrix. For a
    /// matrix of determinant one this is the unitary factor of its polar
    /// decomposition, `(M + M^{−†})` rescaled.
    pub fn nearest_su2(&self) -> Self {
        let m = &self.0;
        let a = (m[(0, 0)] + m[(1, 1)].conj()) * 0.5;
        let b = (m[(0, 1)] - m[(1, 0)].conj()) * 0.5;
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        Self(Matrix2::new(a, b, -b.conj(), a.conj()))
    }

    /// Max entry deviation of `A†A` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.0.adjoint() * self.0 - Matrix2::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY
    }

    /// `A·x` for a four-vector, via `A X A†`.
    pub fn act(&self, x: &FourVector) -> FourVector {
        let y = self.lorentz() * Vector4::from(x.to_array());
        FourVector::new(y[0], y[1], y[2], y[3])
    }

    /// Spatial part of `A·(0, x)`; the SO(3) action when `A ∈ SU(2)`.
    pub fn act_spatial(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.act(&FourVector::from_parts(0.0, x)).spatial()
    }

    /// The covering homomorphism `Λ(A)` as a 4×4 real matrix,
    /// `Λ_{μν} = ½ tr(σ_μ A σ_ν A†)` with `σ₀ = 1`.
    pub fn lorentz(&self) -> Matrix4<f64> {
        let images: [Matrix2<C64>; 4] =
            std::array::from_fn(|nu| self.0 * pauli(nu) * self.0.adjoint());
        Matrix4::from_fn(|mu, nu| 0.5 * (pauli(mu) * images[nu]).trace().re)
    }

    /// Ordered product, renormalized after every `RENORMALIZE_EVERY` factors.
    pub fn product<I: IntoIterator<Item = SpinorMatrix>>(factors: I) -> Self {
        let mut acc = Self::identity();
        for (n, f) in factors.into_iter().enumerate() {
            acc = Self(acc.0 * f.0);
            if (n + 1) % RENORMALIZE_EVERY == 0 {
                acc = acc.renormalized();
            }
        }
        acc
    }
}

impl Mul for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a SpinorMatrix> for &'a SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: &SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix(self.0 * rhs.0)
    }
}

// JSON layout: [re a, im a, re b, im b, re c, im c, re d, im d] for [[a, b], [c, d]].
impl TryFrom<[f64; 8]> for SpinorMatrix {
    type Error = crate::error::Error;
    fn try_from(a: [f64; 8]) -> Result<Self> {
        Self::from_entries(
            C64::new(a[0], a[1]),
            C64::new(a[2], a[3]),
            C64::new(a[4], a[5]),
            C64::new(a[6], a[7]),
        )
    }
}

impl From<SpinorMatrix> for [f64; 8] {
    fn from(s: SpinorMatrix) -> Self {
        let m = s.0;
        [
            m[(0, 0)].re,
            m[(0, 0)].im,
            m[(0, 1)].re,
            m[(0, 1)].im,
            m[(1, 0)].re,
            m[(1, 0)].im,
            m[(1, 1)].re,
            m[(1, 1)].im,
        ]
    }
}

pub fn pauli(k: usize) -> Matrix2<C64> {
    match k {
        0 => Matrix2::identity(),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range"),
    }
}

fn pauli_dot(n: &Vector3<f64>) -> Matrix2<C64> {
    pauli(1) * C64::from(n.x) + pauli(2) * C64::from(n.y) + pauli(3) * C64::from(n.z)
}

/// `X = x₀·1 + Σ xᵢσᵢ`.
pub fn hermitian(x: &FourVector) -> Matrix2<C64> {
    Matrix2::new(
        C64::new(x.x0 + x.x3, 0.0),
        C64::new(x.x1, -x.x2),
        C64::new(x.x1, x.x2),
        C64::new(x.x0 - x.x3, 0.0),
    )
}

/// Inverse of [`hermitian`]; anti-Hermitian parts are discarded.
pub fn from_hermitian(y: &Matrix2<C64>) -> FourVector {
    FourVector::new(
        0.5 * (y[(0, 0)].re + y[(1, 1)].re),
        0.5 * (y[(1, 0)].re + y[(0, 1)].re),
        0.5 * (y[(1, 0)].im - y[(0, 1)].im),
        0.5 * (y[(0, 0)].re - y[(1, 1)].re),
    )
}

/// `Λ(A)` for a raw matrix, rejecting non-unimodular input.
pub fn covering_map(a: &Matrix2<C64>) -> Result<Matrix4<f64>> {
    Ok(SpinorMatrix::new(*a)?.lorentz())
}
