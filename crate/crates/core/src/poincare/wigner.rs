use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spinor::{SpinorMatrix, C64};
use crate::error::{invalid, Result};
use crate::tolerances::{J_MAX_DEFAULT, UNITARY};

/// A nonnegative half-integer, stored as `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dimension(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// All spins `0, 1/2, …` up to and including `self`.
    pub fn up_to(self) -> impl Iterator<Item = Spin> {
        (0..=self.0).map(Spin)
    }
}

impl TryFrom<f64> for Spin {
    type Error = crate::error::Error;
    fn try_from(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice >= 0.0) || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(invalid(format!("spin must be a nonnegative half-integer, got {j}")));
        }
        Ok(Spin(twice as u32))
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl std::str::FromStr for Spin {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let value = match s.split_once('/') {
            Some((n, "2")) => n.trim().parse::<f64>().map(|n| n / 2.0),
            Some(_) => return Err(invalid(format!("bad spin literal {s:?}"))),
            None => s.parse::<f64>(),
        };
        Spin::try_from(value.map_err(|_| invalid(format!("bad spin literal {s:?}")))?)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `D^{(J)}(B)` in the basis `ξ₁^{2J−a} ξ₂^a / √((2J−a)! a!)`, `a = 0, …, 2J`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDMatrix {
    spin: Spin,
    entries: DMatrix<C64>,
}

impl WignerDMatrix {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.entries.nrows();
        let g = self.entries.adjoint() * &self.entries - DMatrix::identity(n, n);
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Matrix of the symmetric power `Sym^{2J}` of any 2×2 matrix. Unitary when
/// the input is.
pub fn symmetric_power(spin: Spin, m: &nalgebra::Matrix2<C64>) -> DMatrix<C64> {
    let n = spin.twice();
    let (b11, b12, b21, b22) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let dim = n as usize + 1;
    DMatrix::from_fn(dim, dim, |b, a| {
        let (a, b) = (a as u32, b as u32);
        // ξᵢ ↦ Σ_k B_{k i} ξ_k applied to ξ₁^{n−a} ξ₂^a, coefficient of ξ₁^{n−b} ξ₂^b
        let mut sum = C64::new(0.0, 0.0);
        for i in 0..=(n - a).min(b) {
            let k = b - i;
            if k > a {
                continue;
            }
            let c = binomial(n - a, i) * binomial(a, k);
            sum += b11.powu(n - a - i) * b21.powu(i) * b12.powu(a - k) * b22.powu(k) * c;
        }
        let norm = (0.5
            * (ln_factorial(b) + ln_factorial(n - b) - ln_factorial(a) - ln_factorial(n - a)))
        .exp();
        sum * norm
    })
}

/// The spin-`J` irreducible representation matrix of an SU(2) element.
pub fn wigner_d(spin: Spin, b: &SpinorMatrix) -> Result<WignerDMatrix> {
    wigner_d_with_limit(spin, b, Spin::from_twice(2 * J_MAX_DEFAULT))
}

pub fn wigner_d_with_limit(spin: Spin, b: &SpinorMatrix, max: Spin) -> Result<WignerDMatrix> {
    if spin > max {
        return Err(invalid(format!("spin {spin} exceeds the configured maximum {max}")));
    }
    if b.unitarity_defect() > UNITARY {
        return Err(invalid(format!(
            "Wigner D needs an SU(2) element, unitarity defect {:e}",
            b.unitarity_defect()
        )));
    }
    Ok(WignerDMatrix { spin, entries: symmetric_power(spin, b.matrix()) })
}
