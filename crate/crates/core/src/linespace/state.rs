use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poincare::random::gaussian;
use crate::poincare::LinePoint;
use crate::tolerances::V_MAX;

/// Velocity factor of a state density, supported on `|v| < V_MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VelocityLaw {
    Uniform,
    /// Isotropic Gaussian of width `sigma`, truncated to the ball.
    Gaussian { sigma: f64 },
}

/// A normalized density `ρ(x, v)` on line space, `ρ = ‖ψ(x, v)‖²`:
/// an isotropic Gaussian in the intercept times a radial velocity law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateSpec", into = "StateSpec")]
pub struct StateDensity {
    center: Vector3<f64>,
    width: f64,
    velocity: VelocityLaw,
    components: usize,
    velocity_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct StateSpec {
    center: [f64; 3],
    width: f64,
    velocity: VelocityLaw,
    #[serde(default = "one")]
    components: usize,
}

fn one() -> usize {
    1
}

impl TryFrom<StateSpec> for StateDensity {
    type Error = Error;
    fn try_from(s: StateSpec) -> Result<Self> {
        let mut d = StateDensity::new(Vector3::from(s.center), s.width, s.velocity)?;
        d.components = s.components.max(1);
        Ok(d)
    }
}

impl From<StateDensity> for StateSpec {
    fn from(d: StateDensity) -> Self {
        StateSpec { center: d.center.into(), width: d.width, velocity: d.velocity, components: d.components }
    }
}

/// `∫_{|v|<a} exp(−|v|²/2s²) dv`.
fn truncated_gaussian_mass(s: f64, a: f64) -> f64 {
    let radial = s.powi(3)
        * ((PI / 2.0).sqrt() * libm::erf(a / (2f64.sqrt() * s)) - (a / s) * (-a * a / (2.0 * s * s)).exp());
    4.0 * PI * radial
}

impl StateDensity {
    pub fn new(center: Vector3<f64>, width: f64, velocity: VelocityLaw) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(invalid("state needs a finite centre and positive width"));
        }
        let velocity_norm = match velocity {
            VelocityLaw::Uniform => 4.0 / 3.0 * PI * V_MAX.powi(3),
            VelocityLaw::Gaussian { sigma } if sigma > 0.0 && sigma.is_finite() => truncated_gaussian_mass(sigma, V_MAX),
            VelocityLaw::Gaussian { sigma } => return Err(invalid(format!("velocity width must be positive, got {sigma}"))),
        };
        Ok(Self { center, width, velocity, components: 1, velocity_norm })
    }

    /// Standard test state: unit Gaussian at the origin, uniform velocities.
    pub fn standard() -> Self {
        Self::new(Vector3::zeros(), 1.0, VelocityLaw::Uniform).expect("valid parameters")
    }

    pub fn with_components(mut self, components: usize) -> Self {
        self.components = components.max(1);
        self
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn center(&self) -> &Vector3<f64> {
        &self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn velocity_law(&self) -> VelocityLaw {
        self.velocity
    }

    /// Mass the untruncated velocity law would put on `V_MAX ≤ |v| < 1`.
    pub fn excluded_shell_mass(&self) -> f64 {
        match self.velocity {
            VelocityLaw::Uniform => 1.0 - V_MAX.powi(3),
            VelocityLaw::Gaussian { sigma } => {
                let full = truncated_gaussian_mass(sigma, 1.0);
                (full - self.velocity_norm) / full
            }
        }
    }

    pub fn density(&self, u: &LinePoint) -> f64 {
        let v2 = u.v().norm_squared();
        if v2 >= V_MAX * V_MAX {
            return 0.0;
        }
        let s2 = self.width * self.width;
        let spatial = (-(u.x() - self.center).norm_squared() / (2.0 * s2)).exp() / (2.0 * PI * s2).powf(1.5);
        let velocity = match self.velocity {
            VelocityLaw::Uniform => 1.0,
            VelocityLaw::Gaussian { sigma } => (-v2 / (2.0 * sigma * sigma)).exp(),
        };
        spatial * velocity / self.velocity_norm
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinePoint {
        let x = self.center + Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * self.width;
        let v = loop {
            let v = match self.velocity {
                VelocityLaw::Uniform => Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
                VelocityLaw::Gaussian { sigma } => Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * sigma,
            };
            if v.norm() < V_MAX {
                break v;
            }
        };
        LinePoint::new(x, v).expect("sampled velocity is subluminal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linespace::quadrature::ball_rule;

    #[test]
    fn velocity_factor_is_normalized() {
        for law in [VelocityLaw::Uniform, VelocityLaw::Gaussian { sigma: 0.3 }, VelocityLaw::Gaussian { sigma: 2.0 }] {
            let psi = StateDensity::new(Vector3::zeros(), 1.0, law).unwrap();
            // integrate over v with the x factor evaluated at the centre
            let peak = (2.0 * PI).powf(-1.5);
            let total: f64 = ball_rule(&Vector3::zeros(), V_MAX, 40)
                .iter()
                .map(|(v, w)| w * psi.density(&LinePoint::new(Vector3::zeros(), *v).unwrap()) / peak)
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "{law:?}: {total}");
        }
    }

    #[test]
    fn shell_mass() {
        let psi = StateDensity::standard();
        assert!((psi.excluded_shell_mass() - 3e-6).abs() < 1e-10);
    }

    #[test]
    fn sampler_matches_density_moments() {
        use rand::SeedableRng;
        let psi = StateDensity::new(Vector3::new(1.0, 0.0, 0.0), 0.5, VelocityLaw::Gaussian { sigma: 0.4 }).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let (mut mx, mut mv2) = (0.0, 0.0);
        for _ in 0..n {
            let u = psi.sample(&mut rng);
            mx += u.x().x;
            mv2 += u.v().norm_squared();
        }
        let quad: f64 = ball_rule(&Vector3::zeros(), V_MAX, 40)
            .iter()
            .map(|(v, w)| w * v.norm_squared() * (-v.norm_squared() / 0.32).exp())
            .sum::<f64>()
            / truncated_gaussian_mass(0.4, V_MAX);
        assert!((mx / n as f64 - 1.0).abs() < 0.01);
        assert!((mv2 / n as f64 - quad).abs() < 0.005);
    }
}
