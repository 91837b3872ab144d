//! Sampled checkers. Sampling can refute a universal statement or
//! corroborate it, so verdicts that are not backed by a witness or a
//! sufficient condition come back inconclusive.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::surface::AchronalSurface;
use crate::error::{invalid, Result};
use crate::linespace::{lightlike_intersection, LightlikeLine};
use crate::minkowski::{separation, FourVector, Separation};
use crate::poincare::random::{gaussian, random_unit_vector};
use crate::tolerances::{ON_SURFACE, STRICT};

/// The steepest sampled pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSample {
    pub max_ratio: f64,
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
}

fn sample_point(surface: &AchronalSurface, rng: &mut ChaCha8Rng) -> (Vector3<f64>, f64) {
    let scale = 10f64.powf(rng.random_range(-1.0..2.0));
    if let Some((lo, hi)) = surface.feature_box() {
        if rng.random::<f64>() < 0.8 {
            let pad = (hi - lo) * 0.1;
            let x = Vector3::from_fn(|a, _| rng.random_range((lo[a] - pad[a])..=(hi[a] + pad[a])));
            return (x, (hi - lo).norm().max(1e-3));
        }
    }
    let x = Vector3::new(gaussian(rng), gaussian(rng), gaussian(rng)) * scale;
    (x, scale)
}

fn fd_gradient(surface: &AchronalSurface, x: &Vector3<f64>) -> Vector3<f64> {
    let h = 1e-6 * x.norm().max(1.0);
    Vector3::from_fn(|a, _| {
        let mut e = Vector3::zeros();
        e[a] = h;
        (surface.tau(&(x + e)) - surface.tau(&(x - e))) / (2.0 * h)
    })
}

/// Pairs are drawn at scales from 0.1 to 100; half of them are aligned with
/// the local slope, which is where a Lipschitz graph is steepest.
pub fn lipschitz_sample(surface: &AchronalSurface, n_pairs: usize, seed: u64) -> LipschitzSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = LipschitzSample { max_ratio: 0.0, x: Vector3::zeros(), y: Vector3::zeros() };
    for _ in 0..n_pairs {
        let (x, scale) = sample_point(surface, &mut rng);
        let mut dir = random_unit_vector(&mut rng);
        if rng.random::<bool>() {
            let g = fd_gradient(surface, &x);
            if g.norm() > 0.0 {
                dir = g.normalize() * if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        let len = scale * 10f64.powf(rng.random_range(-4.0..1.0));
        let y = x + dir * len;
        let d = (x - y).norm();
        if d == 0.0 {
            continue;
        }
        let ratio = (surface.tau(&x) - surface.tau(&y)).abs() / d;
        if ratio > best.max_ratio {
            best = LipschitzSample { max_ratio: ratio, x, y };
        }
    }
    best
}

pub fn lipschitz_estimate(surface: &AchronalSurface, n_pairs: usize, seed: u64) -> f64 {
    lipschitz_sample(surface, n_pairs, seed).max_ratio
}

/// No sampled pair reaches slope `1 − STRICT`.
pub fn is_spacelike_sampled(surface: &AchronalSurface, n_pairs: usize, seed: u64) -> bool {
    lipschitz_estimate(surface, n_pairs, seed) < 1.0 - STRICT
}

/// A lightlike line known in closed form to miss the surface.
pub fn analytic_lightlike_miss(surface: &AchronalSurface) -> Option<LightlikeLine> {
    match surface {
        // s = √(s² + 1) has no solution
        AchronalSurface::SqrtShell => Some(LightlikeLine { base: FourVector::ZERO, direction: Vector3::x() }),
        // −1 + s = |s| has no solution
        AchronalSurface::LightCone => {
            Some(LightlikeLine { base: FourVector::new(-1.0, 0.0, 0.0, 0.0), direction: Vector3::x() })
        }
        // along (1, w) with |w| = 1 the residual is the constant a₀ − offset
        AchronalSurface::Tilted { w, offset } if (w.norm() - 1.0).abs() <= 1e-12 => Some(LightlikeLine {
            base: FourVector::new(offset + 1.0, 0.0, 0.0, 0.0),
            direction: w.normalize(),
        }),
        _ => None,
    }
}

/// A closed-form miss, confirmed by the bracket search failing.
fn verified_miss(surface: &AchronalSurface) -> Option<LightlikeLine> {
    analytic_lightlike_miss(surface).filter(|l| lightlike_intersection(l, surface).is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalBaseVerdict {
    CausalBase,
    NotCausalBase,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CausalWitness {
    /// A lightlike line that never meets the surface.
    MissedLine { line: LightlikeLine },
    /// Two surface points the sampler found not spacelike separated.
    CausalPair { x: FourVector, y: FourVector, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalBaseReport {
    pub verdict: CausalBaseVerdict,
    pub spacelike: bool,
    pub max_pair_ratio: f64,
    /// Largest `|τ(x)|/|x|` seen on the outer half of the radius schedule.
    pub growth_ratio: f64,
    pub witness: Option<CausalWitness>,
}

pub const DEFAULT_RADII: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

/// Decides whether the surface is a causal base.
///
/// A verified missed lightlike line or a sampled causal pair refutes it;
/// a spacelike sample together with `limsup |τ(x)|/|x| < 1` along rays
/// establishes it through the growth criterion.
pub fn causal_base_check(surface: &AchronalSurface, n_dirs: usize, radii: &[f64], seed: u64) -> CausalBaseReport {
    let pairs = lipschitz_sample(surface, 20 * n_dirs.max(100), seed);
    let spacelike = pairs.max_ratio < 1.0 - STRICT;
    let growth_ratio = growth_ratio(surface, n_dirs, radii, seed ^ 0x9e37_79b9);
    let mut report = CausalBaseReport {
        verdict: CausalBaseVerdict::Inconclusive,
        spacelike,
        max_pair_ratio: pairs.max_ratio,
        growth_ratio,
        witness: None,
    };
    if let Some(line) = verified_miss(surface) {
        report.verdict = CausalBaseVerdict::NotCausalBase;
        report.witness = Some(CausalWitness::MissedLine { line });
    } else if !spacelike {
        report.verdict = CausalBaseVerdict::NotCausalBase;
        report.witness = Some(CausalWitness::CausalPair {
            x: FourVector::from_parts(surface.tau(&pairs.x), &pairs.x),
            y: FourVector::from_parts(surface.tau(&pairs.y), &pairs.y),
            ratio: pairs.max_ratio,
        });
    } else if growth_ratio < 1.0 - STRICT {
        report.verdict = CausalBaseVerdict::CausalBase;
    }
    report
}

fn growth_ratio(surface: &AchronalSurface, n_dirs: usize, radii: &[f64], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<Vector3<f64>> = (0..3)
        .flat_map(|a| {
            let mut e = Vector3::zeros();
            e[a] = 1.0;
            [e, -e]
        })
        .collect();
    dirs.extend((0..n_dirs).map(|_| random_unit_vector(&mut rng)));
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let outer = &sorted[sorted.len() / 2..];
    dirs.iter()
        .flat_map(|d| outer.iter().map(move |r| surface.tau(&(d * *r)).abs() / r))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CauchyVerdict {
    Cauchy,
    NotCauchy,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub verdict: CauchyVerdict,
    pub tested: usize,
    pub met: usize,
    /// Certified miss for `not-cauchy`, first unmet sampled line otherwise.
    pub witness: Option<LightlikeLine>,
}

/// Samples lightlike lines `a + ℝ(1, ω)` and looks for the crossing. A
/// maximal achronal set met by every lightlike line is a Cauchy surface.
pub fn cauchy_surface_check(surface: &AchronalSurface, n_lines: usize, seed: u64) -> CauchyReport {
    if let Some(line) = verified_miss(surface) {
        return CauchyReport { verdict: CauchyVerdict::NotCauchy, tested: 0, met: 0, witness: Some(line) };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut met = 0;
    let mut witness = None;
    for _ in 0..n_lines {
        let base = FourVector::new(
            5.0 * gaussian(&mut rng),
            5.0 * gaussian(&mut rng),
            5.0 * gaussian(&mut rng),
            5.0 * gaussian(&mut rng),
        );
        let line = LightlikeLine { base, direction: random_unit_vector(&mut rng) };
        if lightlike_intersection(&line, surface).is_some() {
            met += 1;
        } else if witness.is_none() {
            witness = Some(line);
        }
    }
    let verdict = if met == n_lines { CauchyVerdict::Cauchy } else { CauchyVerdict::Inconclusive };
    CauchyReport { verdict, tested: n_lines, met, witness }
}

fn on_surface(surface: &AchronalSurface, p: &FourVector) -> bool {
    (p.x0 - surface.tau(&p.spatial())).abs() <= ON_SURFACE * p.x0.abs().max(1.0)
}

/// Whether the segment between two lightlike separated surface points lies
/// in the surface, checked at `n_steps − 1` interior points.
pub fn lightlike_segment_check(surface: &AchronalSurface, x: &FourVector, y: &FourVector, n_steps: usize) -> Result<bool> {
    if !on_surface(surface, x) || !on_surface(surface, y) {
        return Err(invalid("segment endpoints must lie on the surface"));
    }
    if separation(x, y) != Separation::Lightlike {
        return Err(invalid("segment endpoints must be lightlike separated"));
    }
    let n = n_steps.max(2);
    Ok((1..n).all(|i| on_surface(surface, &(*x + (i as f64 / n as f64) * (*y - *x)))))
}
