use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{numeric, Result};
use crate::minkowski::FourVector;
use crate::poincare::LinePoint;
use crate::surfaces::{AchronalSurface, Region};
use crate::tolerances::{BRACKET_MAX_EXP, CLASSIFY_REL, FIXED_POINT, FIXED_POINT_BASE_ITER};

/// Where a timelike line crosses a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    /// Line parameter, equal to the time coordinate of the crossing.
    pub s: f64,
    pub point: FourVector,
    /// `|s − τ(x + s v)|` at the returned `s`.
    pub residual: f64,
    pub iterations: usize,
}

/// Iteration budget certified by the contraction ratio `|v|`.
pub fn max_iterations(speed: f64) -> usize {
    let extra = if speed > 0.0 { (FIXED_POINT.ln() / speed.ln()).ceil().max(0.0) } else { 0.0 };
    FIXED_POINT_BASE_ITER + extra as usize
}

/// Solves `s = τ(x + s v)`.
///
/// The map is a contraction with ratio at most `L|v|`. Plain iteration is
/// accelerated with Aitken's extrapolation; an extrapolated step is kept
/// only when it lowers the residual, so the contraction bound still holds.
pub fn line_surface_intersection(u: &LinePoint, surface: &AchronalSurface) -> Result<Intersection> {
    line_surface_intersection_from(u, surface, surface.tau(u.x()))
}

pub fn line_surface_intersection_from(u: &LinePoint, surface: &AchronalSurface, start: f64) -> Result<Intersection> {
    let (x, v) = (u.x(), u.v());
    let step = |s: f64| surface.tau(&(x + v * s));
    // a residual r bounds the error by r / (1 − |v|); aim for an error,
    // not just a residual, below the tolerance where precision allows
    let speed = v.norm();
    let tol = |s: f64| {
        let scale = s.abs().max(1.0);
        (FIXED_POINT * scale * (1.0 - speed)).max(4.0 * f64::EPSILON * scale)
    };
    let budget = max_iterations(speed);
    let mut s0 = start;
    let mut iterations = 0;
    while iterations < budget {
        let s1 = step(s0);
        iterations += 1;
        let r0 = (s1 - s0).abs();
        if r0 < tol(s0) {
            return Ok(finish(u, surface, s0, iterations));
        }
        let s2 = step(s1);
        iterations += 1;
        let r1 = (s2 - s1).abs();
        if r1 < tol(s1) {
            return Ok(finish(u, surface, s1, iterations));
        }
        let curvature = s2 - 2.0 * s1 + s0;
        let mut next = s2;
        let mut r_next = r1;
        if curvature != 0.0 {
            let candidate = s0 - (s1 - s0) * (s1 - s0) / curvature;
            if candidate.is_finite() {
                iterations += 1;
                let rc = (step(candidate) - candidate).abs();
                if rc < r1 {
                    next = candidate;
                    r_next = rc;
                }
            }
        }
        // near |v| = 1 the second difference drowns in rounding and the
        // iteration crawls; the bracketed solve takes over from here
        if r_next > 0.5 * r0 && iterations > 16 {
            return bracketed(u, surface, next, speed, budget, iterations, &tol);
        }
        s0 = next;
    }
    Err(stalled(u, budget, s0))
}

/// Illinois regula falsi on the decreasing function `g(s) = τ(x + s v) − s`.
///
/// A 1-Lipschitz `τ` makes `g` strictly decreasing with slope at most
/// `−(1 − |v|)`, so the root lies within `|g(s)| / (1 − |v|)` of any `s`.
fn bracketed(
    u: &LinePoint,
    surface: &AchronalSurface,
    s: f64,
    speed: f64,
    budget: usize,
    mut iterations: usize,
    tol: &dyn Fn(f64) -> f64,
) -> Result<Intersection> {
    let g = |s: f64| surface.tau(&(u.x() + u.v() * s)) - s;
    let gs = g(s);
    iterations += 1;
    // g itself is only known to a few ulps of s, which the bracket must absorb
    let noise = 8.0 * f64::EPSILON * s.abs().max(1.0);
    let reach = (1.01 * gs.abs() + noise) / (1.0 - speed).max(f64::EPSILON) + noise;
    let (mut lo, mut hi) = (s - reach, s + reach);
    let (mut g_lo, mut g_hi) = (g(lo), g(hi));
    iterations += 2;
    if !(g_lo >= 0.0 && g_hi <= 0.0) {
        if gs.abs() <= noise {
            return Ok(finish(u, surface, s, iterations));
        }
        return Err(numeric(format!(
            "no sign change for s − τ(x + s v) on [{lo}, {hi}]; the surface may not be 1-Lipschitz"
        )));
    }
    let mut side = 0i8;
    while iterations < budget {
        let mut mid = if g_lo != g_hi { (lo * g_hi - hi * g_lo) / (g_hi - g_lo) } else { 0.5 * (lo + hi) };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let gm = g(mid);
        iterations += 1;
        if gm.abs() < tol(mid) || mid == lo || mid == hi {
            return Ok(finish(u, surface, mid, iterations));
        }
        if gm > 0.0 {
            lo = mid;
            g_lo = gm;
            if side == 1 {
                g_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            g_hi = gm;
            if side == -1 {
                g_lo *= 0.5;
            }
            side = -1;
        }
    }
    Err(stalled(u, budget, 0.5 * (lo + hi)))
}

fn stalled(u: &LinePoint, budget: usize, s: f64) -> crate::Error {
    numeric(format!(
        "fixed point not reached in {budget} iterations for x = {:?}, |v| = {}, last s = {s}",
        u.x().as_slice(),
        u.v().norm()
    ))
}

fn finish(u: &LinePoint, surface: &AchronalSurface, s: f64, iterations: usize) -> Intersection {
    let residual = (s - surface.tau(&(u.x() + u.v() * s))).abs();
    Intersection { s, point: u.at(s), residual, iterations }
}

/// Indicator of the set of lines meeting `region`.
pub fn line_meets_region(u: &LinePoint, region: &Region) -> Result<bool> {
    match region.base {
        crate::surfaces::SpatialSet::Everything => Ok(true),
        crate::surfaces::SpatialSet::Empty => Ok(false),
        _ => {
            let hit = line_surface_intersection(u, &region.surface)?;
            Ok(region.base.contains(&hit.point.spatial()))
        }
    }
}

/// A lightlike line `a + ℝ(1, ω)`, `|ω| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightlikeLine {
    pub base: FourVector,
    pub direction: Vector3<f64>,
}

impl LightlikeLine {
    pub fn at(&self, s: f64) -> FourVector {
        self.base + s * FourVector::from_parts(1.0, &self.direction)
    }
}

/// Crossing parameter of a lightlike line with a surface, if one is found.
///
/// `f(s) = a₀ + s − τ(a + sω)` is nondecreasing for 1-Lipschitz `τ`, so a
/// sign change over `[−2^k, 2^k]`, `k ≤ 40`, brackets the crossing and
/// bisection pins it down. Values within rounding of zero count as a
/// crossing only near the base point; far out they are indistinguishable
/// from an asymptotic approach such as `s − √(s² + 1) → 0`.
pub fn lightlike_intersection(line: &LightlikeLine, surface: &AchronalSurface) -> Option<f64> {
    let eval = |s: f64| {
        let tau = surface.tau(&(line.base.spatial() + line.direction * s));
        let value = line.base.x0 + s - tau;
        // rounding-level band around zero
        let band = CLASSIFY_REL * (line.base.x0.abs() + s.abs() + tau.abs()).max(1.0);
        (value, band)
    };
    let (f0, band0) = eval(0.0);
    if f0.abs() <= band0 {
        return Some(0.0);
    }
    for k in 0..=BRACKET_MAX_EXP {
        let r = 2f64.powi(k);
        let ((f_lo, band_lo), (f_hi, band_hi)) = (eval(-r), eval(r));
        if k == 0 {
            for (s, f, band) in [(-r, f_lo, band_lo), (r, f_hi, band_hi)] {
                if f.abs() <= band {
                    return Some(s);
                }
            }
        }
        // only a sign change beyond rounding certifies a crossing
        if !(f_lo < -band_lo && f_hi > band_hi) {
            continue;
        }
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let fm = eval(mid).0;
            if fm == 0.0 {
                return Some(mid);
            }
            if fm < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Some(0.5 * (lo + hi));
    }
    None
}
