use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{SVector, Vector2, Vector3};

use super::region::Region;
use super::set::SpatialSet;
use super::surface::AchronalSurface;
use crate::error::{invalid, numeric, Result};
use crate::tolerances::ROI;

/// Cells the branch-and-bound search may open before giving up.
const CELL_BUDGET: usize = 200_000;

/// Steps of the projected ascent.
const ASCENT_STEPS: usize = 4000;

/// Membership of the point of `sigma` over `y` in the region of influence of
/// `delta`: is some point of `delta` causally related to it?
///
/// With `T = τ_Σ(y)` the question is whether
/// `sup_{x ∈ base} |T − τ_Δ(x)| − |y − x| ≥ −ε`; the margin `ε = ROI` is
/// granted towards membership. The supremum splits into a future branch
/// `(T − τ) − |y − x|` and a past branch `(τ − T) − |y − x|`. A branch is
/// concave where `τ` is affine, and on the future branch where `τ` is
/// convex; over a convex base its local maximum found by projected ascent
/// is then global. Piecewise affine surfaces are split into their pieces.
/// Everything else goes to a branch-and-bound search.
pub fn region_of_influence(delta: &Region, sigma: &AchronalSurface, y: &Vector3<f64>) -> Result<bool> {
    if delta.base.contains(y) {
        return Ok(true);
    }
    let t = sigma.tau(y);
    if let AchronalSurface::Flat { t0 } = delta.surface {
        if let Some(d) = delta.base.distance(y) {
            return Ok(d <= (t - t0).abs() + ROI);
        }
    }
    if let (AchronalSurface::SqrtShell, SpatialSet::Ball { center, radius }) = (&delta.surface, &delta.base) {
        if let Some(inside) = shell_ball(t, y, center, *radius) {
            return Ok(inside);
        }
    }
    if delta.base.is_convex() {
        if let Some(pieces) = delta.surface.affine_pieces() {
            let base_gap = gap_lower_bound(&delta.base, y);
            for (piece, w, offset) in pieces {
                // on the piece the objective is at most ±(T − τ(y)) − (1 − |w|)|y − x|
                let gap = base_gap.max(gap_lower_bound(&piece, y));
                let lean = t - (w.dot(y) + offset);
                let slack = (1.0 - w.norm()).max(0.0) * gap;
                let part = Region::new(
                    AchronalSurface::Tilted { w, offset },
                    SpatialSet::Intersection(vec![delta.base.clone(), piece]),
                );
                for branch in [Branch::Future, Branch::Past] {
                    if branch.sign() * lean - slack < -ROI {
                        continue;
                    }
                    if (Problem { delta: &part, t, y: *y, branch, concave: true }).ascend(y).1 >= -ROI {
                        return Ok(true);
                    }
                }
            }
            return Ok(false);
        }
    }
    let mut open = Vec::new();
    for branch in [Branch::Future, Branch::Past] {
        let mut problem = Problem { delta, t, y: *y, branch, concave: false };
        problem.concave = problem.is_concave();
        if delta.base.is_convex() && problem.concave {
            // from the nearest base point to y, where the distance term is largest
            if problem.ascend(y).1 >= -ROI {
                return Ok(true);
            }
        } else {
            open.push(branch);
        }
    }
    if open.is_empty() {
        return Ok(false);
    }
    branch_and_bound(delta, t, y, &open)
}

/// Iterations of the certified ascent on a ball.
const BALL_ASCENT_STEPS: usize = 2000;

/// Decides `max f ≥ threshold` over the ball `|x − center| ≤ radius` for a
/// concave `f` whose gradient is `smoothness`-Lipschitz. Projected gradient
/// ascent finds witnesses; the tangent plane at the iterate bounds `f` over
/// the ball from above. `None` when neither settles in time.
fn concave_on_ball<const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> (f64, SVector<f64, N>),
    center: &SVector<f64, N>,
    radius: f64,
    start: SVector<f64, N>,
    smoothness: f64,
    threshold: f64,
) -> Option<bool> {
    let project = |x: SVector<f64, N>| {
        let d = x - center;
        if d.norm() <= radius { x } else { center + d * (radius / d.norm()) }
    };
    let mut x = project(start);
    for _ in 0..BALL_ASCENT_STEPS {
        let (fx, g) = f(&x);
        if fx >= threshold {
            return Some(true);
        }
        let gn = g.norm();
        if fx + g.dot(&(center - x)) + radius * gn < threshold {
            return Some(false);
        }
        if gn == 0.0 {
            return None;
        }
        let step = (1.0 / smoothness).min(4.0 * radius / gn);
        let next = project(x + g * step);
        if next == x {
            return None;
        }
        x = next;
    }
    None
}

/// Exact decision for a ball on the hyperboloid `τ = √(1 + |x|²)`.
///
/// With `p = (τ(x), x)` on the unit hyperboloid and `q = (T, y)`, some point
/// of the ball is causally related to `q` iff `max ½(p − q)² ≥ 0`, and
/// `½(p − q)² = ½(1 + T² − |y|²) − Tτ(x) + x·y`. For `T ≥ 0` that is concave
/// in `x`. For `T < 0` it is convex, so its maximum sits on the sphere
/// `x = c + r u`, where it depends on `u` only through `c·u` and `y·u` and is
/// concave in them; the pairs reached fill an ellipse, the image of the unit
/// disk in the plane of `c` and `y`.
fn shell_ball(t: f64, y: &Vector3<f64>, center: &Vector3<f64>, radius: f64) -> Option<bool> {
    let base = 0.5 * (1.0 + t * t - y.norm_squared());
    if t >= 0.0 {
        let f = |x: &Vector3<f64>| {
            let tau = (1.0 + x.norm_squared()).sqrt();
            (base - t * tau + x.dot(y), y - x * (t / tau))
        };
        return concave_on_ball(f, center, radius, *y, t.max(f64::MIN_POSITIVE), -ROI);
    }
    let e1 = if center.norm() > 0.0 { center.normalize() } else { y.try_normalize(0.0).unwrap_or_else(Vector3::x) };
    let any_normal = || e1.cross(&if e1.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() }).normalize();
    let e2 = (y - e1 * e1.dot(y)).try_normalize(1e-12 * (1.0 + y.norm())).unwrap_or_else(any_normal);
    let a = 1.0 + center.norm_squared() + radius * radius;
    let b = Vector2::new(center.dot(&e1), center.dot(&e2)) * (2.0 * radius);
    let lin = Vector2::new(y.dot(&e1), y.dot(&e2)) * radius;
    let shift = base + center.dot(y);
    let s = -t;
    let f = |w: &Vector2<f64>| {
        let tau = (a + b.dot(w)).max(1.0).sqrt();
        (shift + s * tau + lin.dot(w), b * (s / (2.0 * tau)) + lin)
    };
    // a + b·w ≥ 1 + (|c| − r)² ≥ 1 on the disk
    let smoothness = (s * b.norm_squared() / 4.0).max(f64::MIN_POSITIVE);
    concave_on_ball(f, &Vector2::zeros(), 1.0, lin.try_normalize(0.0).unwrap_or_default(), smoothness, -ROI)
}

/// A lower bound on the distance from `y` to the set.
fn gap_lower_bound(set: &SpatialSet, y: &Vector3<f64>) -> f64 {
    match set {
        SpatialSet::Intersection(v) => v.iter().map(|s| gap_lower_bound(s, y)).fold(0.0, f64::max),
        _ => set.distance(y).unwrap_or(0.0),
    }
}

/// A ball around a bounded set.
fn enclosing_ball(set: &SpatialSet) -> Option<(Vector3<f64>, f64)> {
    match set {
        SpatialSet::Ball { center, radius } => Some((*center, *radius)),
        SpatialSet::Intersection(v) => v.iter().filter_map(enclosing_ball).min_by(|a, b| a.1.total_cmp(&b.1)),
        _ => set.bounding_box().map(|(lo, hi)| ((lo + hi) * 0.5, (hi - lo).norm() * 0.5)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// Points of `Δ` below the Σ-point.
    Future,
    Past,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Future => 1.0,
            Branch::Past => -1.0,
        }
    }
}

struct Problem<'a> {
    delta: &'a Region,
    t: f64,
    y: Vector3<f64>,
    branch: Branch,
    /// Licenses the tangent-plane cutoff in the ascent.
    concave: bool,
}

impl Problem<'_> {
    fn value(&self, x: &Vector3<f64>) -> f64 {
        self.branch.sign() * (self.t - self.delta.surface.tau(x)) - (self.y - x).norm()
    }

    fn is_concave(&self) -> bool {
        let surface = &self.delta.surface;
        let convex = matches!(surface, AchronalSurface::LightCone | AchronalSurface::SqrtShell);
        convex && self.branch == Branch::Future
    }

    fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let surface = &self.delta.surface;
        let grad_tau = match surface {
            AchronalSurface::LightCone if x.norm() > 0.0 => x / x.norm(),
            _ => surface.gradient(x).unwrap_or_else(|| {
                let h = 1e-7 * (1.0 + x.norm());
                Vector3::from_fn(|a, _| {
                    let mut e = Vector3::zeros();
                    e[a] = h;
                    (surface.tau(&(x + e)) - surface.tau(&(x - e))) / (2.0 * h)
                })
            }),
        };
        let d = self.y - x;
        let pull = if d.norm() > 0.0 { d / d.norm() } else { Vector3::zeros() };
        pull - grad_tau * self.branch.sign()
    }

    /// Projected gradient ascent with step doubling and halving, from the
    /// projection of `from`. An empty base gives `−∞`.
    fn ascend(&self, from: &Vector3<f64>) -> (Vector3<f64>, f64) {
        let base = &self.delta.base;
        let Some(mut x) = base.project(from) else {
            return (*from, f64::NEG_INFINITY);
        };
        let mut fx = self.value(&x);
        let mut step = 1.0;
        let ball = enclosing_ball(base);
        for _ in 0..ASCENT_STEPS {
            if fx >= -ROI {
                break;
            }
            let g = self.gradient(&x);
            // a concave objective stays below its tangent plane, whose
            // maximum over a ball around the base is explicit
            if let Some((c, r)) = ball {
                if self.concave && fx + g.dot(&(c - x)) + r * g.norm() < -ROI {
                    break;
                }
            }
            let floor = 1e-16 * (1.0 + x.norm());
            let mut moved = false;
            while step * g.norm() > floor {
                if let Some(next) = base.project(&(x + g * step)) {
                    let f_next = self.value(&next);
                    if f_next > fx {
                        (x, fx) = (next, f_next);
                        step *= 2.0;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (x, fx)
    }
}

struct Cell {
    bound: f64,
    lo: Vector3<f64>,
    hi: Vector3<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.bound.total_cmp(&other.bound) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

/// Best-first search over boxes for the branches in `open`. Each branch
/// objective is `(L + 1)`-Lipschitz, which bounds it on a cell from its
/// centre value. On convex bases a local ascent from the best cell raises
/// the lower bound every time the number of opened cells doubles.
fn branch_and_bound(delta: &Region, t: f64, y: &Vector3<f64>, open: &[Branch]) -> Result<bool> {
    let surface = &delta.surface;
    let lip = surface.lipschitz_bound();
    let problems: Vec<Problem> =
        open.iter().map(|&branch| Problem { delta, t, y: *y, branch, concave: false }).collect();
    let objective = |x: &Vector3<f64>| problems.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max);
    let mut search = delta.base.bounding_box();
    if lip < 1.0 {
        // F(x) ≤ |T − τ(y)| − (1 − L)|y − x|, so far points cannot qualify
        let r = ((t - surface.tau(y)).abs() + ROI) / (1.0 - lip);
        let ball = (y - Vector3::repeat(r), y + Vector3::repeat(r));
        search = Some(match search {
            Some((lo, hi)) => (lo.sup(&ball.0), hi.inf(&ball.1)),
            None => ball,
        });
    }
    let (lo, hi) = search.ok_or_else(|| {
        invalid("region of influence needs a bounded base, a flat region or a strictly spacelike surface")
    })?;
    if (0..3).any(|a| lo[a] > hi[a]) {
        return Ok(false);
    }
    let bound = |lo: &Vector3<f64>, hi: &Vector3<f64>| {
        let c = (lo + hi) * 0.5;
        objective(&c) + (lip + 1.0) * (hi - lo).norm() * 0.5
    };
    let ascent_helps = delta.base.is_convex();
    let mut next_ascent = 1000;
    let mut heap = BinaryHeap::new();
    heap.push(Cell { bound: bound(&lo, &hi), lo, hi });
    let mut opened = 0;
    while let Some(cell) = heap.pop() {
        if cell.bound < -ROI {
            return Ok(false);
        }
        opened += 1;
        if ascent_helps && (opened == next_ascent || opened > CELL_BUDGET) {
            next_ascent *= 2;
            let c = (cell.lo + cell.hi) * 0.5;
            for p in &problems {
                if p.ascend(&c).1 >= -ROI {
                    return Ok(true);
                }
            }
        }
        if opened > CELL_BUDGET {
            return Err(numeric(format!(
                "region-of-influence search undecided after {CELL_BUDGET} cells (best bound {:e})",
                cell.bound
            )));
        }
        if !delta.base.may_intersect_box(&cell.lo, &cell.hi) {
            continue;
        }
        for p in [(cell.lo + cell.hi) * 0.5, y.sup(&cell.lo).inf(&cell.hi)] {
            if delta.base.contains(&p) && objective(&p) >= -ROI {
                return Ok(true);
            }
        }
        let size = cell.hi - cell.lo;
        if size.norm() < 1e-12 {
            continue;
        }
        let axis = size.imax();
        let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        let (mut left_hi, mut right_lo) = (cell.hi, cell.lo);
        left_hi[axis] = mid;
        right_lo[axis] = mid;
        for (l, h) in [(cell.lo, left_hi), (right_lo, cell.hi)] {
            let b = bound(&l, &h);
            if b >= -ROI {
                heap.push(Cell { bound: b, lo: l, hi: h });
            }
        }
    }
    Ok(false)
}

/// Indicator of the influence region as a set over Σ's base space.
pub fn influence_indicator<'a>(
    delta: &'a Region,
    sigma: &'a AchronalSurface,
) -> impl Fn(&Vector3<f64>) -> Result<bool> + 'a {
    move |y| region_of_influence(delta, sigma, y)
}

/// True when every point of `inner` lies in `outer`, judged on samples.
pub fn sampled_subset(inner: &SpatialSet, outer: &SpatialSet, points: &[Vector3<f64>]) -> bool {
    points.iter().all(|p| !inner.contains(p) || outer.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::random::random_in_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat(t: f64) -> AchronalSurface {
        AchronalSurface::flat(t).unwrap()
    }

    #[test]
    fn flat_ball_grows_by_elapsed_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let (r, t) = (1.0, 0.7);
        let delta = Region::new(flat(0.0), SpatialSet::ball(Vector3::zeros(), r).unwrap());
        for _ in 0..10_000 {
            let y = random_in_ball(&mut rng, 3.0);
            assert_eq!(region_of_influence(&delta, &flat(t), &y).unwrap(), y.norm() <= r + t);
            assert_eq!(region_of_influence(&delta, &flat(-t), &y).unwrap(), y.norm() <= r + t);
        }
    }

    #[test]
    fn spacelike_region_inside_sigma_is_its_own_influence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let sigma = AchronalSurface::SqrtShell;
        let delta = Region::new(sigma.clone(), SpatialSet::ball(Vector3::new(0.5, 0.0, 0.0), 1.0).unwrap());
        for _ in 0..2000 {
            let y = random_in_ball(&mut rng, 3.0);
            assert_eq!(region_of_influence(&delta, &sigma, &y).unwrap(), delta.base.contains(&y));
        }
    }

    #[test]
    fn everything_and_empty() {
        let y = Vector3::new(5.0, 0.0, 0.0);
        assert!(region_of_influence(&Region::whole(flat(0.0)), &AchronalSurface::Clamp, &y).unwrap());
        assert!(!region_of_influence(&Region::new(flat(0.0), SpatialSet::Empty), &flat(1.0), &y).unwrap());
    }

    #[test]
    fn search_agrees_with_closed_form() {
        // a flat region written as a tilted plane with w = 0 takes the search path
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let base = SpatialSet::ball(Vector3::new(0.0, 1.0, 0.0), 0.8).unwrap();
        let closed = Region::new(flat(0.2), base.clone());
        let search = Region::new(AchronalSurface::Tilted { w: Vector3::zeros(), offset: 0.2 }, base);
        let sigma = AchronalSurface::tilted(Vector3::new(0.0, 0.0, 0.5), 1.0).unwrap();
        let mut disagreements = 0;
        for _ in 0..500 {
            let y = random_in_ball(&mut rng, 4.0);
            let a = region_of_influence(&closed, &sigma, &y).unwrap();
            let b = region_of_influence(&search, &sigma, &y).unwrap();
            disagreements += (a != b) as usize;
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn monotone_in_the_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let sigma = flat(0.5);
        let small = Region::new(AchronalSurface::SqrtShell, SpatialSet::ball(Vector3::zeros(), 0.5).unwrap());
        let large = Region::new(AchronalSurface::SqrtShell, SpatialSet::ball(Vector3::zeros(), 1.0).unwrap());
        for _ in 0..500 {
            let y = random_in_ball(&mut rng, 4.0);
            if region_of_influence(&small, &sigma, &y).unwrap() {
                assert!(region_of_influence(&large, &sigma, &y).unwrap());
            }
        }
    }

    /// Largest sampled `|T − τ(x)| − |y − x|` over the base, from below.
    fn sampled_margin(delta: &Region, sigma: &AchronalSurface, y: &Vector3<f64>, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = delta.base.bounding_box().unwrap();
        let t = sigma.tau(y);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..20_000 {
            let x = lo + (hi - lo).component_mul(&Vector3::from_fn(|_, _| rand::Rng::random::<f64>(rng)));
            if delta.base.contains(&x) {
                best = best.max((t - delta.surface.tau(&x)).abs() - (y - x).norm());
            }
        }
        best
    }

    fn agrees_with_sampling(delta: &Region, sigma: &AchronalSurface, seed: u64, reach: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = 0;
        for _ in 0..300 {
            let y = random_in_ball(&mut rng, reach);
            let inside = region_of_influence(delta, sigma, &y).unwrap();
            let margin = sampled_margin(delta, sigma, &y, &mut rng);
            // sampling only bounds the margin from below, by about the grain
            if margin > 1e-9 {
                assert!(inside, "missed y = {y:?} with margin {margin}");
            } else if margin < -0.1 {
                assert!(!inside, "spurious y = {y:?} with margin {margin}");
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn shell_ball_matches_sampling() {
        let delta = Region::new(AchronalSurface::SqrtShell, SpatialSet::ball(Vector3::new(0.3, -0.2, 0.1), 0.8).unwrap());
        for (k, t) in [-1.5, -0.4, 0.0, 0.6, 2.0].into_iter().enumerate() {
            agrees_with_sampling(&delta, &flat(t), 40 + k as u64, 3.5);
        }
    }

    #[test]
    fn shell_ball_extremes() {
        let c = Vector3::new(0.3, 0.0, 0.0);
        // the ball's own hyperboloid points are related to themselves
        assert_eq!(shell_ball((1.0f64 + 0.09).sqrt(), &c, &c, 0.5), Some(true));
        // far outside every light cone of the ball
        assert_eq!(shell_ball(-0.5, &Vector3::new(8.0, 0.0, 0.0), &c, 0.5), Some(false));
        assert_eq!(shell_ball(0.5, &Vector3::new(0.0, 9.0, 0.0), &c, 0.5), Some(false));
        // centred ball, y on the axis through it
        assert_eq!(shell_ball(-3.0, &Vector3::zeros(), &Vector3::zeros(), 0.5), Some(true));
    }

    #[test]
    fn clamp_pieces_match_sampling() {
        let delta = Region::new(AchronalSurface::Clamp, SpatialSet::ball(Vector3::new(0.0, 0.0, 0.5), 0.7).unwrap());
        agrees_with_sampling(&delta, &AchronalSurface::tilted(Vector3::new(0.0, 0.4, 0.3), 1.5).unwrap(), 50, 3.0);
        agrees_with_sampling(&delta, &flat(-1.0), 51, 3.0);
    }

    #[test]
    fn searched_box_matches_sampling() {
        let base = SpatialSet::cuboid(Vector3::new(-0.5, -0.5, -0.2), Vector3::new(0.5, 0.3, 0.4)).unwrap();
        let delta = Region::new(AchronalSurface::SqrtShell, base);
        agrees_with_sampling(&delta, &flat(-0.5), 52, 3.0);
    }
}
