use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::minkowski::{classify, CausalClass, FourVector};

use super::universe::{EventSet, GridSpec, Universe};

/// Largest universe for which every ⊥-complete subset is enumerated.
pub const MAX_ENUMERATED: usize = 20;

/// `M^⊥` within the universe; the whole universe for `M = ∅`.
pub fn perp_complement(universe: &Universe, m: &EventSet) -> EventSet {
    let mut out = universe.full_set();
    for i in m.iter() {
        out.bits_mut().intersect_with(universe.perp_row(i));
    }
    out
}

/// `M^∧ = (M^⊥)^⊥`.
pub fn perp_completion(universe: &Universe, m: &EventSet) -> EventSet {
    perp_complement(universe, &perp_complement(universe, m))
}

pub fn is_perp_complete(universe: &Universe, m: &EventSet) -> bool {
    perp_completion(universe, m) == *m
}

/// Pairwise ⊥, i.e. achronal within the universe.
pub fn is_achronal(universe: &Universe, m: &EventSet) -> bool {
    m.iter().all(|i| {
        let mut others = m.clone();
        others.remove(i);
        others.bits().is_subset(universe.perp_row(i))
    })
}

/// Every ⊥-complete subset, sorted. Each one is `S^⊥` for some `S`, so the
/// enumeration runs over all `2^n` subsets.
pub fn closed_sets(universe: &Universe) -> Result<Vec<EventSet>> {
    let n = universe.len();
    if n > MAX_ENUMERATED {
        return Err(invalid(format!(
            "enumerating closed sets needs at most {MAX_ENUMERATED} events, got {n}"
        )));
    }
    let mut found = BTreeSet::new();
    for mask in 0..1u64 << n {
        found.insert(perp_complement(universe, &universe.set_from_mask(mask)));
    }
    Ok(found.into_iter().collect())
}

/// Every achronal subset (cliques of the ⊥ graph, including ∅).
pub fn achronal_sets(universe: &Universe) -> Result<Vec<EventSet>> {
    let n = universe.len();
    if n > MAX_ENUMERATED {
        return Err(invalid(format!(
            "enumerating achronal sets needs at most {MAX_ENUMERATED} events, got {n}"
        )));
    }
    Ok((0..1u64 << n)
        .map(|mask| universe.set_from_mask(mask))
        .filter(|s| is_achronal(universe, s))
        .collect())
}

/// A primitive integer step between grid events.
pub type GridDirection = [i64; 4];

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Future-pointing, primitive, timelike steps short enough to join two
/// events of the grid.
pub fn timelike_directions(spec: &GridSpec) -> Vec<GridDirection> {
    let span = |a: usize| spec.shape[a] as i64 - 1;
    let mut out = Vec::new();
    for d0 in 1..=span(0) {
        for d1 in -span(1)..=span(1) {
            for d2 in -span(2)..=span(2) {
                for d3 in -span(3)..=span(3) {
                    let d = [d0, d1, d2, d3];
                    if d.iter().fold(0, |g, &c| gcd(g, c)) != 1 {
                        continue;
                    }
                    let step = FourVector::from(std::array::from_fn(|a| d[a] as f64 * spec.spacing[a]));
                    if classify(&step) == CausalClass::Timelike {
                        out.push(d);
                    }
                }
            }
        }
    }
    out
}

/// Does the grid line through `idx` along `d` contain an event of `m`?
fn line_meets(spec: &GridSpec, m: &EventSet, idx: [i64; 4], d: GridDirection) -> bool {
    for sign in [1i64, -1] {
        let mut k = if sign == 1 { 0 } else { -1 };
        loop {
            let at = std::array::from_fn(|a| idx[a] + k * d[a]);
            match spec.flat_index(at) {
                Some(j) if m.contains(j) => return true,
                Some(_) => k += sign,
                None => break,
            }
        }
    }
    false
}

/// Directions along which the grid line through event `i` holds a second event.
pub fn realizable_directions(spec: &GridSpec, i: usize, directions: &[GridDirection]) -> Vec<GridDirection> {
    let idx = spec.multi_index(i);
    directions
        .iter()
        .copied()
        .filter(|d| {
            let fwd = std::array::from_fn(|a| idx[a] + d[a]);
            let back = std::array::from_fn(|a| idx[a] - d[a]);
            spec.flat_index(fwd).is_some() || spec.flat_index(back).is_some()
        })
        .collect()
}

/// Events all of whose timelike grid lines meet `m`, using every
/// timelike grid direction.
pub fn determinacy_set(universe: &Universe, m: &EventSet) -> Result<EventSet> {
    let spec = universe
        .grid_spec()
        .ok_or_else(|| invalid(format!("determinacy needs a grid universe; '{}' is a point cloud", universe.tag())))?;
    determinacy_set_with(universe, m, &timelike_directions(spec))
}

/// As [`determinacy_set`] with an explicit direction sample.
pub fn determinacy_set_with(universe: &Universe, m: &EventSet, directions: &[GridDirection]) -> Result<EventSet> {
    let spec = universe
        .grid_spec()
        .ok_or_else(|| invalid(format!("determinacy needs a grid universe; '{}' is a point cloud", universe.tag())))?;
    let mut out = universe.empty_set();
    for i in 0..universe.len() {
        let idx = spec.multi_index(i);
        if m.contains(i) || directions.iter().all(|&d| line_meets(spec, m, idx, d)) {
            out.insert(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane(nt: usize, nx: usize, dt: f64, dx: f64) -> Universe {
        Universe::grid("plane", GridSpec::plane(nt, nx, dt, dx).unwrap()).unwrap()
    }

    #[test]
    fn complement_examples() {
        let pts = vec![FourVector::ZERO, FourVector::new(0.0, 1.0, 0.0, 0.0), FourVector::TIME];
        let u = Universe::new("three", pts).unwrap();
        assert_eq!(perp_complement(&u, &u.empty_set()), u.full_set());
        let origin = u.set_from_indices([0]).unwrap();
        assert_eq!(perp_complement(&u, &origin), u.set_from_indices([1]).unwrap());
        let slice = Universe::grid("slice", GridSpec::new([1.0; 4], [1, 3, 3, 1]).unwrap()).unwrap();
        assert!(perp_complement(&slice, &slice.full_set()).is_empty());
    }

    #[test]
    fn completion_examples() {
        let u = plane(3, 3, 1.0, 0.5);
        // two timelike-separated events make ∅^∧ = 𝒰^⊥ = ∅
        assert!(perp_completion(&u, &u.empty_set()).is_empty());
        for i in 0..u.len() {
            let p = u.set_from_indices([i]).unwrap();
            assert_eq!(perp_completion(&u, &p), p);
        }
        // at unit speed lightlike neighbours on the first and last slice
        // pull a second event into the completion of a point
        let u = plane(3, 3, 1.0, 1.0);
        let grown = (0..u.len())
            .filter(|&i| perp_completion(&u, &u.set_from_indices([i]).unwrap()).len() > 1)
            .count();
        assert_eq!(grown, 6);
        let u = plane(2, 3, 1.0, 1.0);
        let m = u.set_from_indices([0, 1]).unwrap();
        assert_eq!(perp_completion(&u, &m), u.set_from_indices([0, 1, 3, 4]).unwrap());
    }

    // brute-force counts from an independent enumeration of the same universes
    #[test]
    fn determinacy_matches_enumeration() {
        let cases = [
            (GridSpec::plane(2, 4, 1.0, 1.0), 0i64, 1usize, 4usize, 8usize, 8usize),
            (GridSpec::plane(4, 4, 1.0, 1.0), 0, 7, 4, 4, 16),
            (GridSpec::new([1.0; 4], [3, 3, 3, 1]), 1, 9, 9, 9, 27),
            (GridSpec::plane(4, 4, 1.0, 0.5), 1, 11, 4, 4, 16),
        ];
        for (spec, t, n_dirs, n_m, n_d, n_closure) in cases {
            let spec = spec.unwrap();
            let u = Universe::grid("g", spec.clone()).unwrap();
            let m = u.set_where(|p| p.x0 == t as f64);
            assert_eq!(timelike_directions(&spec).len(), n_dirs);
            assert_eq!(m.len(), n_m);
            let d = determinacy_set(&u, &m).unwrap();
            let closure = perp_completion(&u, &m);
            assert_eq!(d.len(), n_d);
            assert_eq!(closure.len(), n_closure);
            assert!(d.is_subset(&closure));
        }
    }

    #[test]
    fn determinacy_of_a_point() {
        let spec = GridSpec::new([1.0; 4], [3, 3, 3, 1]).unwrap();
        let u = Universe::grid("g", spec).unwrap();
        let centre = u.set_where(|p| *p == FourVector::new(1.0, 1.0, 1.0, 0.0));
        assert_eq!(determinacy_set(&u, &centre).unwrap(), centre);
        assert!(determinacy_set(&u, &u.empty_set()).unwrap().is_empty());
        let cloud = Universe::new("c", vec![FourVector::ZERO]).unwrap();
        assert!(determinacy_set(&cloud, &cloud.empty_set()).is_err());
    }

    #[test]
    fn closed_set_counts() {
        // unit-speed planes, counted by an independent enumeration
        assert!(closed_sets(&plane(25, 1, 1.0, 1.0)).is_err());
        for (nt, nx, count) in [(2, 2, 4), (2, 3, 8), (3, 3, 26)] {
            let u = plane(nt, nx, 1.0, 1.0);
            let closed = closed_sets(&u).unwrap();
            assert_eq!(closed.len(), count);
            assert!(closed.iter().all(|m| is_perp_complete(&u, m)));
            assert!(closed.contains(&u.full_set()) && closed.contains(&u.empty_set()));
        }
    }

    fn small_universe() -> impl Strategy<Value = (Universe, u64, u64)> {
        (prop::collection::vec(prop::array::uniform4(-2i32..=2), 1..8), any::<u64>(), any::<u64>()).prop_map(
            |(raw, a, b)| {
                let mut pts: Vec<FourVector> =
                    raw.into_iter().map(|c| FourVector::from(c.map(|v| v as f64 * 0.5))).collect();
                pts.sort_by(|p, q| p.to_array().partial_cmp(&q.to_array()).unwrap());
                pts.dedup();
                (Universe::new("random", pts).unwrap(), a, b)
            },
        )
    }

    #[test]
    fn perp_is_poincare_invariant() {
        use crate::minkowski::is_perp;
        use crate::poincare::random::{random_four_vector, random_poincare};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut tested = 0;
        for _ in 0..20_000 {
            let (x, y) = (random_four_vector(&mut rng, 3.0), random_four_vector(&mut rng, 3.0));
            let g = random_poincare(&mut rng, 5.0, 1.5);
            // pairs within rounding of the cone may legitimately flip
            let z = x - y;
            if z.square().abs() < 1e-8 * z.euclidean_norm_squared().max(1.0) {
                continue;
            }
            tested += 1;
            assert_eq!(is_perp(&g.act_on_point(&x), &g.act_on_point(&y)), is_perp(&x, &y));
        }
        assert!(tested > 19_000);
    }

    proptest! {
        #[test]
        fn de_morgan_exact((u, a, b) in small_universe()) {
            let (m, n) = (u.set_from_mask(a), u.set_from_mask(b));
            prop_assert_eq!(
                perp_complement(&u, &m.union(&n)),
                perp_complement(&u, &m).intersection(&perp_complement(&u, &n))
            );
        }

        #[test]
        fn completion_is_closure((u, a, b) in small_universe()) {
            let (m, n) = (u.set_from_mask(a), u.set_from_mask(b));
            let mm = perp_completion(&u, &m);
            prop_assert!(m.is_subset(&mm));
            prop_assert_eq!(perp_completion(&u, &mm), mm.clone());
            prop_assert!(mm.is_subset(&perp_completion(&u, &m.union(&n))));
            // triple complement collapses
            prop_assert_eq!(perp_complement(&u, &mm), perp_complement(&u, &m));
        }
    }
}
