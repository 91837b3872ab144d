use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};

use super::ops::{
    achronal_sets, closed_sets, determinacy_set_with, is_achronal, perp_complement, perp_completion,
    realizable_directions, timelike_directions,
};
use super::universe::{EventSet, GridSpec, Universe};

/// Cap on witnesses kept per report.
pub const MAX_WITNESSES: usize = 8;

/// A pair of sets exhibiting a failed law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetWitness {
    pub law: String,
    pub m: Vec<[f64; 4]>,
    pub n: Vec<[f64; 4]>,
    /// The set the law predicts, then the set found.
    pub expected: Vec<[f64; 4]>,
    pub found: Vec<[f64; 4]>,
}

impl SetWitness {
    fn new(universe: &Universe, law: &str, m: &EventSet, n: &EventSet, expected: &EventSet, found: &EventSet) -> Self {
        let pts = |s: &EventSet| s.points(universe).into_iter().map(|p| p.to_array()).collect();
        Self { law: law.into(), m: pts(m), n: pts(n), expected: pts(expected), found: pts(found) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureLawReport {
    pub check: &'static str,
    pub universe: String,
    pub sets_tested: usize,
    pub pairs_tested: usize,
    pub extensive_failures: usize,
    pub idempotent_failures: usize,
    pub monotone_failures: usize,
    pub de_morgan_failures: usize,
    pub passes: bool,
    pub witnesses: Vec<SetWitness>,
}

/// Closure-operator laws of `M ↦ M^∧` and De Morgan duality of `⊥` over
/// all sets and all pairs of `sets`.
pub fn closure_law_check(universe: &Universe, sets: &[EventSet]) -> ClosureLawReport {
    let closures: Vec<EventSet> = sets.par_iter().map(|m| perp_completion(universe, m)).collect();
    let complements: Vec<EventSet> = sets.par_iter().map(|m| perp_complement(universe, m)).collect();
    let mut report = ClosureLawReport {
        check: "closure-laws",
        universe: universe.tag().into(),
        sets_tested: sets.len(),
        pairs_tested: 0,
        extensive_failures: 0,
        idempotent_failures: 0,
        monotone_failures: 0,
        de_morgan_failures: 0,
        passes: true,
        witnesses: Vec::new(),
    };
    let witness = |report: &mut ClosureLawReport, w: SetWitness| {
        if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(w);
        }
    };
    let empty = universe.empty_set();
    for (m, mm) in sets.iter().zip(&closures) {
        if !m.is_subset(mm) {
            report.extensive_failures += 1;
            witness(&mut report, SetWitness::new(universe, "extensive", m, &empty, m, mm));
        }
        let again = perp_completion(universe, mm);
        if again != *mm {
            report.idempotent_failures += 1;
            witness(&mut report, SetWitness::new(universe, "idempotent", m, &empty, mm, &again));
        }
    }
    let per_pair: Vec<(usize, usize, Vec<SetWitness>)> = (0..sets.len())
        .into_par_iter()
        .map(|i| {
            let (mut monotone, mut de_morgan, mut found) = (0, 0, Vec::new());
            for j in 0..sets.len() {
                let (m, n) = (&sets[i], &sets[j]);
                if m.is_subset(n) && !closures[i].is_subset(&closures[j]) {
                    monotone += 1;
                    found.push(SetWitness::new(universe, "monotone", m, n, &closures[i], &closures[j]));
                }
                let lhs = perp_complement(universe, &m.union(n));
                let rhs = complements[i].intersection(&complements[j]);
                if lhs != rhs {
                    de_morgan += 1;
                    found.push(SetWitness::new(universe, "de-morgan", m, n, &rhs, &lhs));
                }
            }
            (monotone, de_morgan, found)
        })
        .collect();
    for (monotone, de_morgan, found) in per_pair {
        report.monotone_failures += monotone;
        report.de_morgan_failures += de_morgan;
        for w in found {
            witness(&mut report, w);
        }
    }
    report.pairs_tested = sets.len() * sets.len();
    report.passes = report.extensive_failures
        + report.idempotent_failures
        + report.monotone_failures
        + report.de_morgan_failures
        == 0;
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthomodularityReport {
    pub check: &'static str,
    pub universe: String,
    pub family_size: usize,
    pub pairs_tested: usize,
    pub violations: usize,
    pub passes: bool,
    pub witnesses: Vec<SetWitness>,
}

/// Tests `N = (M ∪ (M^⊥ ∩ N))^∧` for every nested pair `M ⊆ N` of the
/// family. Members must be ⊥-complete.
pub fn orthomodularity_check(universe: &Universe, family: &[EventSet]) -> Result<OrthomodularityReport> {
    if let Some(m) = family.iter().find(|m| perp_completion(universe, m) != **m) {
        return Err(invalid(format!("family member {m} is not ⊥-complete in '{}'", universe.tag())));
    }
    let per_m: Vec<(usize, usize, Vec<SetWitness>)> = family
        .par_iter()
        .map(|m| {
            let m_perp = perp_complement(universe, m);
            let (mut pairs, mut violations, mut found) = (0, 0, Vec::new());
            for n in family.iter().filter(|n| m.is_subset(n)) {
                pairs += 1;
                let join = perp_completion(universe, &m.union(&m_perp.intersection(n)));
                if join != *n {
                    violations += 1;
                    if found.len() < MAX_WITNESSES {
                        found.push(SetWitness::new(universe, "orthomodular", m, n, n, &join));
                    }
                }
            }
            (pairs, violations, found)
        })
        .collect();
    let mut report = OrthomodularityReport {
        check: "orthomodularity",
        universe: universe.tag().into(),
        family_size: family.len(),
        pairs_tested: 0,
        violations: 0,
        passes: true,
        witnesses: Vec::new(),
    };
    for (pairs, violations, found) in per_m {
        report.pairs_tested += pairs;
        report.violations += violations;
        let room = MAX_WITNESSES - report.witnesses.len();
        report.witnesses.extend(found.into_iter().take(room));
    }
    report.passes = report.violations == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminacyReport {
    pub check: &'static str,
    pub universe: String,
    pub directions: usize,
    /// Every event has at least two realizable timelike grid directions.
    pub direction_rich: bool,
    pub sets_tested: usize,
    /// Sets with `D(M) ⊄ M^∧`; impossible on a grid with a timelike
    /// direction, so a hard failure.
    pub inclusion_failures: usize,
    /// Sets with `D(M) ≠ M^∧`, logged only.
    pub mismatches: usize,
    pub passes: bool,
    pub witnesses: Vec<SetWitness>,
}

/// Compares the determinacy set with the ⊥-completion for achronal `sets`
/// of a grid universe.
pub fn determinacy_comparison(universe: &Universe, sets: &[EventSet]) -> Result<DeterminacyReport> {
    let spec = universe
        .grid_spec()
        .ok_or_else(|| invalid(format!("determinacy needs a grid universe; '{}' is a point cloud", universe.tag())))?;
    let directions = timelike_directions(spec);
    let direction_rich = (0..universe.len()).all(|i| realizable_directions(spec, i, &directions).len() >= 2);
    let mut report = DeterminacyReport {
        check: "determinacy",
        universe: universe.tag().into(),
        directions: directions.len(),
        direction_rich,
        sets_tested: 0,
        inclusion_failures: 0,
        mismatches: 0,
        passes: true,
        witnesses: Vec::new(),
    };
    let empty = universe.empty_set();
    for m in sets.iter().filter(|m| is_achronal(universe, m)) {
        report.sets_tested += 1;
        let d = determinacy_set_with(universe, m, &directions)?;
        let closure = perp_completion(universe, m);
        // with no timelike direction at all every event is vacuously determined
        if !directions.is_empty() && !d.is_subset(&closure) {
            report.inclusion_failures += 1;
        }
        if d != closure {
            report.mismatches += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(SetWitness::new(universe, "determinacy", m, &empty, &closure, &d));
            }
        }
    }
    report.passes = report.inclusion_failures == 0;
    Ok(report)
}

/// All laws on one universe small enough to enumerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeLabReport {
    pub universe: String,
    pub events: usize,
    pub closed_sets: usize,
    pub closure: ClosureLawReport,
    pub orthomodularity: OrthomodularityReport,
    pub determinacy: Option<DeterminacyReport>,
}

impl LatticeLabReport {
    pub fn hard_failures(&self) -> usize {
        let c = &self.closure;
        let d = self.determinacy.as_ref().map_or(0, |d| d.inclusion_failures);
        c.extensive_failures + c.idempotent_failures + c.monotone_failures + c.de_morgan_failures + d
    }
}

/// Runs every law over all subsets and all ⊥-complete subsets of `universe`.
pub fn exhaustive_lab(universe: &Universe) -> Result<LatticeLabReport> {
    if universe.len() > super::ops::MAX_ENUMERATED {
        return Err(invalid(format!("universe '{}' is too large to enumerate", universe.tag())));
    }
    let subsets: Vec<EventSet> = (0..1u64 << universe.len()).map(|m| universe.set_from_mask(m)).collect();
    let closed = closed_sets(universe)?;
    let closure = closure_law_check(universe, &subsets);
    let orthomodularity = orthomodularity_check(universe, &closed)?;
    let determinacy = match universe.grid_spec() {
        Some(_) => Some(determinacy_comparison(universe, &achronal_sets(universe)?)?),
        None => None,
    };
    Ok(LatticeLabReport {
        universe: universe.tag().into(),
        events: universe.len(),
        closed_sets: closed.len(),
        closure,
        orthomodularity,
        determinacy,
    })
}

/// A grid universe of at most `max_events` events with a random shape and
/// a random ratio of spatial to temporal spacing in `[0.3, 1.5]`.
pub fn random_grid_universe<R: Rng + ?Sized>(rng: &mut R, max_events: usize, tag: impl Into<String>) -> Result<Universe> {
    if max_events < 2 {
        return Err(invalid("a random grid universe needs room for two events"));
    }
    loop {
        let shape = [rng.random_range(2..=4), rng.random_range(1..=4), rng.random_range(1..=3), 1];
        if shape.iter().product::<usize>() > max_events {
            continue;
        }
        let ratio = rng.random_range(0.3..1.5);
        let spacing = [1.0, ratio, ratio * rng.random_range(0.8..1.25), 1.0];
        return Universe::grid(tag, GridSpec::new(spacing, shape)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::FourVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn n_poset() -> Universe {
        let pts = [[0.0, 2.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [3.0, 1.0, 0.0, 0.0], [5.0, -4.9, 0.0, 0.0]];
        Universe::new("n-poset", pts.into_iter().map(FourVector::from).collect()).unwrap()
    }

    #[test]
    fn closure_laws_hold_exhaustively() {
        let u = n_poset();
        let subsets: Vec<_> = (0..16).map(|m| u.set_from_mask(m)).collect();
        let r = closure_law_check(&u, &subsets);
        assert!(r.passes, "{r:?}");
        assert_eq!(r.pairs_tested, 256);
    }

    // a four-event universe whose timelike order is the N-shaped poset
    // a < c > b < d; an independent enumeration finds 6 closed sets and
    // 2 failing nested pairs, one of them M = {a}, N = {a, c}
    #[test]
    fn n_poset_is_not_orthomodular() {
        let u = n_poset();
        let closed = closed_sets(&u).unwrap();
        assert_eq!(closed.len(), 6);
        let r = orthomodularity_check(&u, &closed).unwrap();
        assert_eq!(r.violations, 2);
        assert!(!r.passes);
        let a = [0.0, 2.0, 0.0, 0.0];
        let c = [3.0, 1.0, 0.0, 0.0];
        assert!(r.witnesses.iter().any(|w| w.m == vec![a] && w.n == vec![a, c]));
    }

    #[test]
    fn nested_slices_and_equal_pairs_pass() {
        let u = Universe::grid("g", GridSpec::plane(2, 3, 1.0, 1.0).unwrap()).unwrap();
        let m = perp_completion(&u, &u.set_where(|p| p.x0 == 0.0 && p.x1 == 0.0));
        let n = perp_completion(&u, &u.set_where(|p| p.x0 == 0.0));
        assert!(m.is_subset(&n));
        let r = orthomodularity_check(&u, &[m.clone(), n]).unwrap();
        assert!(r.passes);
        assert!(orthomodularity_check(&u, &[m.clone(), m]).unwrap().passes);
        let not_closed = u.set_from_indices([0, 1]).unwrap();
        assert!(orthomodularity_check(&u, &[not_closed]).is_err());
    }

    // violation counts on unit-speed planes from an independent enumeration
    #[test]
    fn grid_violation_counts() {
        for (nt, nx, count) in [(2, 3, 0), (3, 3, 54), (3, 4, 530)] {
            let u = Universe::grid("g", GridSpec::plane(nt, nx, 1.0, 1.0).unwrap()).unwrap();
            let r = orthomodularity_check(&u, &closed_sets(&u).unwrap()).unwrap();
            assert_eq!(r.violations, count, "{nt}×{nx}");
        }
        let cube = Universe::grid("c", GridSpec::new([1.0; 4], [2, 2, 2, 1]).unwrap()).unwrap();
        assert!(exhaustive_lab(&cube).unwrap().orthomodularity.passes);
    }

    #[test]
    fn determinacy_inclusion_never_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..20 {
            let u = random_grid_universe(&mut rng, 10, format!("r{k}")).unwrap();
            let lab = exhaustive_lab(&u).unwrap();
            assert_eq!(lab.hard_failures(), 0, "{lab:?}");
            let d = lab.determinacy.unwrap();
            assert!(d.sets_tested > 0);
        }
    }

    #[test]
    fn point_clouds_have_no_determinacy() {
        let lab = exhaustive_lab(&n_poset()).unwrap();
        assert!(lab.determinacy.is_none());
        assert!(determinacy_comparison(&n_poset(), &[]).is_err());
    }
}
