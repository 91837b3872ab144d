use nalgebra::DMatrix;
use petgraph::algo::maximal_cliques;
use petgraph::graph::{NodeIndex, UnGraph};

use crate::error::{invalid, Error, Result};

use super::ops::{perp_complement, perp_completion};
use super::universe::{EventSet, Universe};

/// Largest operator dimension accepted.
pub const MAX_OPERATOR_DIM: usize = 16;

/// Two maximal achronal subsets may give operators this far apart.
pub const WELL_DEFINED_TOL: f64 = 1e-12;

/// Maximal achronal subsets of `m`: the maximal cliques of the ⊥ graph on `m`.
pub fn maximal_achronal_subsets(universe: &Universe, m: &EventSet) -> Vec<EventSet> {
    if m.is_empty() {
        return vec![universe.empty_set()];
    }
    let members = m.to_indices();
    let mut graph = UnGraph::<usize, ()>::with_capacity(members.len(), 0);
    let nodes: Vec<NodeIndex> = members.iter().map(|&i| graph.add_node(i)).collect();
    for (a, &i) in members.iter().enumerate() {
        for (b, &j) in members.iter().enumerate().skip(a + 1) {
            if universe.perp(i, j) {
                graph.add_edge(nodes[a], nodes[b], ());
            }
        }
    }
    let mut cliques: Vec<EventSet> = maximal_cliques(&graph)
        .into_iter()
        .map(|clique| {
            let mut s = universe.empty_set();
            for node in clique {
                s.insert(graph[node]);
            }
            s
        })
        .collect();
    cliques.sort();
    cliques
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// A representation of the causal logic on a family of ⊥-complete sets.
#[derive(Debug, Clone, PartialEq)]
pub struct RclMap {
    pub dim: usize,
    pub entries: Vec<(EventSet, DMatrix<f64>)>,
}

impl RclMap {
    pub fn get(&self, m: &EventSet) -> Option<&DMatrix<f64>> {
        self.entries.iter().find(|(s, _)| s == m).map(|(_, op)| op)
    }

    /// Worst `‖F((M ∪ N)^∧) − F(M) − F(N)‖` over pairs `M ⊆ N^⊥` whose join
    /// is in the family, with the number of such pairs.
    pub fn orthoadditivity_defect(&self, universe: &Universe) -> (f64, usize) {
        let mut worst = 0.0f64;
        let mut pairs = 0;
        for (m, fm) in &self.entries {
            let m_perp = perp_complement(universe, m);
            for (n, fn_) in self.entries.iter().filter(|(n, _)| n.is_subset(&m_perp)) {
                if let Some(fj) = self.get(&perp_completion(universe, &m.union(n))) {
                    pairs += 1;
                    worst = worst.max(max_abs_diff(fj, &(fm + fn_)));
                }
            }
        }
        (worst, pairs)
    }

    /// `‖F(𝒰) − I‖`, when the whole universe is in the family.
    pub fn normalization_defect(&self, universe: &Universe) -> Option<f64> {
        self.get(&universe.full_set())
            .map(|f| max_abs_diff(f, &DMatrix::identity(self.dim, self.dim)))
    }
}

/// Builds `F(M) := T(Δ)` for a maximal achronal `Δ ⊆ M`, checking that
/// every maximal achronal subset of `M` gives the same operator.
pub fn al_to_rcl_correspondence<T>(universe: &Universe, family: &[EventSet], localization: T) -> Result<RclMap>
where
    T: Fn(&EventSet) -> DMatrix<f64>,
{
    let mut dim = None;
    let mut entries = Vec::with_capacity(family.len());
    for m in family {
        if perp_completion(universe, m) != *m {
            return Err(invalid(format!("family member {m} is not ⊥-complete in '{}'", universe.tag())));
        }
        let subsets = maximal_achronal_subsets(universe, m);
        let ops: Vec<DMatrix<f64>> = subsets.iter().map(&localization).collect();
        for op in &ops {
            let d = op.nrows();
            if op.ncols() != d || d == 0 || d > MAX_OPERATOR_DIM {
                return Err(invalid(format!(
                    "operators must be square of dimension 1 to {MAX_OPERATOR_DIM}, got {}×{}",
                    op.nrows(),
                    op.ncols()
                )));
            }
            if *dim.get_or_insert(d) != d {
                return Err(invalid("operators of different dimensions"));
            }
        }
        for (k, op) in ops.iter().enumerate().skip(1) {
            let difference = max_abs_diff(op, &ops[0]);
            if difference > WELL_DEFINED_TOL {
                let pts = |s: &EventSet| s.points(universe).into_iter().map(|p| p.to_array()).collect::<Vec<_>>();
                return Err(Error::Inconsistent(format!(
                    "maximal achronal subsets {:?} and {:?} of {:?} give operators {difference:.3e} apart",
                    pts(&subsets[0]),
                    pts(&subsets[k]),
                    pts(m)
                )));
            }
        }
        entries.push((m.clone(), ops.into_iter().next().expect("at least one maximal subset")));
    }
    Ok(RclMap { dim: dim.unwrap_or(0), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{achronal_sets, closed_sets, GridSpec};

    // two time slices of four columns; vertical neighbours are timelike,
    // everything else spacelike
    fn columns() -> Universe {
        Universe::grid("columns", GridSpec::plane(2, 4, 1.0, 2.0).unwrap()).unwrap()
    }

    fn column_projector(columns: impl Iterator<Item = usize>) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(4, 4);
        for c in columns {
            t[(c, c)] = 1.0;
        }
        t
    }

    fn by_column(delta: &EventSet) -> DMatrix<f64> {
        column_projector(delta.iter().map(|i| i % 4))
    }

    #[test]
    fn cliques_of_the_column_universe() {
        let u = columns();
        assert_eq!(maximal_achronal_subsets(&u, &u.full_set()).len(), 16);
        assert_eq!(maximal_achronal_subsets(&u, &u.empty_set()), vec![u.empty_set()]);
    }

    #[test]
    fn column_localization_is_a_representation() {
        let u = columns();
        let family = closed_sets(&u).unwrap();
        let f = al_to_rcl_correspondence(&u, &family, by_column).unwrap();
        assert_eq!(f.normalization_defect(&u), Some(0.0));
        let (defect, pairs) = f.orthoadditivity_defect(&u);
        assert_eq!(defect, 0.0);
        assert!(pairs > family.len());
        for delta in achronal_sets(&u).unwrap() {
            let fm = f.get(&perp_completion(&u, &delta)).unwrap();
            assert_eq!(*fm, by_column(&delta));
        }
    }

    #[test]
    fn slice_dependent_weights_are_ill_defined() {
        let u = columns();
        let family = closed_sets(&u).unwrap();
        let weighted = |delta: &EventSet| {
            let mut t = DMatrix::zeros(4, 4);
            for i in delta.iter() {
                t[(i % 4, i % 4)] += if i < 4 { 1.0 } else { 0.5 };
            }
            t
        };
        assert!(matches!(al_to_rcl_correspondence(&u, &family, weighted), Err(Error::Inconsistent(_))));
        let too_big = |_: &EventSet| DMatrix::zeros(17, 17);
        assert!(al_to_rcl_correspondence(&u, &family, too_big).is_err());
    }
}
