use serde::Serialize;

use crate::poincare::Spin;

/// Spins in `D^{(l)} ⊗ D^{(J)}`: `|l − J|, |l − J| + 1, …, l + J`.
pub fn couplings(l: u32, spin: Spin) -> impl Iterator<Item = Spin> {
    let (two_l, two_j) = (2 * l, spin.twice());
    let lo = two_l.abs_diff(two_j);
    (lo..=two_l + two_j).step_by(2).map(Spin::from_twice)
}

/// `ν_j = 2 min{j, J} + 1` when `j + J` is an integer, else 0.
pub fn multiplicity(spin: Spin, j: Spin) -> u32 {
    if (spin.twice() + j.twice()) % 2 == 1 {
        0
    } else {
        spin.twice().min(j.twice()) + 1
    }
}

/// `ν_j` as the number of orbital `l` with `j ∈ I(l, J)`; only `l ≤ j + J`
/// can contribute.
pub fn tallied_multiplicity(spin: Spin, j: Spin) -> u32 {
    let l_max = (j.twice() + spin.twice()) / 2;
    (0..=l_max).filter(|&l| couplings(l, spin).any(|k| k == j)).count() as u32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinBlock {
    pub j: Spin,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeterWeylReport {
    pub spin: Spin,
    pub l_max: u32,
    /// `Σ_{l ≤ L} Σ_{k ∈ I(l, J)} (2k + 1)`.
    pub total_dimension: usize,
    /// `(2J + 1)(L + 1)²`.
    pub expected_dimension: usize,
    pub blocks: Vec<SpinBlock>,
    /// Blocks with `j ≤ L − J` whose count differs from `ν_j`.
    pub truncation_mismatches: Vec<Spin>,
    pub passes: bool,
}

/// Tallies `L² (S₁) ⊗ ℂ^{2J+1}` truncated at orbital `L` into spin blocks.
pub fn peter_weyl_dimension_check(spin: Spin, l_max: u32) -> PeterWeylReport {
    let top = 2 * l_max + spin.twice();
    let mut counts = vec![0u32; top as usize + 1];
    let mut total = 0;
    for l in 0..=l_max {
        for k in couplings(l, spin) {
            counts[k.twice() as usize] += 1;
            total += k.dimension();
        }
    }
    let blocks: Vec<SpinBlock> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(two_j, &count)| SpinBlock { j: Spin::from_twice(two_j as u32), count })
        .collect();
    // ν_j needs every l ≤ j + J, which the truncation keeps for j ≤ L − J
    let mismatches: Vec<Spin> = (0..=top)
        .map(Spin::from_twice)
        .filter(|j| j.twice() + spin.twice() <= 2 * l_max)
        .filter(|&j| counts[j.twice() as usize] != multiplicity(spin, j))
        .collect();
    let expected = spin.dimension() * (l_max as usize + 1).pow(2);
    PeterWeylReport {
        spin,
        l_max,
        total_dimension: total,
        expected_dimension: expected,
        passes: total == expected && mismatches.is_empty(),
        blocks,
        truncation_mismatches: mismatches,
    }
}

/// `(J, j, ν_j)` for all spins up to `max`.
pub fn multiplicity_table(max: Spin) -> Vec<(Spin, Spin, u32)> {
    max.up_to().flat_map(|spin| max.up_to().map(move |j| (spin, j, multiplicity(spin, j)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(twice: u32) -> Spin {
        Spin::from_twice(twice)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(multiplicity(Spin::ZERO, Spin::ONE), 1);
        assert_eq!(multiplicity(Spin::HALF, Spin::HALF), 2);
        assert_eq!(multiplicity(Spin::ONE, Spin::HALF), 0);
        // integer spins all occur for J = 0, half-integer ones for J = 1/2
        assert!((0..12).all(|l| multiplicity(Spin::ZERO, s(2 * l)) == 1));
        assert!((0..12).all(|l| multiplicity(Spin::HALF, s(2 * l + 1)) == 2));
    }

    #[test]
    fn tally_matches_closed_form_up_to_six() {
        for two_j in 0..=12 {
            for two_k in 0..=12 {
                assert_eq!(tallied_multiplicity(s(two_j), s(two_k)), multiplicity(s(two_j), s(two_k)));
                assert_eq!(multiplicity(s(two_j), s(two_k)), multiplicity(s(two_k), s(two_j)));
            }
        }
    }

    #[test]
    fn peter_weyl_examples() {
        let r = peter_weyl_dimension_check(Spin::ZERO, 2);
        assert_eq!((r.total_dimension, r.expected_dimension), (9, 9));
        assert!(r.passes);
        let r = peter_weyl_dimension_check(Spin::HALF, 1);
        assert_eq!(r.total_dimension, 8);
        assert_eq!(r.blocks, vec![SpinBlock { j: Spin::HALF, count: 2 }, SpinBlock { j: s(3), count: 1 }]);
        for two_j in 0..=12 {
            let r = peter_weyl_dimension_check(s(two_j), 0);
            assert_eq!(r.blocks, vec![SpinBlock { j: s(two_j), count: 1 }]);
            assert_eq!(r.total_dimension, two_j as usize + 1);
            for l_max in 0..8 {
                assert!(peter_weyl_dimension_check(s(two_j), l_max).passes);
            }
        }
    }

    #[test]
    fn table_has_every_pair() {
        assert_eq!(multiplicity_table(s(12)).len(), 169);
    }
}
