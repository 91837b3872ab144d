use serde::{Deserialize, Serialize};

use super::intersect::{line_meets_region, line_surface_intersection};
use super::mc::{MCEstimate, McPlan, Tally};
use super::state::StateDensity;
use crate::error::{invalid, Error, Result};
use crate::poincare::{LinePoint, PoincareElement};
use crate::surfaces::{causal_base_check, region_of_influence, AchronalSurface, CausalBaseVerdict, Region, DEFAULT_RADII};

/// Witness lines kept per report.
const MAX_WITNESSES: usize = 8;

/// `⟨ψ, T(Δ)ψ⟩`: the probability that a line drawn from `ρ` meets `Δ`.
pub fn localization_probability(psi: &StateDensity, region: &Region, n_samples: usize, seed: u64) -> Result<MCEstimate> {
    let plan = McPlan::new(n_samples, seed)?;
    let tallies = plan.run(|rng, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let u = psi.sample(rng);
            t.push(f64::from(u8::from(line_meets_region(&u, region)?)));
        }
        Ok(t)
    })?;
    Ok(plan.estimate(&tallies))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub estimates: Vec<MCEstimate>,
    /// `Σ counts / n`, exactly 1 when every line falls in one piece.
    pub sum: f64,
    pub uncovered: usize,
    pub n_samples: usize,
    pub seed: u64,
}

/// Checks `Σ T(Δ_k) = I` over a partition of one surface. Each sampled line
/// crosses the surface once, so the piece counts add up to the sample count.
pub fn additivity_check(psi: &StateDensity, partition: &[Region], n_samples: usize, seed: u64) -> Result<AdditivityReport> {
    let surface = &partition.first().ok_or_else(|| invalid("empty partition"))?.surface;
    if partition.iter().any(|r| &r.surface != surface) {
        return Err(invalid("partition pieces must share one surface"));
    }
    let plan = McPlan::new(n_samples, seed)?;
    let batches = plan.run(|rng, n| {
        let mut counts = vec![Tally::default(); partition.len()];
        let mut uncovered = 0usize;
        for _ in 0..n {
            let u = psi.sample(rng);
            let x = line_surface_intersection(&u, surface)?.point.spatial();
            let mut hits = 0;
            for (t, piece) in counts.iter_mut().zip(partition) {
                let inside = piece.base.contains(&x);
                hits += usize::from(inside);
                t.push(f64::from(u8::from(inside)));
            }
            if hits > 1 {
                return Err(invalid(format!("partition pieces overlap at {:?}", x.as_slice())));
            }
            uncovered += usize::from(hits == 0);
        }
        Ok((counts, uncovered))
    })?;
    let estimates: Vec<MCEstimate> = (0..partition.len())
        .map(|k| plan.estimate(&batches.iter().map(|(c, _)| c[k]).collect::<Vec<_>>()))
        .collect();
    let covered: usize = batches.iter().map(|(c, _)| c.iter().map(|t| t.sum as usize).sum::<usize>()).sum();
    Ok(AdditivityReport {
        estimates,
        sum: covered as f64 / n_samples as f64,
        uncovered: batches.iter().map(|(_, u)| u).sum(),
        n_samples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub in_region: MCEstimate,
    pub in_influence: MCEstimate,
    pub violations: usize,
    pub witnesses: Vec<LinePoint>,
    /// Lines whose Σ-point lies too close to the boundary of `Δ_Σ` for the
    /// membership search to settle. They enter neither estimate and are
    /// never counted as violations.
    pub undecided: usize,
    pub undecided_lines: Vec<LinePoint>,
    pub sigma_verdict: CausalBaseVerdict,
    pub n_samples: usize,
    pub seed: u64,
}

/// Pathwise `1[u meets Δ] ≤ 1[u meets Δ_Σ]`, with `Δ_Σ` the region of
/// influence of `Δ` on the causal base `Σ`.
pub fn causality_check(
    psi: &StateDensity,
    region: &Region,
    sigma: &AchronalSurface,
    n_samples: usize,
    seed: u64,
) -> Result<CausalityReport> {
    let sigma_verdict = causal_base_check(sigma, 64, &DEFAULT_RADII, seed).verdict;
    if sigma_verdict == CausalBaseVerdict::NotCausalBase {
        return Err(invalid(format!("{} surface is not a causal base", sigma.kind())));
    }
    let plan = McPlan::new(n_samples, seed)?;
    let batches = plan.run(|rng, n| {
        let (mut inside, mut influenced) = (Tally::default(), Tally::default());
        let mut violations = Vec::new();
        let mut count = 0usize;
        let (mut undecided, mut undecided_lines) = (0usize, Vec::new());
        for _ in 0..n {
            let u = psi.sample(rng);
            let a = line_meets_region(&u, region)?;
            let y = line_surface_intersection(&u, sigma)?.point.spatial();
            let b = match region_of_influence(region, sigma, &y) {
                Ok(b) => b,
                Err(Error::NumericFailure(_)) => {
                    undecided += 1;
                    if undecided_lines.len() < MAX_WITNESSES {
                        undecided_lines.push(u);
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            inside.push(f64::from(u8::from(a)));
            influenced.push(f64::from(u8::from(b)));
            if a && !b {
                count += 1;
                if violations.len() < MAX_WITNESSES {
                    violations.push(u);
                }
            }
        }
        Ok((inside, influenced, count, violations, undecided, undecided_lines))
    })?;
    Ok(CausalityReport {
        in_region: plan.estimate(&batches.iter().map(|b| b.0).collect::<Vec<_>>()),
        in_influence: plan.estimate(&batches.iter().map(|b| b.1).collect::<Vec<_>>()),
        violations: batches.iter().map(|b| b.2).sum(),
        witnesses: batches.iter().flat_map(|b| b.3.iter().copied()).take(MAX_WITNESSES).collect(),
        undecided: batches.iter().map(|b| b.4).sum(),
        undecided_lines: batches.iter().flat_map(|b| b.5.iter().copied()).take(MAX_WITNESSES).collect(),
        sigma_verdict,
        n_samples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub image: Region,
    /// Lines where `1[g⁻¹u meets Δ] ≠ 1[u meets gΔ]`.
    pub mismatches: usize,
    pub witnesses: Vec<LinePoint>,
    /// `⟨ψ, T(Δ)ψ⟩`.
    pub original: MCEstimate,
    /// `⟨W(g)ψ, T(gΔ) W(g)ψ⟩` by importance weights `ρ(g⁻¹u)·J(u)/ρ(u)`.
    pub transported: MCEstimate,
    pub agree: bool,
    pub n_samples: usize,
    pub seed: u64,
}

/// The canonical localization is covariant: `g·𝒯_Δ = 𝒯_{gΔ}`.
pub fn covariance_check(
    psi: &StateDensity,
    region: &Region,
    g: &PoincareElement,
    n_samples: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    let image = region.transformed(g)?;
    let g_inv = g.inverse();
    let plan = McPlan::new(n_samples, seed)?;
    let batches = plan.run(|rng, n| {
        let (mut original, mut transported) = (Tally::default(), Tally::default());
        let mut mismatches = Vec::new();
        let mut count = 0usize;
        for _ in 0..n {
            let u = psi.sample(rng);
            let pulled = g_inv.act_on_line(&u);
            let a = line_meets_region(&pulled, region)?;
            let b = line_meets_region(&u, &image)?;
            if a != b {
                count += 1;
                if mismatches.len() < MAX_WITNESSES {
                    mismatches.push(u);
                }
            }
            original.push(f64::from(u8::from(line_meets_region(&u, region)?)));
            let weight = psi.density(&pulled) * g.line_action_rn_derivative(&u) / psi.density(&u);
            transported.push(if b { weight } else { 0.0 });
        }
        Ok((original, transported, count, mismatches))
    })?;
    let original = plan.estimate(&batches.iter().map(|b| b.0).collect::<Vec<_>>());
    let transported = plan.estimate(&batches.iter().map(|b| b.1).collect::<Vec<_>>());
    Ok(CovarianceReport {
        image,
        mismatches: batches.iter().map(|b| b.2).sum(),
        witnesses: batches.iter().flat_map(|b| b.3.iter().copied()).take(MAX_WITNESSES).collect(),
        agree: original.agrees_with(&transported, 3.0),
        original,
        transported,
        n_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linespace::VelocityLaw;
    use crate::minkowski::FourVector;
    use crate::poincare::SpinorMatrix;
    use crate::surfaces::SpatialSet;
    use nalgebra::Vector3;

    fn flat(t: f64) -> AchronalSurface {
        AchronalSurface::flat(t).unwrap()
    }

    fn ball(r: f64) -> SpatialSet {
        SpatialSet::ball(Vector3::zeros(), r).unwrap()
    }

    #[test]
    fn probability_examples() {
        let psi = StateDensity::standard();
        let all = localization_probability(&psi, &Region::whole(AchronalSurface::SqrtShell), 10_000, 1).unwrap();
        assert_eq!((all.value, all.std_error), (1.0, 0.0));
        let none = localization_probability(&psi, &Region::new(flat(0.0), SpatialSet::Empty), 10_000, 1).unwrap();
        assert_eq!(none.value, 0.0);
        let psi = StateDensity::new(Vector3::zeros(), 1.3, VelocityLaw::Gaussian { sigma: 0.5 }).unwrap();
        let half = Region::new(flat(0.0), SpatialSet::halfspace(Vector3::z(), 0.0).unwrap());
        let p = localization_probability(&psi, &half, 100_000, 2).unwrap();
        assert!((p.value - 0.5).abs() < 3.0 * p.std_error, "{p:?}");
    }

    #[test]
    fn monotone_in_the_region() {
        let psi = StateDensity::standard();
        let s = AchronalSurface::Clamp;
        let small = localization_probability(&psi, &Region::new(s.clone(), ball(0.5)), 20_000, 3).unwrap();
        let large = localization_probability(&psi, &Region::new(s, ball(1.0)), 20_000, 3).unwrap();
        assert!(small.value <= large.value);
    }

    #[test]
    fn additivity_examples() {
        let psi = StateDensity::standard();
        let shell = SpatialSet::Intersection(vec![ball(2.0), ball(1.0).complement()]);
        let pieces = [ball(1.0), shell, ball(2.0).complement()];
        let partition: Vec<Region> = pieces.iter().map(|b| Region::new(flat(0.0), b.clone())).collect();
        let report = additivity_check(&psi, &partition, 50_000, 4).unwrap();
        assert_eq!(report.sum, 1.0);
        assert_eq!(report.uncovered, 0);
        let single = additivity_check(&psi, &[Region::whole(flat(0.0))], 1000, 4).unwrap();
        assert_eq!(single.sum, 1.0);
        let overlapping = [Region::new(flat(0.0), ball(1.0)), Region::new(flat(0.0), ball(2.0))];
        assert!(additivity_check(&psi, &overlapping, 1000, 4).is_err());
    }

    #[test]
    fn causality_examples() {
        let psi = StateDensity::standard();
        let r = causality_check(&psi, &Region::new(flat(0.0), ball(1.0)), &flat(0.8), 100_000, 5).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.in_region.value <= r.in_influence.value);
        let empty = causality_check(&psi, &Region::new(flat(0.0), SpatialSet::Empty), &flat(1.0), 1000, 5).unwrap();
        assert_eq!(empty.violations, 0);
        let half = Region::new(flat(0.0), SpatialSet::halfspace(Vector3::x(), 0.0).unwrap());
        let tilted = AchronalSurface::tilted(Vector3::new(0.0, 0.0, 0.5), 0.0).unwrap();
        assert_eq!(causality_check(&psi, &half, &tilted, 50_000, 5).unwrap().violations, 0);
        assert!(causality_check(&psi, &half, &AchronalSurface::SqrtShell, 100, 5).is_err());
    }

    #[test]
    fn covariance_examples() {
        let psi = StateDensity::standard();
        let r = Region::new(flat(0.0), ball(1.0));
        let b = PoincareElement::translation(FourVector::new(0.0, 0.5, 0.0, 0.0));
        let t = covariance_check(&psi, &r, &b, 50_000, 6).unwrap();
        assert_eq!(t.image.base, SpatialSet::ball(Vector3::new(0.5, 0.0, 0.0), 1.0).unwrap());
        assert_eq!(t.mismatches, 0);
        assert!(t.agree, "{t:?}");
        let id = covariance_check(&psi, &r, &PoincareElement::identity(), 10_000, 6).unwrap();
        assert_eq!(id.original, id.transported);
        let boost = PoincareElement::homogeneous(SpinorMatrix::boost(&Vector3::z(), 0.5));
        let k = covariance_check(&psi, &r, &boost, 100_000, 6).unwrap();
        assert_eq!(k.mismatches, 0);
        assert!(k.agree, "{k:?}");
        assert!(covariance_check(&psi, &Region::whole(AchronalSurface::Clamp), &boost, 100, 6).is_err());
    }
}
