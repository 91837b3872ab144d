use achronal::lattice::{
    al_to_rcl_correspondence, closed_sets, exhaustive_lab, random_grid_universe, EventSet, GridSpec, LatticeLabReport,
    Universe,
};
use achronal::minkowski::FourVector;
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{Property, SuiteReport};

/// Largest random grid universe; its `2^8` subsets are all enumerated.
pub const RANDOM_GRID_EVENTS: usize = 8;

/// Largest catalogue universe.
pub const CATALOGUE_EVENTS: usize = 6;

/// Random grid universes per run; `--samples` does not change it.
pub const RANDOM_GRIDS: usize = 1000;

/// Random five-event point clouds in the catalogue.
pub const RANDOM_CLOUDS: usize = 200;

const N_POSET: [[f64; 4]; 4] = [[0.0, 2.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [3.0, 1.0, 0.0, 0.0], [5.0, -4.9, 0.0, 0.0]];

/// Universes with names usable on the command line.
pub fn named_universe(name: &str) -> Option<Universe> {
    let plane = |nt, nx, dx| Universe::grid(name, GridSpec::plane(nt, nx, 1.0, dx).ok()?).ok();
    match name {
        "grid4" => plane(2, 2, 1.0),
        "grid6" => plane(2, 3, 1.0),
        "grid9" => plane(3, 3, 1.0),
        "grid12" => plane(3, 4, 1.0),
        "columns" => plane(2, 4, 2.0),
        "cube8" => Universe::grid(name, GridSpec::new([1.0; 4], [2, 2, 2, 1]).ok()?).ok(),
        "n-poset" => Universe::new(name, N_POSET.into_iter().map(FourVector::from).collect()).ok(),
        _ => None,
    }
}

pub const UNIVERSE_NAMES: [&str; 7] = ["grid4", "grid6", "grid9", "grid12", "columns", "cube8", "n-poset"];

/// Every plane grid of at most six events at three spacing ratios, the
/// N-shaped poset, and random five-event point clouds.
fn catalogue(cfg: &RunConfig) -> CliResult<Vec<Universe>> {
    let mut out = Vec::new();
    for nt in 1..=CATALOGUE_EVENTS {
        for nx in 1..=CATALOGUE_EVENTS / nt {
            for dx in [0.5, 1.0, 2.0] {
                if nt * nx >= 2 {
                    out.push(Universe::grid(format!("plane-{nt}x{nx}-dx{dx}"), GridSpec::plane(nt, nx, 1.0, dx)?)?);
                }
            }
        }
    }
    out.push(Universe::grid("slab-2x1x3", GridSpec::new([1.0, 0.8, 0.8, 1.0], [2, 1, 3, 1])?)?);
    out.push(Universe::grid("slab-1x2x2", GridSpec::new([1.0; 4], [1, 2, 2, 1])?)?);
    out.push(named_universe("n-poset").expect("fixed points"));
    let mut rng = cfg.rng(20);
    for k in 0..RANDOM_CLOUDS {
        let points = (0..5)
            .map(|_| {
                FourVector::new(
                    rng.random_range(0.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                )
            })
            .collect();
        out.push(Universe::new(format!("cloud-{k}"), points)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
struct Tally {
    universes: usize,
    sets: usize,
    closure_failures: usize,
    orthomodular_universes_failing: usize,
    orthomodular_violations: usize,
    orthomodular_pairs: usize,
    with_directions: usize,
    direction_rich: usize,
    inclusion_failures: usize,
    determinacy_sets: usize,
    determinacy_mismatches: usize,
}

impl Tally {
    fn add(&mut self, lab: &LatticeLabReport) {
        self.universes += 1;
        self.sets += lab.closure.sets_tested;
        let c = &lab.closure;
        self.closure_failures += c.extensive_failures + c.idempotent_failures + c.monotone_failures + c.de_morgan_failures;
        self.orthomodular_universes_failing += usize::from(!lab.orthomodularity.passes);
        self.orthomodular_violations += lab.orthomodularity.violations;
        self.orthomodular_pairs += lab.orthomodularity.pairs_tested;
        if let Some(d) = &lab.determinacy {
            self.with_directions += usize::from(d.directions > 0);
            self.inclusion_failures += d.inclusion_failures;
            if d.direction_rich {
                self.direction_rich += 1;
                self.determinacy_sets += d.sets_tested;
                self.determinacy_mismatches += d.mismatches;
            }
        }
    }

    fn properties(&self, family: &str) -> Vec<Property> {
        vec![
            Property::count(format!("closure-laws-{family}"), self.sets, self.closure_failures),
            Property::count(format!("orthomodular-law-{family}"), self.orthomodular_pairs, self.orthomodular_violations),
            Property::count(format!("determinacy-inside-completion-{family}"), self.with_directions, self.inclusion_failures),
            Property::count(format!("determinacy-equals-completion-{family}"), self.determinacy_sets, self.determinacy_mismatches)
                .logged(),
        ]
    }
}

fn run_labs(universes: &[Universe]) -> CliResult<(Tally, Vec<LatticeLabReport>)> {
    let labs: Vec<LatticeLabReport> = universes.par_iter().map(exhaustive_lab).collect::<Result<_, _>>()?;
    let mut tally = Tally::default();
    labs.iter().for_each(|l| tally.add(l));
    Ok((tally, labs))
}

/// The first few failing labs, for the report.
fn failing(labs: Vec<LatticeLabReport>) -> Vec<LatticeLabReport> {
    labs.into_iter().filter(|l| !l.orthomodularity.passes || l.hard_failures() > 0).take(4).collect()
}

/// Two time slices of four columns with `T(Δ) = Σ` column projectors: a
/// representation of the causal logic built from a localization.
fn rcl_property() -> CliResult<Property> {
    let u = named_universe("columns").expect("fixed grid");
    let family = closed_sets(&u)?;
    let by_column = |delta: &EventSet| {
        let mut t = DMatrix::zeros(4, 4);
        delta.iter().for_each(|i| t[(i % 4, i % 4)] = 1.0);
        t
    };
    let f = al_to_rcl_correspondence(&u, &family, by_column)?;
    let (defect, pairs) = f.orthoadditivity_defect(&u);
    let normalization = f.normalization_defect(&u).unwrap_or(f64::INFINITY);
    Ok(Property::within("rcl-from-column-localization", pairs, defect.max(normalization), 0.0))
}

/// Exhaustive lab on one universe.
pub fn run_universe(universe: &Universe) -> CliResult<SuiteReport> {
    let (tally, mut labs) = run_labs(std::slice::from_ref(universe))?;
    let lab = labs.pop().expect("one universe");
    let properties = tally.properties(universe.tag());
    Ok(SuiteReport::new("lattice", properties, serde_json::to_value(lab).expect("serializable")))
}

pub fn run(cfg: &RunConfig) -> CliResult<SuiteReport> {
    let (small, small_labs) = run_labs(&catalogue(cfg)?)?;
    let mut rng = cfg.rng(21);
    let grids = (0..RANDOM_GRIDS)
        .map(|k| random_grid_universe(&mut rng, RANDOM_GRID_EVENTS, format!("random-grid-{k}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (random, random_labs) = run_labs(&grids)?;
    let mut properties = small.properties("catalogue");
    properties.extend(random.properties("random-grids"));
    properties.push(rcl_property()?);
    let details = json!({
        "catalogue": small,
        "random_grids": random,
        "catalogue_failures": failing(small_labs),
        "random_grid_failures": failing(random_labs),
    });
    Ok(SuiteReport::new("lattice", properties, details))
}

/// A universe from a name or a JSON file.
pub fn resolve_universe(arg: &str) -> CliResult<Universe> {
    if let Some(u) = named_universe(arg) {
        return Ok(u);
    }
    let path = std::path::Path::new(arg);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "unknown universe '{arg}': expected one of {} or a JSON file",
            UNIVERSE_NAMES.join(", ")
        )));
    }
    let spec: achronal::lattice::UniverseSpec = crate::inputs::read_json(path, "universe")?;
    let tag = path.file_stem().and_then(|s| s.to_str()).unwrap_or("universe");
    Ok(spec.build(tag)?)
}
