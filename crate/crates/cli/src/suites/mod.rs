//! Verification suites. Each returns a report listing every property with
//! its sample count, worst deviation and threshold.

pub mod group;
pub mod lattice;
pub mod localization;
pub mod spectrum;
pub mod surfaces;

use clap::ValueEnum;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::SuiteReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Group,
    Surfaces,
    Lattice,
    Localization,
    Spectrum,
    All,
    /// The causality part of the localization suite.
    Causality,
    /// Covariance and the Radon-Nikodym derivative.
    Covariance,
    /// Partition sums of the canonical localization.
    Additivity,
}

impl Suite {
    pub const MODULES: [Suite; 5] = [Suite::Group, Suite::Surfaces, Suite::Lattice, Suite::Localization, Suite::Spectrum];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Surfaces => "surfaces",
            Suite::Lattice => "lattice",
            Suite::Localization => "localization",
            Suite::Spectrum => "spectrum",
            Suite::All => "all",
            Suite::Causality => "causality",
            Suite::Covariance => "covariance",
            Suite::Additivity => "additivity",
        }
    }

    /// Runs the suite with its built-in scenarios.
    pub fn run(self, cfg: &RunConfig) -> CliResult<Vec<SuiteReport>> {
        Ok(match self {
            Suite::Group => vec![group::run(cfg)?],
            Suite::Surfaces => vec![surfaces::run(cfg)?],
            Suite::Lattice => vec![lattice::run(cfg)?],
            Suite::Localization => vec![localization::run(cfg)?],
            Suite::Spectrum => vec![spectrum::run(cfg)?],
            Suite::Causality => vec![localization::run_causality(cfg)?],
            Suite::Covariance => vec![localization::run_covariance(cfg)?],
            Suite::Additivity => vec![localization::run_additivity(cfg)?],
            Suite::All => {
                let mut out = Vec::new();
                for s in Self::MODULES {
                    out.extend(s.run(cfg)?);
                }
                out
            }
        })
    }
}
