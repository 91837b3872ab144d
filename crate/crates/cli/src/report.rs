use std::io::Write;

use serde::Serialize;

use crate::config::{RunConfig, Thresholds};
use crate::error::CliResult;

/// One checked property: the worst deviation seen and the bound it is held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub name: String,
    /// Logged properties are reported but never fail a suite.
    pub hard: bool,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passes: bool,
}

impl Property {
    pub fn within(name: impl Into<String>, samples: usize, worst: f64, tolerance: f64) -> Self {
        Self { name: name.into(), hard: true, samples, worst, tolerance, passes: worst <= tolerance }
    }

    /// A failure count that must be zero.
    pub fn count(name: impl Into<String>, samples: usize, failures: usize) -> Self {
        Self::within(name, samples, failures as f64, 0.0)
    }

    pub fn holds(name: impl Into<String>, samples: usize, ok: bool) -> Self {
        Self::count(name, samples, usize::from(!ok))
    }

    pub fn logged(self) -> Self {
        Self { hard: false, ..self }
    }
}

/// Running maximum of deviations; a NaN sticks, so it cannot hide.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Worst(f64);

impl Worst {
    pub fn push(&mut self, e: f64) {
        self.0 = if e.is_nan() || self.0.is_nan() { f64::NAN } else { self.0.max(e) };
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Distance between two estimates in combined standard errors.
pub fn z_score(a: &achronal::linespace::MCEstimate, b: &achronal::linespace::MCEstimate) -> f64 {
    let spread = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    let gap = (a.value - b.value).abs();
    if gap == 0.0 {
        0.0
    } else if spread == 0.0 {
        f64::INFINITY
    } else {
        gap / spread
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passes: bool,
    pub properties: Vec<Property>,
    /// Suite-specific reports from the library checkers.
    pub details: serde_json::Value,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, properties: Vec<Property>, details: serde_json::Value) -> Self {
        let passes = properties.iter().all(|p| p.passes || !p.hard);
        Self { suite: suite.into(), passes, properties, details }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Property> {
        self.properties.iter().filter(|p| p.hard && !p.passes)
    }
}

/// Printed at the top of every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub tolerances: Vec<(&'static str, f64)>,
    pub thresholds: Thresholds,
}

impl Header {
    pub fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed: config.seed,
            samples: config.samples,
            workers: config.workers,
            tolerances: achronal::tolerances::table(),
            thresholds: config.thresholds,
        }
    }

    /// The header as `# key: value` lines for CSV output.
    pub fn write_comments(&self, out: &mut impl Write) -> CliResult<()> {
        writeln!(out, "# {} {} {}", self.tool, self.version, self.command)?;
        writeln!(out, "# seed: {}", self.seed)?;
        if let Some(n) = self.samples {
            writeln!(out, "# samples: {n}")?;
        }
        if let Some(w) = self.workers {
            writeln!(out, "# workers: {w}")?;
        }
        for (name, value) in &self.tolerances {
            writeln!(out, "# tolerance {name}: {value:e}")?;
        }
        let thresholds = serde_json::to_value(self.thresholds).expect("plain struct");
        for (name, value) in thresholds.as_object().into_iter().flatten() {
            writeln!(out, "# threshold {name}: {value}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub header: Header,
    pub passes: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn new(header: Header, suites: Vec<SuiteReport>) -> Self {
        Self { header, passes: suites.iter().all(|s| s.passes), suites }
    }

    pub fn write_csv(&self, out: &mut impl Write) -> CliResult<()> {
        self.header.write_comments(out)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["suite", "property", "hard", "samples", "worst", "tolerance", "passes"])?;
        for s in &self.suites {
            for p in &s.properties {
                w.serialize((&s.suite, &p.name, p.hard, p.samples, p.worst, p.tolerance, p.passes))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// A header wrapped around any JSON body.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document<T: Serialize> {
    pub header: Header,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(out: &mut impl Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logged_properties_never_fail_a_suite() {
        let props = vec![Property::count("a", 10, 0), Property::count("b", 10, 3).logged()];
        let s = SuiteReport::new("s", props, serde_json::Value::Null);
        assert!(s.passes);
        assert_eq!(s.failures().count(), 0);
        let s = SuiteReport::new("s", vec![Property::within("c", 1, f64::NAN, 1.0)], serde_json::Value::Null);
        assert!(!s.passes);
    }

    #[test]
    fn worst_keeps_nan() {
        let mut w = Worst::default();
        w.push(1.0);
        w.push(f64::NAN);
        w.push(2.0);
        assert!(w.get().is_nan());
    }

    #[test]
    fn z_scores() {
        use achronal::linespace::MCEstimate;
        let a = MCEstimate::exact(1.0, 10, 0);
        assert_eq!(z_score(&a, &a), 0.0);
        assert_eq!(z_score(&a, &MCEstimate::exact(0.5, 10, 0)), f64::INFINITY);
    }
}
