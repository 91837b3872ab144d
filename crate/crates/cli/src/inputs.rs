use std::path::Path;

use achronal::minkowski::FourVector;
use achronal::poincare::{PoincareElement, SpinorMatrix};
use nalgebra::Vector3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Reads and validates a JSON input. Surfaces that parse but fail the
/// Lipschitz condition are precondition failures, everything else that
/// does not match the schema is a configuration error.
pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))?;
    parse_json(&text, &format!("{what} {}", path.display()))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = format!("{what}: {e}");
        if e.to_string().contains(achronal::Error::NOT_ACHRONAL) {
            CliError::Precondition(msg)
        } else {
            CliError::Config(msg)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

/// A Poincaré element written as `translation ∘ boost ∘ rotation`, or as a
/// raw unimodular matrix in place of the boost and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSpec {
    pub translation: [f64; 4],
    /// Axis and rapidity.
    pub boost: Option<AxisAngle>,
    pub rotation: Option<AxisAngle>,
    /// `[re a, im a, re b, im b, re c, im c, re d, im d]`.
    pub spinor: Option<SpinorMatrix>,
}

fn axis(a: &AxisAngle, what: &str) -> CliResult<Vector3<f64>> {
    let v = Vector3::from(a.axis);
    let n = v.norm();
    if !(n > 0.0 && n.is_finite() && a.angle.is_finite()) {
        return Err(CliError::Config(format!("{what} needs a nonzero finite axis and a finite angle")));
    }
    Ok(v / n)
}

impl TransformSpec {
    pub fn element(&self) -> CliResult<PoincareElement> {
        if self.spinor.is_some() && (self.boost.is_some() || self.rotation.is_some()) {
            return Err(CliError::Config("transform takes either a spinor or a boost and rotation".into()));
        }
        if !self.translation.iter().all(|t| t.is_finite()) {
            return Err(CliError::Config("translation must be finite".into()));
        }
        let boost = match &self.boost {
            Some(b) => SpinorMatrix::boost(&axis(b, "boost")?, b.angle),
            None => SpinorMatrix::identity(),
        };
        let rotation = match &self.rotation {
            Some(r) => SpinorMatrix::rotation(&axis(r, "rotation")?, r.angle),
            None => SpinorMatrix::identity(),
        };
        let spinor = self.spinor.unwrap_or(boost * rotation);
        Ok(PoincareElement::new(FourVector::from(self.translation), spinor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use achronal::surfaces::{AchronalSurface, Region};

    #[test]
    fn schema_errors_and_precondition_failures_differ() {
        let ok: Region = parse_json(r#"{"surface":{"kind":"flat"},"base":{"kind":"everything"}}"#, "r").unwrap();
        assert_eq!(ok.surface, AchronalSurface::flat(0.0).unwrap());
        let steep = parse_json::<AchronalSurface>(r#"{"kind":"tilted","w":[1,1,0]}"#, "s").unwrap_err();
        assert!(matches!(steep, CliError::Precondition(_)));
        let typo = parse_json::<AchronalSurface>(r#"{"kind":"flatt"}"#, "s").unwrap_err();
        assert!(matches!(typo, CliError::Config(_)));
    }

    #[test]
    fn transforms() {
        let t: TransformSpec = parse_json(r#"{"translation":[1,0,0,0]}"#, "t").unwrap();
        let g = t.element().unwrap();
        assert_eq!(g.act_on_point(&FourVector::ZERO), FourVector::new(1.0, 0.0, 0.0, 0.0));
        let t: TransformSpec = parse_json(r#"{"rotation":{"axis":[0,0,2],"angle":3.141592653589793}}"#, "t").unwrap();
        let x = t.element().unwrap().act_on_point(&FourVector::new(0.0, 1.0, 0.0, 0.0));
        assert!((x - FourVector::new(0.0, -1.0, 0.0, 0.0)).euclidean_norm_squared() < 1e-24);
        let bad: TransformSpec = parse_json(r#"{"boost":{"axis":[0,0,0],"angle":1}}"#, "t").unwrap();
        assert!(matches!(bad.element(), Err(CliError::Config(_))));
        assert!(parse_json::<TransformSpec>(r#"{"shift":[0,0,0,0]}"#, "t").is_err());
    }
}
