//! Distribution spec files.
//!
//! A spec is a JSON object. Without a `kind` field (or with `"kind": "triplet"`)
//! it is a Lévy–Khintchine triplet:
//!
//! ```json
//! {"schema": 1, "gauss": [[1.0]], "drift": [0.0],
//!  "levy": [{"kind": "atoms", "atoms": [{"x": [1.0], "w": 1.0}]}]}
//! ```
//!
//! `"kind": "semistable"` describes a semi-stable law by its lattice
//! parameters. See `specs/schema/spec-v1.schema.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use ssd_core::idist::{LevyComponent, LevyMeasure, LevyTriplet};
use ssd_core::iterate::{semi_stable_triplet, SemiStableSpec};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSpec {
    #[serde(default = "schema_version")]
    pub schema: u32,
    /// Gaussian covariance, one row per coordinate.
    #[serde(default)]
    pub gauss: Vec<Vec<f64>>,
    #[serde(default)]
    pub drift: Vec<f64>,
    #[serde(default)]
    pub levy: Vec<LevyComponent>,
    /// Hash of the run that wrote this file, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Direction {
    pub direction: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiStableFile {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub b: f64,
    pub alpha: f64,
    pub directions: Vec<Direction>,
    #[serde(default = "one")]
    pub r0: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Triplet(TripletSpec),
    SemiStable(SemiStableFile),
}

impl Spec {
    pub fn parse(text: &str) -> Result<Spec, CliError> {
        let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("spec: {e}")))?;
        let obj = v.as_object_mut().ok_or_else(|| CliError::Parse("spec must be a JSON object".into()))?;
        let kind = match obj.remove("kind") {
            None => String::from("triplet"),
            Some(Value::String(s)) => s,
            Some(other) => return Err(CliError::Parse(format!("spec kind must be a string, got {other}"))),
        };
        if let Some(s) = obj.get("schema") {
            if s.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(CliError::Parse(format!("unsupported spec schema {s}, expected {SCHEMA_VERSION}")));
            }
        }
        let spec = match kind.as_str() {
            "triplet" => Spec::Triplet(serde_json::from_value(v).map_err(|e| CliError::Parse(format!("spec: {e}")))?),
            "semistable" => {
                Spec::SemiStable(serde_json::from_value(v).map_err(|e| CliError::Parse(format!("spec: {e}")))?)
            }
            other => return Err(CliError::Parse(format!("unknown spec kind {other:?}"))),
        };
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<(Spec, String), CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        let spec = Spec::parse(&text)?;
        Ok((spec, sha256_hex(text.as_bytes())))
    }

    /// The triplet, checked for validity.
    pub fn triplet(&self) -> Result<LevyTriplet, CliError> {
        let t = match self {
            Spec::Triplet(t) => t.to_triplet()?,
            Spec::SemiStable(s) => semi_stable_triplet(&SemiStableSpec {
                b: s.b,
                alpha: s.alpha,
                directions: s.directions.iter().map(|d| (d.direction.clone(), d.weight)).collect(),
                r0: s.r0,
            })
            .map_err(|e| CliError::Parse(format!("semistable spec: {e}")))?,
        };
        let report = t.validate();
        if let Some(v) = report.violations.first() {
            return Err(CliError::Parse(format!("invalid triplet: {v:?}")));
        }
        Ok(t)
    }
}

impl TripletSpec {
    pub fn to_triplet(&self) -> Result<LevyTriplet, CliError> {
        let d = if !self.gauss.is_empty() { self.gauss.len() } else { self.drift.len() };
        if d == 0 {
            return Err(CliError::Parse("spec needs gauss or drift to fix the dimension".into()));
        }
        let gauss = if self.gauss.is_empty() {
            vec![0.0; d * d]
        } else {
            if self.gauss.iter().any(|r| r.len() != d) {
                return Err(CliError::Parse(format!("gauss must be a {d}x{d} matrix")));
            }
            self.gauss.concat()
        };
        let drift = if self.drift.is_empty() { vec![0.0; d] } else { self.drift.clone() };
        if drift.len() != d {
            return Err(CliError::Parse(format!("drift has {} entries, expected {d}", drift.len())));
        }
        Ok(LevyTriplet::new(gauss, LevyMeasure { components: self.levy.clone() }, drift))
    }

    pub fn from_triplet(t: &LevyTriplet) -> TripletSpec {
        let d = t.dim();
        TripletSpec {
            schema: SCHEMA_VERSION,
            gauss: t.gauss.chunks(d).map(|r| r.to_vec()).collect(),
            drift: t.drift.clone(),
            levy: t.levy.components.clone(),
            manifest: None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_triplet() {
        let s = Spec::parse(r#"{"gauss": [[2.0]]}"#).unwrap();
        let t = s.triplet().unwrap();
        assert_eq!(t.gauss, vec![2.0]);
        assert_eq!(t.drift, vec![0.0]);
    }

    #[test]
    fn lattice_component() {
        let s = Spec::parse(
            r#"{"drift": [0.0], "levy": [{"kind": "lattice", "direction": [1.0], "base": 2.0, "anchor": 1.0,
                "mass": {"pieces": [{"lo": 0, "hi": null, "terms": [{"coef": 1.0, "ratio": 0.5}]}]}}]}"#,
        )
        .unwrap();
        assert!(s.triplet().unwrap().validate().is_valid());
    }

    #[test]
    fn semistable_kind() {
        let s = Spec::parse(r#"{"kind": "semistable", "b": 2, "alpha": 1.5, "directions": [{"direction": [1], "weight": 1}]}"#)
            .unwrap();
        assert_eq!(s.triplet().unwrap().dim(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Spec::parse("[1]").is_err());
        assert!(Spec::parse(r#"{"kind": "stable"}"#).is_err());
        assert!(Spec::parse(r#"{"schema": 9, "gauss": [[1]]}"#).is_err());
        assert!(Spec::parse(r#"{"gauss": [[1]], "extra": 1}"#).is_err());
        let neg = Spec::parse(r#"{"gauss": [[-1]]}"#).unwrap();
        assert!(matches!(neg.triplet(), Err(CliError::Parse(_))));
    }

    #[test]
    fn roundtrip() {
        let t = Spec::parse(r#"{"gauss": [[1, 0.5], [0.5, 2]], "drift": [1, 2]}"#).unwrap().triplet().unwrap();
        let back = TripletSpec::from_triplet(&t).to_triplet().unwrap();
        assert_eq!(t, back);
    }
}
