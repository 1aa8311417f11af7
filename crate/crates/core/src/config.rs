//! Scenario configuration files: a JSON schema that parses into a validated
//! [`Scenario`]. Unknown keys are rejected and constraint violations name the
//! offending field.

use std::fs;
use std::path::Path;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::imaging::ImagingGrid;
use crate::medium::{
    FrequencySet, FrequencySpacing, Inhomogeneity, LayeredMedium, Scenario,
};
use crate::steering::{ArrayRole, SensorArray};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSection {
    pub center: [f64; 2],
    pub radius: f64,
    pub eps: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub count: usize,
    pub angle_min: f64,
    pub angle_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraysSection {
    pub observation: ArraySection,
    pub incidence: ArraySection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpacingMode {
    #[serde(rename = "linear-in-omega")]
    LinearOmega,
    #[serde(rename = "linear-in-lambda")]
    LinearLambda,
}

impl Default for SpacingMode {
    fn default() -> Self {
        SpacingMode::LinearOmega
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequenciesSection {
    pub omega_min: f64,
    pub omega_max: f64,
    pub count: usize,
    #[serde(default)]
    pub mode: SpacingMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Target SNR in dB; omit for noiseless data.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestVectorsSection {
    pub c_d: [f64; 3],
    /// Defaults to `c_d` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_h: Option<[f64; 3]>,
}

/// Default imaging method carried by a scenario file; the CLI can override
/// every field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    /// "filter", "music" or "kirchhoff".
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

/// On-disk scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub medium: MediumSection,
    pub scatterers: Vec<ScattererSection>,
    pub arrays: ArraysSection,
    pub frequencies: FrequenciesSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    pub grid: GridSection,
    pub test_vectors: TestVectorsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodSection>,
}

/// A parsed and validated scenario together with its source document and the
/// document's content hash.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub scenario: Scenario,
    pub hash: String,
}

fn at(path: &str, err: Error) -> Error {
    match err {
        Error::InvalidArgument(message) => Error::Validation {
            path: path.to_string(),
            message,
        },
        other => other,
    }
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> Result<Scenario> {
        let medium = LayeredMedium::new(
            self.medium.eps_plus,
            self.medium.eps_minus,
            self.medium.mu_plus,
            self.medium.mu_minus,
        )
        .map_err(|e| at("medium", e))?;

        let scatterers = self
            .scatterers
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Inhomogeneity::new(
                    Vector2::new(s.center[0], s.center[1]),
                    s.radius,
                    s.eps,
                    s.mu,
                )
                .map_err(|e| at(&format!("scatterers[{i}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;

        let observation = SensorArray::equispaced(
            ArrayRole::Observation,
            self.arrays.observation.count,
            self.arrays.observation.angle_min,
            self.arrays.observation.angle_max,
        )
        .map_err(|e| at("arrays.observation", e))?;
        let incidence = SensorArray::equispaced(
            ArrayRole::Incidence,
            self.arrays.incidence.count,
            self.arrays.incidence.angle_min,
            self.arrays.incidence.angle_max,
        )
        .map_err(|e| at("arrays.incidence", e))?;

        let spacing = match self.frequencies.mode {
            SpacingMode::LinearOmega => FrequencySpacing::LinearOmega,
            SpacingMode::LinearLambda => FrequencySpacing::LinearLambda,
        };
        let frequencies = FrequencySet::equispaced(
            self.frequencies.omega_min,
            self.frequencies.omega_max,
            self.frequencies.count,
            spacing,
        )
        .map_err(|e| at("frequencies", e))?;

        let grid = ImagingGrid::new(
            self.grid.x1_min,
            self.grid.x1_max,
            self.grid.x2_min,
            self.grid.x2_max,
            self.grid.step,
        )
        .map_err(|e| at("grid", e))?;

        let c_d = Vector3::from(self.test_vectors.c_d);
        let c_h = Vector3::from(self.test_vectors.c_h.unwrap_or(self.test_vectors.c_d));
        let (snr_db, seed) = match &self.noise {
            Some(n) => (n.snr_db, n.seed),
            None => (None, 0),
        };

        if let Some(method) = &self.method {
            method.validate(self.frequencies.count)?;
        }

        Scenario::new(
            medium,
            scatterers,
            observation,
            incidence,
            frequencies,
            c_d,
            c_h,
            snr_db,
            seed,
            grid,
        )
    }

    /// Hex SHA-256 of the canonical (serialized) document; recorded in output
    /// metadata so maps and archives can be traced back to their scenario.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario file serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl MethodSection {
    pub fn validate(&self, freq_count: usize) -> Result<()> {
        let reject = |field: &str| {
            Err(Error::validation(
                format!("method.{field}"),
                format!("parameter does not apply to method '{}'", self.name),
            ))
        };
        match self.name.as_str() {
            "filter" => {
                if self.freq_index.is_some() {
                    return reject("freq_index");
                }
                if let Some(f) = self.freq_count {
                    if f == 0 || f > freq_count {
                        return Err(Error::validation(
                            "method.freq_count",
                            format!("must lie in 1..={freq_count}"),
                        ));
                    }
                }
            }
            "music" => {
                if self.freq_count.is_some() {
                    return reject("freq_count");
                }
                if let Some(i) = self.freq_index {
                    if i >= freq_count {
                        return Err(Error::validation(
                            "method.freq_index",
                            format!("must lie in 0..{freq_count}"),
                        ));
                    }
                }
                if let Some(tau) = self.tau {
                    if !(tau > 0.0 && tau < 1.0) {
                        return Err(Error::validation(
                            "method.tau",
                            "must lie strictly between 0 and 1",
                        ));
                    }
                }
            }
            "kirchhoff" => {
                if self.freq_count.is_some() {
                    return reject("freq_count");
                }
                if self.tau.is_some() {
                    return reject("tau");
                }
                if let Some(i) = self.freq_index {
                    if i >= freq_count {
                        return Err(Error::validation(
                            "method.freq_index",
                            format!("must lie in 0..{freq_count}"),
                        ));
                    }
                }
            }
            other => {
                return Err(Error::validation(
                    "method.name",
                    format!("unknown method '{other}' (expected filter, music or kirchhoff)"),
                ));
            }
        }
        Ok(())
    }
}

/// Parses a scenario document from a string.
pub fn parse_scenario_str(text: &str) -> Result<LoadedScenario> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let scenario = file.to_scenario()?;
    let hash = file.content_hash();
    Ok(LoadedScenario {
        file,
        scenario,
        hash,
    })
}

/// Reads and parses a scenario document from disk.
pub fn parse_scenario(path: &Path) -> Result<LoadedScenario> {
    let text = fs::read_to_string(path)?;
    parse_scenario_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "medium": {"eps_plus": 5.0, "eps_minus": 4.0, "mu_plus": 1.0, "mu_minus": 1.0},
            "scatterers": [
                {"center": [0.63, -2.47], "radius": 0.1, "eps": 2.0, "mu": 1.0}
            ],
            "arrays": {
                "observation": {"count": 6, "angle_min": 0.7853981633974483, "angle_max": 2.356194490192345},
                "incidence": {"count": 10, "angle_min": 0.7853981633974483, "angle_max": 2.356194490192345}
            },
            "frequencies": {"omega_min": 6.283185307179586, "omega_max": 12.566370614359172, "count": 10},
            "noise": {"snr_db": 20.0, "seed": 1},
            "grid": {"x1_min": -3.0, "x1_max": 3.0, "x2_min": -6.0, "x2_max": 0.0, "step": 0.05},
            "test_vectors": {"c_d": [1.0, 0.0, 0.0]}
        })
    }

    #[test]
    fn minimal_document_parses() {
        let text = minimal_json().to_string();
        let loaded = parse_scenario_str(&text).unwrap();
        assert_eq!(loaded.scenario.observation.len(), 6);
        assert_eq!(loaded.scenario.incidence.len(), 10);
        assert_eq!(loaded.scenario.frequencies.len(), 10);
        assert_eq!(loaded.scenario.snr_db, Some(20.0));
        assert_eq!(loaded.scenario.seed, 1);
        assert_eq!(loaded.scenario.c_h, loaded.scenario.c_d);
        assert_eq!(loaded.hash.len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v = minimal_json();
        v["surprise"] = serde_json::json!(1);
        assert!(matches!(
            parse_scenario_str(&v.to_string()),
            Err(Error::Parse(_))
        ));
        let mut v2 = minimal_json();
        v2["medium"]["eps"] = serde_json::json!(1.0);
        assert!(parse_scenario_str(&v2.to_string()).is_err());
    }

    #[test]
    fn scatterer_above_interface_names_the_field() {
        let mut v = minimal_json();
        v["scatterers"][0]["center"] = serde_json::json!([0.0, 1.0]);
        let err = parse_scenario_str(&v.to_string()).unwrap_err();
        match err {
            Error::Validation { path, .. } => assert_eq!(path, "scatterers[0]"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn zero_test_vector_cites_selection_constraint() {
        let mut v = minimal_json();
        v["test_vectors"]["c_d"] = serde_json::json!([0.0, 0.0, 0.0]);
        let err = parse_scenario_str(&v.to_string()).unwrap_err();
        match err {
            Error::Validation { path, message } => {
                assert_eq!(path, "test_vectors.c_d");
                assert!(message.contains("nonzero"), "message: {message}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            parse_scenario_str("{ not json"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn method_parameters_are_checked() {
        let mut v = minimal_json();
        v["method"] = serde_json::json!({"name": "filter", "freq_count": 10});
        assert!(parse_scenario_str(&v.to_string()).is_ok());

        v["method"] = serde_json::json!({"name": "filter", "freq_index": 2});
        assert!(parse_scenario_str(&v.to_string()).is_err());

        v["method"] = serde_json::json!({"name": "music", "freq_index": 12});
        assert!(parse_scenario_str(&v.to_string()).is_err());

        v["method"] = serde_json::json!({"name": "warp"});
        assert!(parse_scenario_str(&v.to_string()).is_err());
    }

    #[test]
    fn lambda_mode_round_trips() {
        let mut v = minimal_json();
        v["frequencies"] = serde_json::json!({
            "omega_min": std::f64::consts::PI,
            "omega_max": 2.0 * std::f64::consts::PI,
            "count": 10,
            "mode": "linear-in-lambda"
        });
        let loaded = parse_scenario_str(&v.to_string()).unwrap();
        assert!((loaded.scenario.frequencies.wavelength(0) - 2.0).abs() < 1e-12);
        assert!((loaded.scenario.frequencies.wavelength(9) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn content_hash_is_stable_and_sensitive() {
        let a = parse_scenario_str(&minimal_json().to_string()).unwrap();
        let b = parse_scenario_str(&minimal_json().to_string()).unwrap();
        assert_eq!(a.hash, b.hash);
        let mut v = minimal_json();
        v["noise"]["seed"] = serde_json::json!(2);
        let c = parse_scenario_str(&v.to_string()).unwrap();
        assert_ne!(a.hash, c.hash);
    }
}
