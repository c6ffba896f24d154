//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use eglab_core::SolverConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorSpec,
    pub solver: Option<SolverSection>,
    pub analysis: Option<AnalysisSpec>,
    pub outputs: Option<OutputSpec>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Normal operator with the given eigenvalues `[re, im]`.
    Spectrum {
        eigenvalues: Vec<[f64; 2]>,
        seed: Option<u64>,
    },
    /// Dense matrix, row-major.
    Matrix { entries: Vec<Vec<f64>> },
    Named {
        name: NamedOperator,
        a: Option<f64>,
        b: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedOperator {
    NegIdentity,
    Rotation,
    DampedRotation,
    CubicSaddle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub gamma: f64,
    pub max_iters: usize,
    pub residual_stop: Option<f64>,
    pub divergence_stop: Option<f64>,
    pub keep_vectors: Option<usize>,
    pub x0: Option<Vec<f64>>,
    pub x_star: Option<Vec<f64>>,
}

impl SolverSection {
    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.gamma, self.max_iters);
        if let Some(r) = self.residual_stop {
            cfg = cfg.with_residual_stop(r);
        }
        if let Some(d) = self.divergence_stop {
            cfg = cfg.with_divergence_stop(d);
        }
        if let Some(m) = self.keep_vectors {
            cfg = cfg.with_keep_vectors(m);
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certified {
    Certified,
}

/// Constants fed to the step analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnalysisSpec {
    Certified(Certified),
    Explicit(AnalysisOverride),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOverride {
    /// Omitted `mu`/`L` fall back to the operator's certified constants.
    pub mu: Option<f64>,
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    pub gamma_max: Option<f64>,
    pub grid_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

pub const DEFAULT_GAMMA_MAX: f64 = 1.0;
pub const DEFAULT_GRID_SIZE: usize = 100;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Config(format!(
                "line {} column {}, field `{}`: {}",
                inner.line(),
                inner.column(),
                path,
                inner
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = Self::from_json(&text)?;
        Ok((cfg, config_hash(&text)))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let OperatorSpec::Named { name, a, b } = &self.operator {
            match name {
                NamedOperator::DampedRotation => {
                    if a.is_none() || b.is_none() {
                        return Err(CliError::Config("damped_rotation needs both `a` and `b`".into()));
                    }
                }
                _ if a.is_some() || b.is_some() => {
                    return Err(CliError::Config(format!("`a`/`b` only apply to damped_rotation, not {name:?}")));
                }
                _ => {}
            }
        }
        if matches!(self.analysis, Some(AnalysisSpec::Certified(_))) && !self.operator.is_linear() {
            return Err(CliError::Config("\"certified\" analysis constants require a linear operator".into()));
        }
        if let Some(s) = &self.solver {
            s.solver_config().validate().map_err(|e| CliError::Config(format!("solver: {e}")))?;
        }
        if let Some(AnalysisSpec::Explicit(o)) = &self.analysis {
            for (name, v) in [("mu", o.mu), ("L", o.lipschitz)] {
                if v.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
                    return Err(CliError::Config(format!("analysis.{name} must be finite and non-negative")));
                }
            }
            if o.gamma_max.is_some_and(|g| !(g > 0.0 && g.is_finite())) {
                return Err(CliError::Config("analysis.gamma_max must be positive".into()));
            }
            if o.grid_size == Some(0) {
                return Err(CliError::Config("analysis.grid_size must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub fn gamma_max(&self) -> f64 {
        match &self.analysis {
            Some(AnalysisSpec::Explicit(o)) => o.gamma_max.unwrap_or(DEFAULT_GAMMA_MAX),
            _ => DEFAULT_GAMMA_MAX,
        }
    }

    pub fn grid_size(&self) -> usize {
        match &self.analysis {
            Some(AnalysisSpec::Explicit(o)) => o.grid_size.unwrap_or(DEFAULT_GRID_SIZE),
            _ => DEFAULT_GRID_SIZE,
        }
    }

    pub fn formats(&self) -> Vec<Format> {
        self.outputs.as_ref().map(|o| o.formats.clone()).unwrap_or_else(default_formats)
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.outputs.as_ref().and_then(|o| o.dir.clone())
    }
}

impl OperatorSpec {
    pub fn is_linear(&self) -> bool {
        !matches!(self, OperatorSpec::Named { name: NamedOperator::CubicSaddle, .. })
    }
}

/// SHA-256 of the raw config text, hex encoded.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_operator_kind() {
        for op in [
            r#"{"kind": "spectrum", "eigenvalues": [[-1, 0], [0.5, 2]], "seed": 3}"#,
            r#"{"kind": "matrix", "entries": [[0, 1], [-1, 0]]}"#,
            r#"{"kind": "named", "name": "damped_rotation", "a": 0.1, "b": 1}"#,
            r#"{"kind": "named", "name": "cubic_saddle"}"#,
        ] {
            let text = format!(r#"{{"operator": {op}}}"#);
            ExperimentConfig::from_json(&text).unwrap();
        }
    }

    #[test]
    fn analysis_accepts_keyword_or_override() {
        let c = ExperimentConfig::from_json(
            r#"{"operator": {"kind": "named", "name": "rotation"}, "analysis": "certified"}"#,
        )
        .unwrap();
        assert_eq!(c.analysis, Some(AnalysisSpec::Certified(Certified::Certified)));
        let c = ExperimentConfig::from_json(
            r#"{"operator": {"kind": "named", "name": "rotation"}, "analysis": {"mu": 0.5, "L": 2, "grid_size": 7}}"#,
        )
        .unwrap();
        assert_eq!(c.grid_size(), 7);
        assert_eq!(c.gamma_max(), DEFAULT_GAMMA_MAX);
    }

    #[test]
    fn certified_needs_linear_operator() {
        let err = ExperimentConfig::from_json(
            r#"{"operator": {"kind": "named", "name": "cubic_saddle"}, "analysis": "certified"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("linear"));
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let text = "{\n  \"operator\": {\"kind\": \"named\", \"name\": \"rotation\"},\n  \"solver\": {\"gamma\": \"fast\", \"max_iters\": 3}\n}";
        let msg = ExperimentConfig::from_json(text).unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("solver.gamma"), "{msg}");
    }

    #[test]
    fn rejects_unknown_fields_and_missing_params() {
        assert!(ExperimentConfig::from_json(r#"{"operator": {"kind": "named", "name": "rotation"}, "extra": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"operator": {"kind": "named", "name": "damped_rotation", "a": 0.1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"operator": {"kind": "named", "name": "rotation"}, "solver": {"gamma": -1, "max_iters": 3}}"#).is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
