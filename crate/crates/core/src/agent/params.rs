//! Planner parameters and versioned checkpoints.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{FEATURE_DIM, FEATURE_MAP_VERSION};
use super::AgentError;

/// The planner's weight vector, one weight per feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub feature_map_version: String,
    pub theta: Vec<f64>,
}

impl PlannerParams {
    pub fn zeros() -> Self {
        PlannerParams {
            feature_map_version: FEATURE_MAP_VERSION.to_string(),
            theta: vec![0.0; FEATURE_DIM],
        }
    }

    /// The untrained starting point: a mild preference for widgets and
    /// payloads the instruction mentions, nothing else. Weak enough that
    /// most episodes fail, strong enough to produce occasional successes to
    /// learn from.
    pub fn base_init() -> Self {
        let mut p = Self::zeros();
        p.theta[12] = 1.2; // instruction overlap
        p.theta[13] = 0.6; // named in instruction
        p
    }

    pub fn from_theta(theta: Vec<f64>) -> Result<Self, AgentError> {
        let p = PlannerParams {
            feature_map_version: FEATURE_MAP_VERSION.to_string(),
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if self.feature_map_version != FEATURE_MAP_VERSION {
            return Err(AgentError::VersionMismatch {
                expected: FEATURE_MAP_VERSION.to_string(),
                found: self.feature_map_version.clone(),
            });
        }
        if self.theta.len() != FEATURE_DIM {
            return Err(AgentError::DimensionMismatch {
                expected: FEATURE_DIM,
                got: self.theta.len(),
            });
        }
        if self.theta.iter().any(|w| !w.is_finite()) {
            return Err(AgentError::NonFiniteParams);
        }
        Ok(())
    }
}

/// Write a checkpoint file (JSON with an embedded feature-map version).
pub fn save_checkpoint(params: &PlannerParams, path: &Path) -> Result<(), AgentError> {
    params.validate()?;
    let text = serde_json::to_string_pretty(params)
        .map_err(|e| AgentError::CheckpointIo(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| AgentError::CheckpointIo(e.to_string()))
}

/// Load a checkpoint, refusing mismatched feature-map versions.
pub fn load_checkpoint(path: &Path) -> Result<PlannerParams, AgentError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| AgentError::CheckpointIo(e.to_string()))?;
    let params: PlannerParams =
        serde_json::from_str(&text).map_err(|e| AgentError::CheckpointIo(e.to_string()))?;
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        let params = PlannerParams::base_init();
        save_checkpoint(&params, &path).unwrap();
        assert_eq!(load_checkpoint(&path).unwrap(), params);
    }

    #[test]
    fn version_mismatch_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        let mut params = PlannerParams::zeros();
        params.feature_map_version = "fm0-d3".into();
        let text = serde_json::to_string(&params).unwrap();
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(AgentError::VersionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_params_are_refused() {
        let mut params = PlannerParams::zeros();
        params.theta[0] = f64::NAN;
        assert!(matches!(params.validate(), Err(AgentError::NonFiniteParams)));
    }
}
