//! Per-iteration training metrics, appended as one JSON line each.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub iteration: u32,
    pub loss: f64,
    pub mean_reward: f64,
    pub kl_mean: f64,
    pub clip_fraction: f64,
    pub advantage_std: f64,
    pub clean_trajectories: u64,
    pub labeled_steps: u64,
}

pub fn append_metrics(path: &Path, record: &MetricsRecord) -> Result<(), RlError> {
    let line = serde_json::to_string(record).map_err(|e| RlError::MetricsIo(e.to_string()))?;
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| RlError::MetricsIo(e.to_string()))?;
    writeln!(file, "{line}").map_err(|e| RlError::MetricsIo(e.to_string()))?;
    file.flush().map_err(|e| RlError::MetricsIo(e.to_string()))
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRecord>, RlError> {
    let text = std::fs::read_to_string(path).map_err(|e| RlError::MetricsIo(e.to_string()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| RlError::MetricsIo(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.jsonl");
        let records = vec![
            MetricsRecord {
                iteration: 0,
                loss: -0.25,
                mean_reward: 1.1,
                kl_mean: 0.002,
                clip_fraction: 0.0,
                advantage_std: 1.0,
                clean_trajectories: 3,
                labeled_steps: 9,
            },
            MetricsRecord {
                iteration: 1,
                loss: -0.5,
                mean_reward: 1.4,
                kl_mean: 0.01,
                clip_fraction: 0.125,
                advantage_std: 1.0,
                clean_trajectories: 5,
                labeled_steps: 15,
            },
        ];
        for r in &records {
            append_metrics(&path, r).unwrap();
        }
        assert_eq!(read_metrics(&path).unwrap(), records);
    }
}
