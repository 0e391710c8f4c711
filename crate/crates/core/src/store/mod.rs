//! Append-only run storage.
//!
//! A run is a directory holding one line-delimited log: the first line is
//! the run manifest, followed by task, trajectory, and verdict records, each
//! a self-describing JSON object. Writers flush per record, so a crash can
//! cost at most the final partial line; readers quarantine unparseable lines
//! and keep going. Closing a run appends a final manifest with the counts.
//!
//! Observations are stored as digests plus the seeds and resolution needed
//! to regenerate them; `verify` replays every trajectory and recomputes the
//! digests.

pub(crate) mod digest;
mod run;

pub use digest::{digest_json, digest_key64, digest_observation, digest_state, CODE_VERSION};
pub use run::{
    filter_clean, verify_run, LabeledTrajectory, Record, RunCounts, RunManifest, RunReader,
    RunWriter, VerdictSource, VerifyReport,
};

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::geometry::Resolution;
use crate::plan::Plan;

use thiserror::Error;

/// Storage format version, embedded in manifests.
pub const FORMAT_VERSION: u32 = 1;

/// The seeds that fully determine an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectorySeeds {
    pub policy: u64,
    pub executor: u64,
    pub env: u64,
}

/// One logged step: the pre-action observation digest plus the plan and the
/// grounded action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub obs_digest: String,
    pub plan: Plan,
    pub action: Action,
}

/// A persisted episode. Observations are digests; states regenerate by
/// replaying the actions through the deterministic simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub task_id: String,
    pub software: String,
    pub seeds: TrajectorySeeds,
    pub planner_resolution: Resolution,
    pub steps: Vec<StepRecord>,
    pub final_state_digest: String,
    pub oracle_success: bool,
}

impl Trajectory {
    pub fn step_count(&self) -> u32 {
        self.steps.len() as u32
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("run '{0}' already exists")]
    RunExists(String),
    #[error("run '{0}' not found")]
    RunNotFound(String),
    #[error("run '{0}' is closed")]
    RunClosed(String),
    #[error("run log has no manifest line")]
    MissingManifest,
    #[error("verdicts missing for trajectory records {0:?}")]
    MissingVerdicts(Vec<u64>),
    #[error("store io: {0}")]
    Io(String),
}
