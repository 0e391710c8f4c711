//! Trajectory judging.
//!
//! A judge re-renders an episode at its own observation resolution and rules
//! on three signals: overall correctness, redundant (view-preserving) steps,
//! and the first step after which the goal stopped being reachable within
//! the remaining budget. On top of that deterministic rendered-information
//! verdict sits seeded label noise (false-positive / false-negative rates),
//! standing in for imperfect learned judges. Voting, multi-resolution
//! scheduling, and ensembling trade recall for precision.

mod report;
mod trajectory;
mod voting;

pub use report::{JudgeReport, JudgeReportRow};
pub use trajectory::{
    apply_noise, is_clean, judge_trajectory, judge_with_nonce, label_positive_actions,
    pre_noise_verdict, JudgeProfile,
};
pub use voting::{precision_recall, run_schedule, unanimous_vote, ScheduleOutcome, VoteSchedule};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The three judge signals. Step indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub correctness: bool,
    /// Strictly increasing step indices whose action left the rendered view
    /// unchanged.
    pub redundant: Vec<u32>,
    pub first_error_step: Option<u32>,
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
    #[error("cannot vote over an empty verdict list")]
    EmptyVerdictList,
    #[error("schedule has {votes} votes but {resolutions} resolutions")]
    ScheduleShape { votes: usize, resolutions: usize },
    #[error("schedule has an empty ensemble")]
    EmptyEnsemble,
    #[error("unknown judge profile '{0}'")]
    UnknownProfile(String),
    #[error("predictions ({predicted}) and truth ({truth}) differ in length")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("report io: {0}")]
    ReportIo(String),
}
