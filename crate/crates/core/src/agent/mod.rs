//! The trainable planner and the fixed executor.
//!
//! The planner is a linear softmax policy over hand-built features of the
//! (task, history, observation, candidate-token) tuple. A plan is produced
//! autoregressively: action type, then target, then argument, each position a
//! softmax over its legal token set. The executor grounds a plan into a
//! concrete action with configurable jitter and mis-grounding noise; it has
//! no trainable state and never changes during learning.

mod executor;
mod features;
mod params;
mod planner;

pub use executor::{execute, ExecutionOutcome, GroundingNoise};
pub use features::{features, payload_candidates, FEATURE_DIM, FEATURE_MAP_VERSION, HOTKEY_VOCABULARY};
pub use params::{load_checkpoint, save_checkpoint, PlannerParams};
pub use planner::{
    conditional_distribution, enumerate_plans, grad_logprob, plan_eval, sample_group, sample_plan,
    History, HistoryStep, PlanEval, SampledPlan, StepContext,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no legal tokens at decision position {position}")]
    DegenerateObservation { position: usize },
    #[error("plan is not representable in this context: {0}")]
    IllegalPlan(String),
    #[error("group size must be at least 2, got {0}")]
    GroupTooSmall(usize),
    #[error("planner parameters contain non-finite entries")]
    NonFiniteParams,
    #[error("expected {expected} parameter dimensions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("checkpoint feature-map version '{found}' does not match '{expected}'")]
    VersionMismatch { expected: String, found: String },
    #[error("checkpoint io: {0}")]
    CheckpointIo(String),
}
