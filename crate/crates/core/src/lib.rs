//! Desk-scale planner–executor GUI agent training.
//!
//! The crate simulates small GUI "software" worlds, runs a trainable
//! stochastic planner against a fixed noisy-grounding executor, scores
//! candidate plans with a group-relative policy objective, judges finished
//! trajectories with configurable noisy judges, and persists everything to
//! append-only run logs.
//!
//! Modules map onto the moving parts:
//!
//! - [`env`] — simulated software models, rendering, goals, task generation
//! - [`agent`] — planner policy (features, distribution, sampling, gradients)
//!   and the fixed executor
//! - [`rlcore`] — rewards, group advantages, clipped loss, parameter updates
//! - [`judge`] — trajectory verdicts, voting, schedules, precision/recall
//! - [`store`] — trajectory logs and run manifests
//! - [`rollout`] — the episode loop tying env + agent together

pub mod action;
pub mod agent;
pub mod env;
pub mod geometry;
pub mod judge;
pub mod plan;
pub mod rlcore;
pub mod rollout;
pub mod seeds;
pub mod store;
