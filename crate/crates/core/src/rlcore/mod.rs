//! Group-relative policy optimization over planner parameters.
//!
//! The composite reward scores a candidate action against the labeled
//! positive action: a binary term for matching the action type plus a
//! normalized parameter-distance term (L1 for click points, IoU for drag
//! boxes, edit similarity for text). Rewards are standardized within each
//! sampled group into advantages, which drive a clipped per-token surrogate
//! with a KL penalty toward the reference policy. Only planner parameters
//! ever change here; the executor is never touched.

mod loss;
mod metrics;
mod reward;

pub use loss::{grpo_loss, sgd_step, CandidateEval, GrpoConfig, GrpoLossOutput, TokenEval};
pub use metrics::{append_metrics, read_metrics, MetricsRecord};
pub use reward::{action_reward, dist_reward, edit_distance, group_advantages, kl_value};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RlError {
    #[error("group must have at least 2 members, got {0}")]
    GroupTooSmall(usize),
    #[error("probabilities must be positive, got theta={theta}, ref={reference}")]
    NonPositiveProbability { theta: f64, reference: f64 },
    #[error("advantages ({advantages}) and candidates ({candidates}) disagree in length")]
    LengthMismatch { advantages: usize, candidates: usize },
    #[error("candidate {candidate} has no tokens")]
    EmptyCandidate { candidate: usize },
    #[error("gradient dimension {got} does not match {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient entry at dimension {0}")]
    NonFiniteGradient(usize),
    #[error("metrics io: {0}")]
    MetricsIo(String),
}
