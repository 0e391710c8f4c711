//! Vote aggregation, multi-resolution schedules, and the precision/recall
//! metric.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::SoftwareModel;
use crate::geometry::Resolution;
use crate::rollout::Episode;

use super::trajectory::{apply_noise, pre_noise_verdict, JudgeProfile};
use super::{JudgeError, JudgeVerdict};

/// A voting plan: `votes` rounds at the given resolutions (mixtures allowed),
/// each round querying every profile in `ensemble`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteSchedule {
    pub votes: usize,
    pub resolutions: Vec<Resolution>,
    pub ensemble: Vec<String>,
}

impl VoteSchedule {
    /// `votes` rounds, all at one resolution, one judge.
    pub fn uniform(votes: usize, resolution: Resolution, profile_id: &str) -> Self {
        VoteSchedule {
            votes,
            resolutions: vec![resolution; votes],
            ensemble: vec![profile_id.to_string()],
        }
    }
}

/// Unanimity: success only if every vote says success. Redundant steps union;
/// earliest first-error wins.
pub fn unanimous_vote(verdicts: &[JudgeVerdict]) -> Result<JudgeVerdict, JudgeError> {
    if verdicts.is_empty() {
        return Err(JudgeError::EmptyVerdictList);
    }
    let correctness = verdicts.iter().all(|v| v.correctness);
    let mut redundant: Vec<u32> = verdicts.iter().flat_map(|v| v.redundant.clone()).collect();
    redundant.sort_unstable();
    redundant.dedup();
    let first_error_step = verdicts.iter().filter_map(|v| v.first_error_step).min();
    Ok(JudgeVerdict {
        correctness,
        redundant,
        first_error_step,
    })
}

/// The aggregate verdict plus how much work the early exit saved.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome {
    pub verdict: JudgeVerdict,
    pub rounds_executed: usize,
    pub votes_cast: usize,
}

/// Run a vote schedule: rounds execute in ascending resolution order, each
/// round queries every ensemble profile at the round's resolution with an
/// independent noise draw, and the first failed round short-circuits the
/// rest (false is absorbing under unanimity).
pub fn run_schedule(
    episode: &Episode,
    model: &SoftwareModel,
    schedule: &VoteSchedule,
    profiles: &BTreeMap<String, JudgeProfile>,
) -> Result<ScheduleOutcome, JudgeError> {
    if schedule.votes == 0 || schedule.votes != schedule.resolutions.len() {
        return Err(JudgeError::ScheduleShape {
            votes: schedule.votes,
            resolutions: schedule.resolutions.len(),
        });
    }
    if schedule.ensemble.is_empty() {
        return Err(JudgeError::EmptyEnsemble);
    }
    let ensemble: Vec<&JudgeProfile> = schedule
        .ensemble
        .iter()
        .map(|id| {
            profiles
                .get(id)
                .ok_or_else(|| JudgeError::UnknownProfile(id.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut rounds = schedule.resolutions.clone();
    rounds.sort_by_key(|r| (r.w, r.h));

    let episode_key = episode.identity_key();
    let mut pre_cache: BTreeMap<Resolution, JudgeVerdict> = BTreeMap::new();
    let mut verdicts = Vec::new();
    let mut rounds_executed = 0;
    for (round_idx, resolution) in rounds.iter().enumerate() {
        if !pre_cache.contains_key(resolution) {
            let pre = pre_noise_verdict(episode, model, *resolution)?;
            pre_cache.insert(*resolution, pre);
        }
        let pre = &pre_cache[resolution];
        let mut round_failed = false;
        for profile in &ensemble {
            let v = apply_noise(pre, profile, episode_key, round_idx as u64);
            round_failed |= !v.correctness;
            verdicts.push(v);
        }
        rounds_executed += 1;
        if round_failed {
            break;
        }
    }
    Ok(ScheduleOutcome {
        verdict: unanimous_vote(&verdicts)?,
        rounds_executed,
        votes_cast: verdicts.len(),
    })
}

/// Precision and recall over the success class. Precision is absent with no
/// positive predictions, recall with no positive truth.
pub fn precision_recall(
    predicted: &[bool],
    truth: &[bool],
) -> Result<(Option<f64>, Option<f64>), JudgeError> {
    if predicted.len() != truth.len() {
        return Err(JudgeError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
    let recall = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
    Ok((precision, recall))
}
