//! Composite action reward, group advantages, and the KL estimator.

use crate::action::Action;
use crate::geometry::Resolution;

use super::RlError;

/// Levenshtein distance; O(len_a * len_b), fine at GUI payload sizes.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn text_similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - edit_distance(a, b) as f64 / max_len as f64
}

/// Normalized parameter-similarity in [0, 1] between two actions of the
/// same kind: L1 distance over `native_w + native_h` for points, mean IoU of
/// source/destination boxes for drags, edit similarity for text, 1 for
/// finish.
///
/// Panics if the kinds differ; [`action_reward`] is the gate.
pub fn dist_reward(candidate: &Action, positive: &Action, screen: Resolution) -> f64 {
    assert_eq!(
        candidate.kind(),
        positive.kind(),
        "dist_reward requires matching action kinds"
    );
    match (candidate, positive) {
        (Action::Click { point: a }, Action::Click { point: b })
        | (Action::DoubleClick { point: a }, Action::DoubleClick { point: b }) => {
            let norm = f64::from(screen.w) + f64::from(screen.h);
            1.0 - (a.l1_distance(b) as f64 / norm).min(1.0)
        }
        (Action::Drag { source: s1, dest: d1 }, Action::Drag { source: s2, dest: d2 }) => {
            (s1.iou(s2) + d1.iou(d2)) / 2.0
        }
        (Action::Type { text: a }, Action::Type { text: b })
        | (Action::Hotkey { keys: a }, Action::Hotkey { keys: b }) => text_similarity(a, b),
        (Action::Finish, Action::Finish) => 1.0,
        _ => unreachable!("kinds checked above"),
    }
}

/// The composite reward in [0, 2]: a type-match indicator plus the distance
/// term. A type mismatch scores 0 outright (the distance term is not defined
/// across kinds).
pub fn action_reward(candidate: &Action, positive: &Action, screen: Resolution) -> f64 {
    if candidate.kind() != positive.kind() {
        return 0.0;
    }
    1.0 + dist_reward(candidate, positive, screen)
}

/// Standardize rewards within a group: `(r - mean) / std` with the
/// population standard deviation (divisor G). Groups with std below
/// `std_epsilon` carry no signal and map to all-zero advantages.
pub fn group_advantages(rewards: &[f64], std_epsilon: f64) -> Result<Vec<f64>, RlError> {
    let g = rewards.len();
    if g < 2 {
        return Err(RlError::GroupTooSmall(g));
    }
    let mean = rewards.iter().sum::<f64>() / g as f64;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / g as f64;
    let std = var.sqrt();
    if std < std_epsilon {
        return Ok(vec![0.0; g]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}

/// The non-negative KL estimator `u - 1 - ln(u)` with `u = p_ref / p_theta`.
/// Zero exactly when the probabilities agree.
pub fn kl_value(prob_theta: f64, prob_ref: f64) -> Result<f64, RlError> {
    if prob_theta <= 0.0 || prob_ref <= 0.0 {
        return Err(RlError::NonPositiveProbability {
            theta: prob_theta,
            reference: prob_ref,
        });
    }
    let u = prob_ref / prob_theta;
    Ok(u - 1.0 - u.ln())
}
