//! Clipped per-token surrogate loss with KL penalty, and the parameter
//! update.

use serde::{Deserialize, Serialize};

use crate::agent::PlannerParams;

use super::reward::kl_value;
use super::RlError;

/// Optimization hyperparameters. The defaults are this artifact's choices;
/// all are configurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrpoConfig {
    /// Clip range epsilon for the per-token ratio.
    pub clip_epsilon: f64,
    /// KL penalty coefficient beta.
    pub kl_beta: f64,
    /// Candidate plans sampled per labeled step.
    pub group_size: usize,
    /// Step size for parameter updates.
    pub learning_rate: f64,
    /// Below this reward std a group is degenerate and skipped.
    pub std_epsilon: f64,
    /// Optimizer passes over each rollout batch.
    pub epochs: u32,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        GrpoConfig {
            clip_epsilon: 0.2,
            kl_beta: 0.01,
            group_size: 8,
            learning_rate: 0.5,
            std_epsilon: 1e-8,
            epochs: 1,
        }
    }
}

/// One decision token's evaluation under the current and reference policies.
#[derive(Debug, Clone)]
pub struct TokenEval {
    pub prob_theta: f64,
    pub prob_ref: f64,
    /// Gradient of `ln prob_theta` with respect to theta.
    pub grad_log_theta: Vec<f64>,
}

/// One candidate plan's tokens, paired across policies by construction.
#[derive(Debug, Clone)]
pub struct CandidateEval {
    pub tokens: Vec<TokenEval>,
}

#[derive(Debug, Clone)]
pub struct GrpoLossOutput {
    pub loss: f64,
    pub grad: Vec<f64>,
    /// Mean per-token KL estimate across the group.
    pub kl_mean: f64,
    /// Fraction of tokens whose ratio left the clip band.
    pub clip_fraction: f64,
}

/// The group loss
/// `-(1/G) sum_i (1/|p_i|) sum_t [ min(r_t A_i, clip(r_t) A_i) - beta KL_t ]`
/// with per-token ratios `r_t = p_theta(t) / p_ref(t)`, plus its gradient.
/// Gradients flow through tokens whose unclipped branch is active; clipped
/// branches are constants.
pub fn grpo_loss(
    candidates: &[CandidateEval],
    advantages: &[f64],
    config: &GrpoConfig,
) -> Result<GrpoLossOutput, RlError> {
    let g = candidates.len();
    if g < 2 {
        return Err(RlError::GroupTooSmall(g));
    }
    if advantages.len() != g {
        return Err(RlError::LengthMismatch {
            advantages: advantages.len(),
            candidates: g,
        });
    }
    let dim = candidates
        .iter()
        .flat_map(|c| c.tokens.first())
        .map(|t| t.grad_log_theta.len())
        .next()
        .unwrap_or(0);

    let lo = 1.0 - config.clip_epsilon;
    let hi = 1.0 + config.clip_epsilon;
    let mut objective = 0.0;
    let mut grad_objective = vec![0.0; dim];
    let mut kl_sum = 0.0;
    let mut clipped = 0usize;
    let mut token_count = 0usize;

    for (i, candidate) in candidates.iter().enumerate() {
        let n_tokens = candidate.tokens.len();
        if n_tokens == 0 {
            return Err(RlError::EmptyCandidate { candidate: i });
        }
        let advantage = advantages[i];
        let weight = 1.0 / (g as f64 * n_tokens as f64);
        for token in &candidate.tokens {
            if token.prob_theta <= 0.0 || token.prob_ref <= 0.0 {
                return Err(RlError::NonPositiveProbability {
                    theta: token.prob_theta,
                    reference: token.prob_ref,
                });
            }
            if token.grad_log_theta.len() != dim {
                return Err(RlError::DimensionMismatch {
                    expected: dim,
                    got: token.grad_log_theta.len(),
                });
            }
            let ratio = token.prob_theta / token.prob_ref;
            let unclipped = ratio * advantage;
            let clipped_term = ratio.clamp(lo, hi) * advantage;
            let surrogate = unclipped.min(clipped_term);
            let kl = kl_value(token.prob_theta, token.prob_ref)?;
            objective += weight * (surrogate - config.kl_beta * kl);
            kl_sum += kl;
            if ratio < lo || ratio > hi {
                clipped += 1;
            }
            token_count += 1;

            // d(ratio * A)/dtheta = A * ratio * grad_log; zero when the
            // clipped branch is strictly active.
            let unclipped_active = unclipped <= clipped_term;
            let u = token.prob_ref / token.prob_theta;
            for (go, gl) in grad_objective.iter_mut().zip(&token.grad_log_theta) {
                let mut d = 0.0;
                if unclipped_active {
                    d += advantage * ratio * gl;
                }
                // d KL/dtheta = (1 - u) grad_log
                d -= config.kl_beta * (1.0 - u) * gl;
                *go += weight * d;
            }
        }
    }

    Ok(GrpoLossOutput {
        loss: -objective,
        grad: grad_objective.iter().map(|g| -g).collect(),
        kl_mean: kl_sum / token_count as f64,
        clip_fraction: clipped as f64 / token_count as f64,
    })
}

/// One gradient-descent step: `theta' = theta - lr * grad`.
pub fn sgd_step(
    params: &PlannerParams,
    grad: &[f64],
    learning_rate: f64,
) -> Result<PlannerParams, RlError> {
    if grad.len() != params.theta.len() {
        return Err(RlError::DimensionMismatch {
            expected: params.theta.len(),
            got: grad.len(),
        });
    }
    if let Some(idx) = grad.iter().position(|g| !g.is_finite()) {
        return Err(RlError::NonFiniteGradient(idx));
    }
    let mut next = params.clone();
    for (w, g) in next.theta.iter_mut().zip(grad) {
        *w -= learning_rate * g;
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A synthetic softmax micro-policy for loss tests: each position has a
    /// feature matrix, probabilities are softmax(features . theta), and one
    /// row is the chosen token.
    struct MicroPolicy {
        /// positions -> token feature rows
        positions: Vec<Vec<Vec<f64>>>,
        chosen: Vec<usize>,
    }

    impl MicroPolicy {
        fn random(rng: &mut ChaCha8Rng, dim: usize) -> Self {
            let n_positions = rng.gen_range(1..=3);
            let positions: Vec<Vec<Vec<f64>>> = (0..n_positions)
                .map(|_| {
                    let tokens = rng.gen_range(2..=5);
                    (0..tokens)
                        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .collect()
                })
                .collect();
            let chosen = positions
                .iter()
                .map(|rows| rng.gen_range(0..rows.len()))
                .collect();
            MicroPolicy { positions, chosen }
        }

        fn token_probs_and_grads(&self, theta: &[f64]) -> Vec<(f64, Vec<f64>)> {
            self.positions
                .iter()
                .zip(&self.chosen)
                .map(|(rows, &c)| {
                    let logits: Vec<f64> =
                        rows.iter().map(|phi| dot(phi, theta)).collect();
                    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
                    let z: f64 = exps.iter().sum();
                    let probs: Vec<f64> = exps.iter().map(|e| e / z).collect();
                    let mut grad = rows[c].clone();
                    for (d, g) in grad.iter_mut().enumerate() {
                        let expected: f64 =
                            rows.iter().zip(&probs).map(|(phi, p)| p * phi[d]).sum();
                        *g -= expected;
                    }
                    (probs[c], grad)
                })
                .collect()
        }
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn build_candidates(
        policies: &[MicroPolicy],
        theta: &[f64],
        theta_ref: &[f64],
    ) -> Vec<CandidateEval> {
        policies
            .iter()
            .map(|p| {
                let cur = p.token_probs_and_grads(theta);
                let reference = p.token_probs_and_grads(theta_ref);
                CandidateEval {
                    tokens: cur
                        .into_iter()
                        .zip(reference)
                        .map(|((prob_theta, grad_log_theta), (prob_ref, _))| TokenEval {
                            prob_theta,
                            prob_ref,
                            grad_log_theta,
                        })
                        .collect(),
                }
            })
            .collect()
    }

    #[test]
    fn ratios_of_one_reduce_to_mean_advantage() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dim = 4;
        let policies: Vec<MicroPolicy> =
            (0..4).map(|_| MicroPolicy::random(&mut rng, dim)).collect();
        let theta: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let candidates = build_candidates(&policies, &theta, &theta);
        let advantages = vec![0.5, -0.5, 1.5, -1.5];
        let out = grpo_loss(&candidates, &advantages, &GrpoConfig::default()).unwrap();
        let expected = -advantages.iter().sum::<f64>() / 4.0;
        assert!((out.loss - expected).abs() < 1e-12);
        assert!(out.kl_mean.abs() < 1e-15);
        assert_eq!(out.clip_fraction, 0.0);
    }

    #[test]
    fn zero_advantages_at_reference_give_zero_loss_and_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let dim = 4;
        let policies: Vec<MicroPolicy> =
            (0..3).map(|_| MicroPolicy::random(&mut rng, dim)).collect();
        let theta: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let candidates = build_candidates(&policies, &theta, &theta);
        let out = grpo_loss(&candidates, &[0.0; 3], &GrpoConfig::default()).unwrap();
        assert_eq!(out.loss, 0.0);
        assert!(out.grad.iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn clipping_inert_case_equals_unclipped_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let dim = 5;
        for _ in 0..20 {
            let policies: Vec<MicroPolicy> =
                (0..4).map(|_| MicroPolicy::random(&mut rng, dim)).collect();
            let theta_ref: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // A tiny perturbation keeps every ratio well inside the band.
            let theta: Vec<f64> = theta_ref.iter().map(|w| w + rng.gen_range(-0.01..0.01)).collect();
            let candidates = build_candidates(&policies, &theta, &theta_ref);
            let advantages: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cfg = GrpoConfig::default();
            let out = grpo_loss(&candidates, &advantages, &cfg).unwrap();
            assert_eq!(out.clip_fraction, 0.0);

            // Unclipped objective computed independently.
            let mut objective = 0.0;
            for (cand, adv) in candidates.iter().zip(&advantages) {
                let mut inner = 0.0;
                for t in &cand.tokens {
                    let ratio = t.prob_theta / t.prob_ref;
                    let u = t.prob_ref / t.prob_theta;
                    inner += ratio * adv - cfg.kl_beta * (u - 1.0 - u.ln());
                }
                objective += inner / cand.tokens.len() as f64;
            }
            let unclipped_loss = -objective / candidates.len() as f64;
            assert!(
                (out.loss - unclipped_loss).abs() <= 1e-12,
                "clip-inert mismatch: {} vs {unclipped_loss}",
                out.loss
            );
        }
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let dim = 4;
        let h = 1e-5;
        let mut instances = 0;
        while instances < 100 {
            let group = rng.gen_range(2..=5);
            let policies: Vec<MicroPolicy> = (0..group)
                .map(|_| MicroPolicy::random(&mut rng, dim))
                .collect();
            let theta_ref: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let theta: Vec<f64> = theta_ref
                .iter()
                .map(|w| w + rng.gen_range(-0.4..0.4))
                .collect();
            let advantages: Vec<f64> = (0..group).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cfg = GrpoConfig::default();

            // Skip instances that straddle a clip boundary or a min-branch
            // tie: the objective is non-differentiable there.
            let candidates = build_candidates(&policies, &theta, &theta_ref);
            let near_boundary = candidates.iter().any(|c| {
                c.tokens.iter().any(|t| {
                    let ratio = t.prob_theta / t.prob_ref;
                    (ratio - (1.0 - cfg.clip_epsilon)).abs() < 1e-3
                        || (ratio - (1.0 + cfg.clip_epsilon)).abs() < 1e-3
                })
            });
            if near_boundary {
                continue;
            }
            instances += 1;

            let analytic = grpo_loss(&candidates, &advantages, &cfg).unwrap().grad;
            for d in 0..dim {
                let mut up = theta.clone();
                let mut dn = theta.clone();
                up[d] += h;
                dn[d] -= h;
                let loss_up = grpo_loss(&build_candidates(&policies, &up, &theta_ref), &advantages, &cfg)
                    .unwrap()
                    .loss;
                let loss_dn = grpo_loss(&build_candidates(&policies, &dn, &theta_ref), &advantages, &cfg)
                    .unwrap()
                    .loss;
                let fd = (loss_up - loss_dn) / (2.0 * h);
                let denom = analytic[d].abs().max(fd.abs()).max(1.0);
                assert!(
                    (analytic[d] - fd).abs() / denom <= 1e-5,
                    "instance {instances} dim {d}: analytic {} vs fd {fd}",
                    analytic[d]
                );
            }
        }
    }

    #[test]
    fn sgd_step_basics() {
        let params = PlannerParams::base_init();
        let zero = vec![0.0; params.theta.len()];
        assert_eq!(sgd_step(&params, &zero, 0.1).unwrap(), params);
        let grad = vec![1.0; params.theta.len()];
        assert_eq!(sgd_step(&params, &grad, 0.0).unwrap(), params);
        let stepped = sgd_step(&params, &grad, 0.25).unwrap();
        assert!((stepped.theta[0] - (params.theta[0] - 0.25)).abs() < 1e-15);
        let mut bad = grad.clone();
        bad[3] = f64::NAN;
        assert!(matches!(
            sgd_step(&params, &bad, 0.1),
            Err(RlError::NonFiniteGradient(3))
        ));
        assert!(matches!(
            sgd_step(&params, &grad[1..], 0.1),
            Err(RlError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let candidates = vec![
            CandidateEval {
                tokens: vec![TokenEval {
                    prob_theta: 0.5,
                    prob_ref: 0.5,
                    grad_log_theta: vec![0.0],
                }],
            },
            CandidateEval {
                tokens: vec![TokenEval {
                    prob_theta: 0.5,
                    prob_ref: 0.5,
                    grad_log_theta: vec![0.0],
                }],
            },
        ];
        assert!(matches!(
            grpo_loss(&candidates, &[0.0], &GrpoConfig::default()),
            Err(RlError::LengthMismatch { .. })
        ));
    }
}
