//! The fixed grounding executor.
//!
//! Translates a plan into a parameterized action against the current
//! observation: clicks land at the target's bbox center plus rounded Gaussian
//! jitter, and with probability `p_miss` the target is swapped for another
//! visible widget of the same kind. Text passes through verbatim. The
//! executor holds no trainable state; everything is a pure function of
//! (plan, observation, noise, seed).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, ActionKind};
use crate::env::{Observation, WidgetView};
use crate::geometry::Point;
use crate::plan::Plan;

/// Executor noise model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroundingNoise {
    /// Standard deviation of click jitter in native pixels.
    pub sigma: f64,
    /// Probability of grounding the target onto another same-kind widget.
    pub p_miss: f64,
}

impl Default for GroundingNoise {
    fn default() -> Self {
        GroundingNoise {
            sigma: 2.0,
            p_miss: 0.02,
        }
    }
}

impl GroundingNoise {
    pub const NONE: GroundingNoise = GroundingNoise {
        sigma: 0.0,
        p_miss: 0.0,
    };
}

/// The grounded action plus a flag for unresolvable targets. A grounding
/// failure yields a harmless no-op action (an unbound hotkey) rather than an
/// abort, so episodes always proceed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionOutcome {
    pub action: Action,
    pub grounding_failure: bool,
}

fn noop_failure() -> ExecutionOutcome {
    ExecutionOutcome {
        action: Action::Hotkey { keys: String::new() },
        grounding_failure: true,
    }
}

/// Standard normal pair via Box-Muller, from two uniform draws.
fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    (r * angle.cos(), r * angle.sin())
}

/// Resolve the plan's target view, applying mis-grounding noise. Consumes a
/// fixed number of RNG draws regardless of `p_miss` so streams stay aligned.
fn resolve_target<'a>(
    obs: &'a Observation,
    target: &str,
    noise: &GroundingNoise,
    rng: &mut ChaCha8Rng,
) -> Option<&'a WidgetView> {
    let view = obs.view(target)?;
    let u: f64 = rng.gen();
    if u < noise.p_miss {
        let alternatives: Vec<&WidgetView> = obs
            .views
            .iter()
            .filter(|v| v.kind == view.kind && v.id != view.id)
            .collect();
        if !alternatives.is_empty() {
            let idx = rng.gen_range(0..alternatives.len());
            return Some(alternatives[idx]);
        }
    }
    Some(view)
}

fn jittered_center(view: &WidgetView, obs: &Observation, noise: &GroundingNoise, rng: &mut ChaCha8Rng) -> Point {
    let center = view.bbox.center();
    let (z0, z1) = gaussian_pair(rng);
    let x = center.x + (noise.sigma * z0).round() as i64;
    let y = center.y + (noise.sigma * z1).round() as i64;
    Point {
        x: x.clamp(0, i64::from(obs.resolution.w) - 1),
        y: y.clamp(0, i64::from(obs.resolution.h) - 1),
    }
}

/// Ground a plan into an action. Deterministic given the seed. The
/// observation should be rendered at the resolution actions are expressed
/// in (native, for the simulator).
pub fn execute(
    plan: &Plan,
    o_cur: &Observation,
    noise: &GroundingNoise,
    seed: u64,
) -> ExecutionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match plan.kind {
        ActionKind::Finish => ExecutionOutcome {
            action: Action::Finish,
            grounding_failure: false,
        },
        ActionKind::Type => ExecutionOutcome {
            action: Action::Type {
                text: plan.argument.clone(),
            },
            grounding_failure: false,
        },
        ActionKind::Hotkey => ExecutionOutcome {
            action: Action::Hotkey {
                keys: plan.argument.clone(),
            },
            grounding_failure: false,
        },
        ActionKind::Click | ActionKind::DoubleClick => {
            let Some(target) = plan.target.as_deref() else {
                return noop_failure();
            };
            let Some(view) = resolve_target(o_cur, target, noise, &mut rng) else {
                return noop_failure();
            };
            let point = jittered_center(view, o_cur, noise, &mut rng);
            let action = if plan.kind == ActionKind::Click {
                Action::Click { point }
            } else {
                Action::DoubleClick { point }
            };
            ExecutionOutcome {
                action,
                grounding_failure: false,
            }
        }
        ActionKind::Drag => {
            let Some(target) = plan.target.as_deref() else {
                return noop_failure();
            };
            let Some(source_view) = resolve_target(o_cur, target, noise, &mut rng) else {
                return noop_failure();
            };
            let Some(dest_view) = o_cur.view(&plan.argument) else {
                return noop_failure();
            };
            ExecutionOutcome {
                action: Action::Drag {
                    source: source_view.bbox,
                    dest: dest_view.bbox,
                },
                grounding_failure: false,
            }
        }
    }
}
