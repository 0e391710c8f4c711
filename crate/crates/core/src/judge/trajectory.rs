//! Single-judge verdicts: the deterministic rendered-information ruling plus
//! seeded label noise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionKind};
use crate::env::solver::{reachable, SearchLimits};
use crate::env::{
    render, GoalAtom, Observation, OrderedProgress, SoftwareModel, WorldState,
};
use crate::geometry::Resolution;
use crate::rollout::Episode;
use crate::seeds;

use super::{JudgeError, JudgeVerdict};

/// Reachability search cap for the error-step scan. Exhaustion counts as
/// unreachable; only failed trajectories ever reach this code path.
const ERROR_SCAN_STATE_CAP: usize = 4_000;

/// A simulated judge: an observation resolution plus label-noise rates.
/// Distinct ids draw independent noise streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeProfile {
    pub id: String,
    pub resolution: Resolution,
    /// P(report success | trajectory actually failed).
    pub false_positive: f64,
    /// P(report failure | trajectory actually succeeded).
    pub false_negative: f64,
    pub seed: u64,
}

impl JudgeProfile {
    /// A noiseless judge at the given resolution.
    pub fn perfect(id: &str, resolution: Resolution) -> Self {
        JudgeProfile {
            id: id.to_string(),
            resolution,
            false_positive: 0.0,
            false_negative: 0.0,
            seed: 0,
        }
    }
}

/// The clean-trajectory rule: correct, nothing redundant, no error step.
/// Only clean trajectories yield positive action labels.
pub fn is_clean(verdict: &JudgeVerdict) -> bool {
    verdict.correctness && verdict.redundant.is_empty() && verdict.first_error_step.is_none()
}

/// All actions labeled positive iff the verdict is clean.
pub fn label_positive_actions(episode: &Episode, verdict: &JudgeVerdict) -> Option<Vec<Action>> {
    is_clean(verdict).then(|| episode.actions.clone())
}

/// What the judge reconstructs from rendered views: last-known widget values
/// (blanked reads keep their previous belief), the visible screen, and the
/// visible focus.
fn update_belief(belief: &mut WorldState, obs: &Observation) {
    belief.screen = obs.screen.clone();
    let blanked = obs.colliding_ids();
    for view in &obs.views {
        if !blanked.contains(&view.id) {
            belief.values.insert(view.id.clone(), view.value.clone());
        }
        if view.focused {
            belief.focus = Some(view.id.clone());
        }
    }
}

/// The deterministic rendered-information verdict at one resolution.
///
/// - correctness: the goal evaluated on the final rendered view; atoms
///   touching blanked values are unverifiable and count unsatisfied, ordered
///   subgoals are tracked across the rendered history.
/// - redundant: 1-based steps whose action left the rendered view unchanged
///   (the terminating finish is exempt; it never changes anything).
/// - first_error_step: for failed trajectories, the earliest step after
///   which the goal is unreachable within the remaining budget, searching
///   from the judge's belief state.
pub fn pre_noise_verdict(
    episode: &Episode,
    model: &SoftwareModel,
    resolution: Resolution,
) -> Result<JudgeVerdict, JudgeError> {
    let views: Vec<Observation> = episode
        .states
        .iter()
        .map(|s| render(model, s, resolution))
        .collect::<Result<_, _>>()?;

    let mut redundant = Vec::new();
    for (k, action) in episode.actions.iter().enumerate() {
        if views[k] == views[k + 1] && action.kind() != ActionKind::Finish {
            redundant.push((k + 1) as u32);
        }
    }

    let goal = &episode.task.goal;
    let final_view = views.last().expect("episode has an initial view");
    let final_blanked = final_view.colliding_ids();
    let mut progress = OrderedProgress::start(goal);
    for view in &views {
        progress.advance_on_view(goal, view, &view.colliding_ids());
    }
    let plain_ok = goal.atoms.iter().all(|atom| match atom {
        GoalAtom::OrderedSubgoals { .. } => true,
        GoalAtom::WidgetValueEquals { .. }
        | GoalAtom::ScreenIs { .. }
        | GoalAtom::ToggleStateIs { .. } => simple_holds(atom, final_view, &final_blanked),
    });
    let correctness = plain_ok && progress.complete(goal);

    let first_error_step = if correctness {
        None
    } else {
        find_first_error(episode, model, &views)
    };

    Ok(JudgeVerdict {
        correctness,
        redundant,
        first_error_step,
    })
}

fn simple_holds(
    atom: &GoalAtom,
    view: &Observation,
    blanked: &std::collections::BTreeSet<String>,
) -> bool {
    match atom {
        GoalAtom::WidgetValueEquals { widget, value } => match view.view(widget) {
            Some(v) if !blanked.contains(widget) => &v.value == value,
            _ => false,
        },
        GoalAtom::ScreenIs { screen } => &view.screen == screen,
        GoalAtom::ToggleStateIs { widget, on } => match view.view(widget) {
            Some(v) if !blanked.contains(widget) => (v.value == "on") == *on,
            _ => false,
        },
        GoalAtom::OrderedSubgoals { .. } => true,
    }
}

fn find_first_error(
    episode: &Episode,
    model: &SoftwareModel,
    views: &[Observation],
) -> Option<u32> {
    let goal = &episode.task.goal;
    let budget_total = episode.task.max_steps;
    let mut belief = model.initial_state();
    update_belief(&mut belief, &views[0]);
    let mut progress = OrderedProgress::start(goal);
    progress.advance_on_view(goal, &views[0], &views[0].colliding_ids());

    for k in 1..views.len() {
        update_belief(&mut belief, &views[k]);
        progress.advance_on_view(goal, &views[k], &views[k].colliding_ids());
        let remaining = budget_total.saturating_sub(k as u32);
        let ok = reachable(
            model,
            &belief,
            goal,
            &progress,
            SearchLimits {
                max_depth: remaining,
                max_states: ERROR_SCAN_STATE_CAP,
            },
        );
        if !ok {
            return Some(k as u32);
        }
    }
    None
}

/// Flip the correctness bit with the profile's error rates, deterministically
/// in (episode identity, profile, nonce). Distinct profiles and nonces draw
/// independent streams; voting rounds pass their round index as the nonce.
pub fn apply_noise(
    verdict: &JudgeVerdict,
    profile: &JudgeProfile,
    episode_key: u64,
    nonce: u64,
) -> JudgeVerdict {
    let stream = seeds::mix(
        seeds::mix_str(profile.seed, &profile.id),
        seeds::mix(episode_key, nonce),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let u: f64 = rng.gen();
    let mut out = verdict.clone();
    if verdict.correctness {
        if u < profile.false_negative {
            out.correctness = false;
        }
    } else if u < profile.false_positive {
        out.correctness = true;
    }
    out
}

/// One judge, one vote round.
pub fn judge_with_nonce(
    episode: &Episode,
    model: &SoftwareModel,
    profile: &JudgeProfile,
    nonce: u64,
) -> Result<JudgeVerdict, JudgeError> {
    let pre = pre_noise_verdict(episode, model, profile.resolution)?;
    Ok(apply_noise(&pre, profile, episode.identity_key(), nonce))
}

/// Judge a full trajectory once. Deterministic given (episode, profile).
pub fn judge_trajectory(
    episode: &Episode,
    model: &SoftwareModel,
    profile: &JudgeProfile,
) -> Result<JudgeVerdict, JudgeError> {
    judge_with_nonce(episode, model, profile, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::GroundingNoise;
    use crate::env::{builtin_catalog, builtin_templates, generate_tasks, Task};
    use crate::geometry::Point;
    use crate::plan::Plan;
    use crate::rollout::{oracle_policy, run_episode, PolicySpec, RolloutConfig, Episode};
    use crate::store::TrajectorySeeds;

    const NATIVE: Resolution = Resolution { w: 1280, h: 800 };

    fn task_for(software: &str, template: &str, seed: u64) -> Task {
        let catalog = builtin_catalog();
        let model = catalog.get(software).unwrap();
        let templates: Vec<_> = builtin_templates(software)
            .into_iter()
            .filter(|t| t.id == template)
            .collect();
        generate_tasks(model, &templates, 1, 15, seed).unwrap().remove(0)
    }

    fn oracle_episode(software: &str, template: &str, seed: u64) -> Episode {
        let catalog = builtin_catalog();
        let model = catalog.get(software).unwrap();
        let task = task_for(software, template, seed);
        let plans = oracle_policy(model, &task).unwrap();
        run_episode(
            model,
            &task,
            &PolicySpec::Scripted(&plans),
            &RolloutConfig {
                noise: GroundingNoise::NONE,
                ..Default::default()
            },
            TrajectorySeeds { policy: 1, executor: 2, env: 3 },
        )
        .unwrap()
    }

    fn failed_episode(software: &str, template: &str, seed: u64) -> Episode {
        let catalog = builtin_catalog();
        let model = catalog.get(software).unwrap();
        let task = task_for(software, template, seed);
        run_episode(
            model,
            &task,
            &PolicySpec::Scripted(&[]),
            &RolloutConfig::default(),
            TrajectorySeeds { policy: 1, executor: 2, env: 3 },
        )
        .unwrap()
    }

    #[test]
    fn perfect_judge_on_oracle_trajectory_is_clean() {
        let catalog = builtin_catalog();
        for (software, template) in [
            ("plotlab", "plotlab/plot_expr"),
            ("molforge", "molforge/bond_element"),
            ("terraview", "terraview/pan_map"),
            ("skychart", "skychart/track_object"),
        ] {
            let episode = oracle_episode(software, template, 8);
            let model = catalog.get(software).unwrap();
            let profile = JudgeProfile::perfect("p", NATIVE);
            let verdict = judge_trajectory(&episode, model, &profile).unwrap();
            assert!(verdict.correctness, "{software}: not judged correct");
            assert!(verdict.redundant.is_empty(), "{software}: {:?}", verdict.redundant);
            assert!(verdict.first_error_step.is_none());
            assert!(is_clean(&verdict));
            assert_eq!(
                label_positive_actions(&episode, &verdict).unwrap().len(),
                episode.len()
            );
        }
    }

    #[test]
    fn perfect_judge_matches_oracle_bit_on_failures() {
        let catalog = builtin_catalog();
        let episode = failed_episode("plotlab", "plotlab/enable_grid", 2);
        assert!(!episode.oracle_success);
        let model = catalog.get("plotlab").unwrap();
        let verdict =
            judge_trajectory(&episode, model, &JudgeProfile::perfect("p", NATIVE)).unwrap();
        assert!(!verdict.correctness);
        assert!(label_positive_actions(&episode, &verdict).is_none());
    }

    #[test]
    fn noop_click_is_marked_redundant() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let task = task_for("plotlab", "plotlab/enable_grid", 2);
        // Click empty space (a no-op), then solve, then finish.
        let noop = Plan::click("grid");
        let _ = noop;
        let mut episode = {
            let plans = oracle_policy(model, &task).unwrap();
            run_episode(
                model,
                &task,
                &PolicySpec::Scripted(&plans),
                &RolloutConfig {
                    noise: GroundingNoise::NONE,
                    ..Default::default()
                },
                TrajectorySeeds { policy: 0, executor: 0, env: 0 },
            )
            .unwrap()
        };
        // Splice in a dead click on empty space at the front.
        let dead = Action::Click {
            point: Point::new(1279, 799),
        };
        let s0 = episode.states[0].clone();
        let after = crate::env::step(model, &s0, &dead);
        episode.states.insert(1, after);
        episode
            .planner_views
            .insert(1, render(model, &episode.states[1], episode.planner_resolution).unwrap());
        episode.actions.insert(0, dead);
        episode.plans.insert(0, Plan::click("plot"));
        let verdict = judge_trajectory(
            &episode,
            model,
            &JudgeProfile::perfect("p", NATIVE),
        )
        .unwrap();
        assert_eq!(verdict.redundant, vec![1]);
    }

    #[test]
    fn focus_click_is_not_redundant() {
        let catalog = builtin_catalog();
        let episode = oracle_episode("plotlab", "plotlab/plot_expr", 9);
        let model = catalog.get("plotlab").unwrap();
        // The oracle path starts with a focusing click on the expression
        // field; a caret-blind judge would call it redundant.
        assert_eq!(episode.plans[0].kind, ActionKind::Click);
        let verdict =
            judge_trajectory(&episode, model, &JudgeProfile::perfect("p", NATIVE)).unwrap();
        assert!(verdict.redundant.is_empty());
    }

    #[test]
    fn false_positive_rate_is_calibrated() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let mut pre_verdicts = Vec::new();
        for seed in 0..20 {
            let episode = failed_episode("plotlab", "plotlab/export_view", 100 + seed);
            let pre = pre_noise_verdict(&episode, model, NATIVE).unwrap();
            assert!(!pre.correctness);
            pre_verdicts.push((episode.identity_key(), pre));
        }
        let profile = JudgeProfile {
            id: "noisy".into(),
            resolution: NATIVE,
            false_positive: 0.3,
            false_negative: 0.1,
            seed: 77,
        };
        let trials: u64 = 50_000;
        let mut flips = 0u64;
        for i in 0..trials {
            let (key, pre) = &pre_verdicts[(i % 20) as usize];
            if apply_noise(pre, &profile, *key, i).correctness {
                flips += 1;
            }
        }
        let rate = flips as f64 / trials as f64;
        assert!(
            (rate - 0.3).abs() <= 0.01,
            "false-positive rate {rate} not within 0.3 +/- 0.01"
        );
    }

    #[test]
    fn verdicts_are_deterministic() {
        let catalog = builtin_catalog();
        let episode = oracle_episode("terraview", "terraview/locate", 3);
        let model = catalog.get("terraview").unwrap();
        let profile = JudgeProfile {
            id: "j".into(),
            resolution: Resolution::new(320, 200),
            false_positive: 0.2,
            false_negative: 0.2,
            seed: 5,
        };
        let a = judge_trajectory(&episode, model, &profile).unwrap();
        let b = judge_trajectory(&episode, model, &profile).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_step_points_at_the_wasted_prefix() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let task = task_for("plotlab", "plotlab/plot_expr", 9);
        // Burn the whole budget on empty clicks: after enough waste the goal
        // becomes unreachable in the remaining steps.
        let dead_point = Point::new(1279, 799);
        let mut state = model.initial_state();
        let mut states = vec![state.clone()];
        let mut views = vec![render(model, &state, Resolution::new(640, 400)).unwrap()];
        let mut actions = Vec::new();
        let mut plans = Vec::new();
        for _ in 0..task.max_steps {
            let a = Action::Click { point: dead_point };
            state = crate::env::step(model, &state, &a);
            states.push(state.clone());
            views.push(render(model, &state, Resolution::new(640, 400)).unwrap());
            actions.push(a);
            plans.push(Plan::click("plot"));
        }
        let episode = Episode {
            task: task.clone(),
            planner_resolution: Resolution::new(640, 400),
            seeds: TrajectorySeeds { policy: 0, executor: 0, env: 0 },
            states,
            planner_views: views,
            plans,
            actions,
            oracle_success: false,
        };
        let verdict =
            judge_trajectory(&episode, model, &JudgeProfile::perfect("p", NATIVE)).unwrap();
        assert!(!verdict.correctness);
        // Witness needs 3 steps; budget 15: waste becomes fatal at step 12.
        assert_eq!(verdict.first_error_step, Some(12));
        assert_eq!(verdict.redundant.len(), task.max_steps as usize);
    }

    #[test]
    fn low_resolution_blanking_fails_closed_but_native_does_not() {
        use crate::env::{Screen, SoftwareModel, Widget, WidgetKind};
        use crate::geometry::Rect;
        // Reuse the 8-px-gap fixture: values blank at 160x100.
        let model = SoftwareModel {
            name: "fixture".into(),
            native: NATIVE,
            initial_screen: "main".into(),
            screens: vec![Screen {
                id: "main".into(),
                widgets: vec![
                    Widget {
                        id: "a".into(),
                        kind: WidgetKind::TextField,
                        bbox: Rect::new(100, 100, 40, 20),
                        label: "A".into(),
                        value: "left".into(),
                        visible: true,
                    },
                    Widget {
                        id: "b".into(),
                        kind: WidgetKind::TextField,
                        bbox: Rect::new(148, 100, 40, 20),
                        label: "B".into(),
                        value: "right".into(),
                        visible: true,
                    },
                ],
            }],
            click_effects: Default::default(),
            double_click_effects: Default::default(),
            hotkeys: Default::default(),
            drag_rules: Default::default(),
            value_vocabulary: vec![],
        };
        let task = Task {
            id: "fixture-task".into(),
            instruction: "nothing to do".into(),
            software: "fixture".into(),
            goal: crate::env::GoalPredicate::new(vec![GoalAtom::WidgetValueEquals {
                widget: "a".into(),
                value: "left".into(),
            }]),
            max_steps: 15,
            seed: 0,
        };
        let state = model.initial_state();
        let episode = Episode {
            task,
            planner_resolution: NATIVE,
            seeds: TrajectorySeeds { policy: 0, executor: 0, env: 0 },
            states: vec![state.clone(), crate::env::step(&model, &state, &Action::Finish)],
            planner_views: vec![
                render(&model, &state, NATIVE).unwrap(),
                render(&model, &state, NATIVE).unwrap(),
            ],
            plans: vec![Plan::finish()],
            actions: vec![Action::Finish],
            oracle_success: true,
        };
        let native = pre_noise_verdict(&episode, &model, NATIVE).unwrap();
        assert!(native.correctness);
        let low = pre_noise_verdict(&episode, &model, Resolution::new(160, 100)).unwrap();
        assert!(!low.correctness, "blanked goal value must fail closed");
    }
}
