//! The episode loop: planner proposes, executor grounds, simulator steps.
//!
//! An [`Episode`] keeps full states for judging and training; the persisted
//! [`Trajectory`](crate::store::Trajectory) carries digests and seeds
//! instead, and [`replay_trajectory`] reconstructs the episode exactly,
//! verifying every digest along the way.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::{Action, ActionKind};
use crate::agent::{execute, AgentError, GroundingNoise, History, PlannerParams, StepContext};
use crate::env::solver::{solve, SearchLimits};
use crate::env::{
    goal_check, render, EnvError, Observation, OrderedProgress, SoftwareModel, Task, WorldState,
};
use crate::geometry::Resolution;
use crate::plan::Plan;
use crate::seeds;
use crate::store::{
    digest_json, digest_key64, digest_observation, digest_state, StepRecord, Trajectory,
    TrajectorySeeds,
};

#[derive(Debug, Error)]
pub enum RolloutError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("trajectory belongs to task '{expected}', got '{got}'")]
    TaskMismatch { expected: String, got: String },
    #[error("digest mismatch at step {step}: log does not replay")]
    DigestMismatch { step: usize },
}

/// How the rollout picks plans.
pub enum PolicySpec<'a> {
    /// Sample one plan per step from the planner distribution.
    Learned(&'a PlannerParams),
    /// Replay a fixed plan list; past its end, finish.
    Scripted(&'a [Plan]),
}

#[derive(Debug, Clone, Copy)]
pub struct RolloutConfig {
    pub planner_resolution: Resolution,
    pub noise: GroundingNoise,
    pub temperature: f64,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        RolloutConfig {
            planner_resolution: Resolution::new(640, 400),
            noise: GroundingNoise::default(),
            temperature: 1.0,
        }
    }
}

/// A completed episode with everything in memory.
#[derive(Debug, Clone)]
pub struct Episode {
    pub task: Task,
    pub planner_resolution: Resolution,
    pub seeds: TrajectorySeeds,
    /// `states[t]` is the state before action `t`; the final entry is the
    /// end state.
    pub states: Vec<WorldState>,
    /// Planner-resolution views of each state, aligned with `states`.
    pub planner_views: Vec<Observation>,
    pub plans: Vec<Plan>,
    pub actions: Vec<Action>,
    pub oracle_success: bool,
}

impl Episode {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn final_state(&self) -> &WorldState {
        self.states.last().expect("episode has an initial state")
    }

    /// A stable 64-bit identity for seed mixing, covering the task, seeds,
    /// and every action.
    pub fn identity_key(&self) -> u64 {
        digest_key64(&(&self.task.id, &self.seeds, &self.plans, &self.actions))
    }

    /// The planner context of step `t`, borrowing this episode's buffers.
    pub fn context_at<'a>(&'a self, history: &'a History, t: usize) -> StepContext<'a> {
        StepContext {
            task: &self.task,
            history,
            o_prev: &self.planner_views[t.saturating_sub(1)],
            o_cur: &self.planner_views[t],
        }
    }

    /// Histories for each step: `histories()[t]` holds steps `0..t`.
    pub fn histories(&self) -> Vec<History> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut h = History::default();
        out.push(h.clone());
        for (plan, action) in self.plans.iter().zip(&self.actions) {
            h.push(plan.clone(), action.clone());
            out.push(h.clone());
        }
        out
    }
}

/// Run one episode. Fully determined by (model, task, policy, config, seeds).
pub fn run_episode(
    model: &SoftwareModel,
    task: &Task,
    policy: &PolicySpec<'_>,
    config: &RolloutConfig,
    seeds: TrajectorySeeds,
) -> Result<Episode, RolloutError> {
    let mut state = model.initial_state();
    let mut states = vec![state.clone()];
    let mut views = vec![render(model, &state, config.planner_resolution)?];
    let mut exec_view = render(model, &state, model.native)?;
    let mut history = History::default();
    let mut plans = Vec::new();
    let mut actions = Vec::new();
    let mut policy_rng = ChaCha8Rng::seed_from_u64(seeds.policy);

    for t in 0..task.max_steps as usize {
        let ctx = StepContext {
            task,
            history: &history,
            o_prev: &views[t.saturating_sub(1)],
            o_cur: &views[t],
        };
        let plan = match policy {
            PolicySpec::Learned(params) => {
                crate::agent::sample_plan(params, &ctx, config.temperature, &mut policy_rng)?
            }
            PolicySpec::Scripted(list) => list.get(t).cloned().unwrap_or_else(Plan::finish),
        };
        let outcome = execute(
            &plan,
            &exec_view,
            &config.noise,
            seeds::mix(seeds.executor, t as u64),
        );
        let next = crate::env::step(model, &state, &outcome.action);
        history.push(plan.clone(), outcome.action.clone());
        plans.push(plan.clone());
        actions.push(outcome.action);
        states.push(next.clone());
        views.push(render(model, &next, config.planner_resolution)?);
        exec_view = render(model, &next, model.native)?;
        state = next;
        if plan.kind == ActionKind::Finish {
            break;
        }
    }

    let oracle_success = goal_check(&state, &task.goal, &states);
    Ok(Episode {
        task: task.clone(),
        planner_resolution: config.planner_resolution,
        seeds,
        states,
        planner_views: views,
        plans,
        actions,
        oracle_success,
    })
}

/// Serialize an episode into its persisted form.
pub fn episode_to_trajectory(episode: &Episode) -> Trajectory {
    let steps = episode
        .plans
        .iter()
        .zip(&episode.actions)
        .enumerate()
        .map(|(t, (plan, action))| StepRecord {
            obs_digest: digest_observation(&episode.planner_views[t]),
            plan: plan.clone(),
            action: action.clone(),
        })
        .collect();
    Trajectory {
        task_id: episode.task.id.clone(),
        software: episode.task.software.clone(),
        seeds: episode.seeds,
        planner_resolution: episode.planner_resolution,
        steps,
        final_state_digest: digest_state(episode.final_state()),
        oracle_success: episode.oracle_success,
    }
}

/// Rebuild an episode from its log record by replaying the actions, checking
/// every stored digest.
pub fn replay_trajectory(
    model: &SoftwareModel,
    task: &Task,
    trajectory: &Trajectory,
) -> Result<Episode, RolloutError> {
    if task.id != trajectory.task_id {
        return Err(RolloutError::TaskMismatch {
            expected: trajectory.task_id.clone(),
            got: task.id.clone(),
        });
    }
    let mut state = model.initial_state();
    let mut states = vec![state.clone()];
    let mut views = vec![render(model, &state, trajectory.planner_resolution)?];
    let mut plans = Vec::new();
    let mut actions = Vec::new();
    for (t, step_record) in trajectory.steps.iter().enumerate() {
        if digest_observation(&views[t]) != step_record.obs_digest {
            return Err(RolloutError::DigestMismatch { step: t });
        }
        let next = crate::env::step(model, &state, &step_record.action);
        plans.push(step_record.plan.clone());
        actions.push(step_record.action.clone());
        states.push(next.clone());
        views.push(render(model, &next, trajectory.planner_resolution)?);
        state = next;
    }
    if digest_state(&state) != trajectory.final_state_digest {
        return Err(RolloutError::DigestMismatch {
            step: trajectory.steps.len(),
        });
    }
    Ok(Episode {
        task: task.clone(),
        planner_resolution: trajectory.planner_resolution,
        seeds: trajectory.seeds,
        states,
        planner_views: views,
        plans,
        actions,
        oracle_success: trajectory.oracle_success,
    })
}

/// The scripted oracle: a breadth-first witness plus a terminating finish.
/// `None` when the task has no witness within its budget.
pub fn oracle_policy(model: &SoftwareModel, task: &Task) -> Option<Vec<Plan>> {
    let witness = solve(
        model,
        &model.initial_state(),
        &task.goal,
        &OrderedProgress::start(&task.goal),
        SearchLimits::depth(task.max_steps.saturating_sub(1)),
    )?;
    let mut plans = witness;
    plans.push(Plan::finish());
    Some(plans)
}

/// Digest of a trajectory record, for order-insensitive set comparisons.
pub fn trajectory_digest(trajectory: &Trajectory) -> String {
    digest_json(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{builtin_catalog, builtin_templates, generate_tasks};

    fn task_for(software: &str, template: &str, seed: u64) -> Task {
        let catalog = builtin_catalog();
        let model = catalog.get(software).unwrap();
        let templates: Vec<_> = builtin_templates(software)
            .into_iter()
            .filter(|t| t.id == template)
            .collect();
        generate_tasks(model, &templates, 1, 15, seed).unwrap().remove(0)
    }

    fn seeds_for(n: u64) -> TrajectorySeeds {
        TrajectorySeeds {
            policy: seeds::mix(n, 0),
            executor: seeds::mix(n, 1),
            env: seeds::mix(n, 2),
        }
    }

    #[test]
    fn oracle_policy_solves_its_task_noiselessly() {
        let catalog = builtin_catalog();
        let task = task_for("plotlab", "plotlab/plot_expr", 9);
        let model = catalog.get("plotlab").unwrap();
        let plans = oracle_policy(model, &task).unwrap();
        let cfg = RolloutConfig {
            noise: GroundingNoise::NONE,
            ..Default::default()
        };
        let episode = run_episode(
            model,
            &task,
            &PolicySpec::Scripted(&plans),
            &cfg,
            seeds_for(1),
        )
        .unwrap();
        assert!(episode.oracle_success, "oracle replay must succeed");
        assert_eq!(episode.actions.last().unwrap().kind(), ActionKind::Finish);
        assert!(episode.len() as u32 <= task.max_steps);
    }

    #[test]
    fn finish_only_policy_fails_unsatisfied_goals() {
        let catalog = builtin_catalog();
        let task = task_for("plotlab", "plotlab/enable_grid", 2);
        let model = catalog.get("plotlab").unwrap();
        let episode = run_episode(
            model,
            &task,
            &PolicySpec::Scripted(&[]),
            &RolloutConfig::default(),
            seeds_for(2),
        )
        .unwrap();
        assert!(!episode.oracle_success);
        assert_eq!(episode.len(), 1);
    }

    #[test]
    fn episodes_are_deterministic_given_seeds() {
        let catalog = builtin_catalog();
        let task = task_for("skychart", "skychart/goto_target", 5);
        let model = catalog.get("skychart").unwrap();
        let params = PlannerParams::base_init();
        let cfg = RolloutConfig::default();
        let a =
            run_episode(model, &task, &PolicySpec::Learned(&params), &cfg, seeds_for(7)).unwrap();
        let b =
            run_episode(model, &task, &PolicySpec::Learned(&params), &cfg, seeds_for(7)).unwrap();
        assert_eq!(a.plans, b.plans);
        assert_eq!(a.actions, b.actions);
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn trajectory_roundtrips_through_replay() {
        let catalog = builtin_catalog();
        let task = task_for("molforge", "molforge/search_formula", 3);
        let model = catalog.get("molforge").unwrap();
        let params = PlannerParams::base_init();
        let episode = run_episode(
            model,
            &task,
            &PolicySpec::Learned(&params),
            &RolloutConfig::default(),
            seeds_for(11),
        )
        .unwrap();
        let trajectory = episode_to_trajectory(&episode);
        let replayed = replay_trajectory(model, &task, &trajectory).unwrap();
        assert_eq!(replayed.states, episode.states);
        assert_eq!(replayed.plans, episode.plans);
        assert_eq!(replayed.planner_views, episode.planner_views);
        assert_eq!(replayed.oracle_success, episode.oracle_success);
    }

    #[test]
    fn tampered_trajectory_fails_replay() {
        let catalog = builtin_catalog();
        let task = task_for("plotlab", "plotlab/export_view", 4);
        let model = catalog.get("plotlab").unwrap();
        let plans = oracle_policy(model, &task).unwrap();
        let cfg = RolloutConfig {
            noise: GroundingNoise::NONE,
            ..Default::default()
        };
        let episode =
            run_episode(model, &task, &PolicySpec::Scripted(&plans), &cfg, seeds_for(4)).unwrap();
        let mut trajectory = episode_to_trajectory(&episode);
        trajectory.final_state_digest = "f".repeat(64);
        assert!(matches!(
            replay_trajectory(model, &task, &trajectory),
            Err(RolloutError::DigestMismatch { .. })
        ));
    }

    #[test]
    fn episode_budget_is_respected() {
        let catalog = builtin_catalog();
        let task = task_for("plotlab", "plotlab/plot_expr", 6);
        let model = catalog.get("plotlab").unwrap();
        let params = PlannerParams::zeros();
        let episode = run_episode(
            model,
            &task,
            &PolicySpec::Learned(&params),
            &RolloutConfig::default(),
            seeds_for(13),
        )
        .unwrap();
        assert!(episode.len() as u32 <= task.max_steps);
        assert_eq!(episode.states.len(), episode.len() + 1);
        assert_eq!(episode.planner_views.len(), episode.len() + 1);
    }
}
