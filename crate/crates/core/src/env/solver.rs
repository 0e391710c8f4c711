//! Breadth-first oracle over the software transition graph.
//!
//! Searches plan space (click/double-click each visible widget, type a
//! payload into the focused field, hotkeys, declared drags) with noiseless
//! grounding, deduplicating on the canonical state plus ordered-subgoal
//! progress. Used to certify generated tasks reachable, to script oracle
//! policies, and by the judge's error-step reachability checks.

use std::collections::{HashMap, VecDeque};

use crate::action::Action;
use crate::env::goal::{GoalAtom, GoalPredicate, OrderedProgress};
use crate::env::model::{step, SoftwareModel, WidgetKind, WorldState};
use crate::plan::Plan;

/// Search bounds. Exhausting either bound counts as "not found".
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_depth: u32,
    pub max_states: usize,
}

impl SearchLimits {
    pub fn depth(max_depth: u32) -> Self {
        SearchLimits {
            max_depth,
            max_states: 50_000,
        }
    }
}

/// Ground a plan against the live state with a perfect executor: clicks at
/// widget centers, no jitter, no mis-grounding.
pub fn ground_exact(model: &SoftwareModel, state: &WorldState, plan: &Plan) -> Option<Action> {
    let screen = model.screen(&state.screen)?;
    let find = |id: &str| {
        screen
            .widgets
            .iter()
            .find(|w| w.visible && w.id == id)
            .map(|w| w.bbox)
    };
    match plan.kind {
        crate::action::ActionKind::Click => Some(Action::Click {
            point: find(plan.target.as_deref()?)?.center(),
        }),
        crate::action::ActionKind::DoubleClick => Some(Action::DoubleClick {
            point: find(plan.target.as_deref()?)?.center(),
        }),
        crate::action::ActionKind::Type => Some(Action::Type {
            text: plan.argument.clone(),
        }),
        crate::action::ActionKind::Hotkey => Some(Action::Hotkey {
            keys: plan.argument.clone(),
        }),
        crate::action::ActionKind::Drag => Some(Action::Drag {
            source: find(plan.target.as_deref()?)?,
            dest: find(&plan.argument)?,
        }),
        crate::action::ActionKind::Finish => Some(Action::Finish),
    }
}

/// Typing payloads worth searching: the model vocabulary plus any literal
/// values the goal mentions.
fn search_payloads(model: &SoftwareModel, goal: &GoalPredicate) -> Vec<String> {
    let mut payloads = model.value_vocabulary.clone();
    for atom in &goal.atoms {
        if let GoalAtom::WidgetValueEquals { value, .. } = atom {
            if !value.is_empty() && !payloads.contains(value) {
                payloads.push(value.clone());
            }
        }
    }
    payloads
}

fn candidate_plans(
    model: &SoftwareModel,
    state: &WorldState,
    payloads: &[String],
) -> Vec<Plan> {
    let mut plans = Vec::new();
    let Some(screen) = model.screen(&state.screen) else {
        return plans;
    };
    let visible: Vec<_> = screen.widgets.iter().filter(|w| w.visible).collect();
    for w in &visible {
        plans.push(Plan::click(&w.id));
    }
    for w in &visible {
        if w.kind == WidgetKind::TextField || model.double_click_effects.contains_key(&w.id) {
            plans.push(Plan::double_click(&w.id));
        }
    }
    if let Some(focus) = &state.focus {
        if visible
            .iter()
            .any(|w| &w.id == focus && w.kind == WidgetKind::TextField)
        {
            for payload in payloads {
                plans.push(Plan::type_text(focus.clone(), payload.clone()));
            }
        }
    }
    for keys in model.hotkeys.keys() {
        plans.push(Plan::hotkey(keys.clone()));
    }
    for rule in &model.drag_rules {
        let both_visible = visible.iter().any(|w| w.id == rule.source)
            && visible.iter().any(|w| w.id == rule.dest);
        if both_visible {
            plans.push(Plan::drag(rule.source.clone(), rule.dest.clone()));
        }
    }
    plans
}

fn satisfied(goal: &GoalPredicate, state: &WorldState, progress: &OrderedProgress) -> bool {
    let plain_ok = goal.atoms.iter().all(|a| match a {
        GoalAtom::WidgetValueEquals { widget, value } => state.value(widget) == value,
        GoalAtom::ScreenIs { screen } => &state.screen == screen,
        GoalAtom::ToggleStateIs { widget, on } => (state.value(widget) == "on") == *on,
        GoalAtom::OrderedSubgoals { .. } => true,
    });
    plain_ok && progress.complete(goal)
}

type NodeKey = (
    (String, Vec<(String, String)>, Option<String>),
    Vec<usize>,
);

/// Find a shortest plan sequence from `start` (with ordered-subgoal progress
/// `start_progress`) to the goal, within the limits. Returns `None` when no
/// witness exists inside the search bounds.
pub fn solve(
    model: &SoftwareModel,
    start: &WorldState,
    goal: &GoalPredicate,
    start_progress: &OrderedProgress,
    limits: SearchLimits,
) -> Option<Vec<Plan>> {
    let payloads = search_payloads(model, goal);

    let mut progress0 = start_progress.clone();
    progress0.advance_on_state(goal, start);
    if satisfied(goal, start, &progress0) {
        return Some(Vec::new());
    }

    struct Node {
        state: WorldState,
        progress: OrderedProgress,
        parent: usize,
        plan: Option<Plan>,
        depth: u32,
    }

    let mut nodes = vec![Node {
        state: start.clone(),
        progress: progress0.clone(),
        parent: 0,
        plan: None,
        depth: 0,
    }];
    let mut seen: HashMap<NodeKey, ()> = HashMap::new();
    seen.insert((start.canonical_key(), progress0.pointers.clone()), ());
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        let depth = nodes[idx].depth;
        if depth >= limits.max_depth {
            continue;
        }
        let plans = candidate_plans(model, &nodes[idx].state, &payloads);
        for plan in plans {
            let Some(action) = ground_exact(model, &nodes[idx].state, &plan) else {
                continue;
            };
            let next_state = step(model, &nodes[idx].state, &action);
            let mut next_progress = nodes[idx].progress.clone();
            next_progress.advance_on_state(goal, &next_state);
            let key = (next_state.canonical_key(), next_progress.pointers.clone());
            if seen.contains_key(&key) {
                continue;
            }
            seen.insert(key, ());
            if seen.len() > limits.max_states {
                return None;
            }
            let done = satisfied(goal, &next_state, &next_progress);
            nodes.push(Node {
                state: next_state,
                progress: next_progress,
                parent: idx,
                plan: Some(plan),
                depth: depth + 1,
            });
            let new_idx = nodes.len() - 1;
            if done {
                let mut path = Vec::new();
                let mut cursor = new_idx;
                while let Some(p) = nodes[cursor].plan.clone() {
                    path.push(p);
                    cursor = nodes[cursor].parent;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(new_idx);
        }
    }
    None
}

/// Reachability check without witness reconstruction.
pub fn reachable(
    model: &SoftwareModel,
    start: &WorldState,
    goal: &GoalPredicate,
    start_progress: &OrderedProgress,
    limits: SearchLimits,
) -> bool {
    solve(model, start, goal, start_progress, limits).is_some()
}
