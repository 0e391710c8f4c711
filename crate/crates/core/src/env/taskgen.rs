//! Seeded, template-driven task generation.
//!
//! Each template pairs a natural-language instruction with a goal, both
//! containing `{slot}` placeholders. Generation samples slot bindings with a
//! seeded RNG, instantiates the pair, and keeps only candidates the
//! breadth-first oracle can solve within the step budget (leaving one step
//! spare for the terminating finish action).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::env::goal::{GoalAtom, GoalPredicate, OrderedProgress, SimpleAtom};
use crate::env::model::{SoftwareModel, WidgetKind};
use crate::env::solver::{solve, SearchLimits};
use crate::env::EnvError;

/// Default episode step budget.
pub const DEFAULT_MAX_STEPS: u32 = 15;

/// A natural-language task with a decidable goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub instruction: String,
    pub software: String,
    pub goal: GoalPredicate,
    pub max_steps: u32,
    pub seed: u64,
}

/// Where a slot's candidate bindings come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum SlotDomain {
    /// A visible widget of the given kind, optionally restricted to a screen.
    /// Binds `{name}` to the widget id and `{name.label}` to its label.
    WidgetOfKind {
        kind: WidgetKind,
        #[serde(default)]
        screen: Option<String>,
    },
    /// A value from the model's vocabulary. Binds `{name}`.
    VocabValue,
    /// A screen id. Binds `{name}`.
    Screen,
    /// One row from a literal table. Binds `{name.column}` per column.
    Table { rows: Vec<BTreeMap<String, String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub name: String,
    pub domain: SlotDomain,
}

/// A parameterized task blueprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskTemplate {
    pub id: String,
    pub software: String,
    pub instruction: String,
    pub goal: Vec<GoalAtom>,
    #[serde(default)]
    pub slots: Vec<SlotSpec>,
}

fn sample_bindings(
    template: &TaskTemplate,
    model: &SoftwareModel,
    rng: &mut ChaCha8Rng,
) -> Option<BTreeMap<String, String>> {
    let mut bindings = BTreeMap::new();
    for slot in &template.slots {
        match &slot.domain {
            SlotDomain::WidgetOfKind { kind, screen } => {
                let candidates: Vec<_> = model
                    .screens
                    .iter()
                    .filter(|s| screen.as_deref().map_or(true, |want| s.id == want))
                    .flat_map(|s| s.widgets.iter())
                    .filter(|w| w.visible && w.kind == *kind)
                    .collect();
                let w = candidates.choose(rng)?;
                bindings.insert(slot.name.clone(), w.id.clone());
                bindings.insert(format!("{}.label", slot.name), w.label.clone());
            }
            SlotDomain::VocabValue => {
                let v = model.value_vocabulary.choose(rng)?;
                bindings.insert(slot.name.clone(), v.clone());
            }
            SlotDomain::Screen => {
                let s = model.screens.choose(rng)?;
                bindings.insert(slot.name.clone(), s.id.clone());
            }
            SlotDomain::Table { rows } => {
                let row = rows.choose(rng)?;
                for (col, v) in row {
                    let key = if col == "id" {
                        slot.name.clone()
                    } else {
                        format!("{}.{}", slot.name, col)
                    };
                    bindings.insert(key, v.clone());
                }
            }
        }
    }
    Some(bindings)
}

fn substitute(text: &str, bindings: &BTreeMap<String, String>) -> String {
    let mut out = text.to_string();
    // Longer keys first so "{e.label}" is not clobbered by "{e}".
    let mut keys: Vec<&String> = bindings.keys().collect();
    keys.sort_by_key(|k| std::cmp::Reverse(k.len()));
    for key in keys {
        out = out.replace(&format!("{{{key}}}"), &bindings[key]);
    }
    out
}

fn instantiate_atom(atom: &GoalAtom, bindings: &BTreeMap<String, String>) -> GoalAtom {
    match atom {
        GoalAtom::WidgetValueEquals { widget, value } => GoalAtom::WidgetValueEquals {
            widget: substitute(widget, bindings),
            value: substitute(value, bindings),
        },
        GoalAtom::ScreenIs { screen } => GoalAtom::ScreenIs {
            screen: substitute(screen, bindings),
        },
        GoalAtom::ToggleStateIs { widget, on } => GoalAtom::ToggleStateIs {
            widget: substitute(widget, bindings),
            on: *on,
        },
        GoalAtom::OrderedSubgoals { atoms } => GoalAtom::OrderedSubgoals {
            atoms: atoms
                .iter()
                .map(|a| match a {
                    SimpleAtom::WidgetValueEquals { widget, value } => {
                        SimpleAtom::WidgetValueEquals {
                            widget: substitute(widget, bindings),
                            value: substitute(value, bindings),
                        }
                    }
                    SimpleAtom::ScreenIs { screen } => SimpleAtom::ScreenIs {
                        screen: substitute(screen, bindings),
                    },
                    SimpleAtom::ToggleStateIs { widget, on } => SimpleAtom::ToggleStateIs {
                        widget: substitute(widget, bindings),
                        on: *on,
                    },
                })
                .collect(),
        },
    }
}

const MAX_ATTEMPTS_PER_TASK: u32 = 200;

/// Generate `n` tasks for one software model. Deterministic given the seed;
/// every emitted goal has a breadth-first witness of length at most
/// `max_steps - 1` from the initial state.
pub fn generate_tasks(
    model: &SoftwareModel,
    templates: &[TaskTemplate],
    n: usize,
    max_steps: u32,
    seed: u64,
) -> Result<Vec<Task>, EnvError> {
    if n == 0 {
        return Err(EnvError::EmptyTaskRequest);
    }
    let templates: Vec<&TaskTemplate> = templates
        .iter()
        .filter(|t| t.software == model.name)
        .collect();
    if templates.is_empty() {
        return Err(EnvError::EmptyTemplateSet);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = model.initial_state();
    let limits = SearchLimits::depth(max_steps.saturating_sub(1));
    let mut tasks = Vec::with_capacity(n);
    for k in 0..n {
        let mut attempt = 0;
        let task = loop {
            attempt += 1;
            if attempt > MAX_ATTEMPTS_PER_TASK {
                return Err(EnvError::UnsatisfiableTemplate {
                    template: templates[k % templates.len()].id.clone(),
                    attempts: MAX_ATTEMPTS_PER_TASK,
                });
            }
            let template = templates[rng.gen_range(0..templates.len())];
            let Some(bindings) = sample_bindings(template, model, &mut rng) else {
                continue;
            };
            let goal = GoalPredicate::new(
                template
                    .goal
                    .iter()
                    .map(|a| instantiate_atom(a, &bindings))
                    .collect(),
            );
            // Reject goals already satisfied at the start: they make the
            // trivial finish-only policy succeed.
            let progress0 = OrderedProgress::start(&goal);
            let witness = solve(model, &start, &goal, &progress0, limits);
            match witness {
                Some(plans) if !plans.is_empty() => {
                    break Task {
                        id: format!("{}-{:08x}-{:03}", model.name, seed & 0xffff_ffff, k),
                        instruction: substitute(&template.instruction, &bindings),
                        software: model.name.clone(),
                        goal,
                        max_steps,
                        seed: crate::seeds::mix(seed, k as u64),
                    };
                }
                _ => continue,
            }
        };
        tasks.push(task);
    }
    Ok(tasks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{builtin_catalog, builtin_templates};

    #[test]
    fn generation_is_deterministic() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let templates = builtin_templates("plotlab");
        let a = generate_tasks(model, &templates, 10, DEFAULT_MAX_STEPS, 7).unwrap();
        let b = generate_tasks(model, &templates, 10, DEFAULT_MAX_STEPS, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn every_goal_has_a_bfs_witness_within_budget() {
        let catalog = builtin_catalog();
        for name in catalog.names() {
            let model = catalog.get(name).unwrap();
            let templates = builtin_templates(name);
            let tasks = generate_tasks(model, &templates, 6, DEFAULT_MAX_STEPS, 21).unwrap();
            for task in &tasks {
                let witness = solve(
                    model,
                    &model.initial_state(),
                    &task.goal,
                    &OrderedProgress::start(&task.goal),
                    SearchLimits::depth(task.max_steps - 1),
                )
                .unwrap_or_else(|| panic!("unreachable goal in {}", task.id));
                assert!(!witness.is_empty());
                assert!(witness.len() as u32 <= task.max_steps - 1);
            }
        }
    }

    #[test]
    fn single_template_is_instantiated() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let templates: Vec<TaskTemplate> = builtin_templates("plotlab")
            .into_iter()
            .filter(|t| t.id == "plotlab/enable_grid")
            .collect();
        let tasks = generate_tasks(model, &templates, 1, DEFAULT_MAX_STEPS, 3).unwrap();
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].instruction, "Enable the Grid option in the editor.");
    }

    #[test]
    fn unknown_software_template_set_is_rejected() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let templates = builtin_templates("skychart");
        assert!(matches!(
            generate_tasks(model, &templates, 1, DEFAULT_MAX_STEPS, 3),
            Err(EnvError::EmptyTemplateSet)
        ));
    }

    #[test]
    fn zero_tasks_is_an_error() {
        let catalog = builtin_catalog();
        let model = catalog.get("plotlab").unwrap();
        let templates = builtin_templates("plotlab");
        assert!(matches!(
            generate_tasks(model, &templates, 0, DEFAULT_MAX_STEPS, 3),
            Err(EnvError::EmptyTaskRequest)
        ));
    }

    #[test]
    fn instructions_quote_typed_payloads() {
        let catalog = builtin_catalog();
        let model = catalog.get("skychart").unwrap();
        let templates: Vec<TaskTemplate> = builtin_templates("skychart")
            .into_iter()
            .filter(|t| t.id == "skychart/goto_target")
            .collect();
        let tasks = generate_tasks(model, &templates, 3, DEFAULT_MAX_STEPS, 11).unwrap();
        for t in &tasks {
            assert!(t.instruction.contains('"'), "payload not quoted: {}", t.instruction);
        }
    }
}
