//! Goal predicates: conjunctions of decidable atoms, including ordered
//! subgoal sequences checked against episode history.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::env::model::WorldState;
use crate::env::render::Observation;

/// An atom without nesting; also the element type of ordered sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum SimpleAtom {
    WidgetValueEquals { widget: String, value: String },
    ScreenIs { screen: String },
    ToggleStateIs { widget: String, on: bool },
}

impl SimpleAtom {
    pub fn holds_on_state(&self, state: &WorldState) -> bool {
        match self {
            SimpleAtom::WidgetValueEquals { widget, value } => state.value(widget) == value,
            SimpleAtom::ScreenIs { screen } => &state.screen == screen,
            SimpleAtom::ToggleStateIs { widget, on } => {
                (state.value(widget) == "on") == *on
            }
        }
    }

    /// Evaluate against a rendered view. Atoms that reference a widget whose
    /// value is blanked (or that is not on the visible screen) are
    /// unverifiable and count as unsatisfied.
    pub fn holds_on_view(&self, obs: &Observation, blanked: &BTreeSet<String>) -> bool {
        match self {
            SimpleAtom::WidgetValueEquals { widget, value } => match obs.view(widget) {
                Some(v) if !blanked.contains(widget) => &v.value == value,
                _ => false,
            },
            SimpleAtom::ScreenIs { screen } => &obs.screen == screen,
            SimpleAtom::ToggleStateIs { widget, on } => match obs.view(widget) {
                Some(v) if !blanked.contains(widget) => (v.value == "on") == *on,
                _ => false,
            },
        }
    }
}

/// One conjunct of a goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum GoalAtom {
    WidgetValueEquals { widget: String, value: String },
    ScreenIs { screen: String },
    ToggleStateIs { widget: String, on: bool },
    /// Atoms that must each have held at some step, in sequence order. A
    /// single state may discharge consecutive atoms.
    OrderedSubgoals { atoms: Vec<SimpleAtom> },
}

impl GoalAtom {
    fn as_simple(&self) -> Option<SimpleAtom> {
        match self {
            GoalAtom::WidgetValueEquals { widget, value } => Some(SimpleAtom::WidgetValueEquals {
                widget: widget.clone(),
                value: value.clone(),
            }),
            GoalAtom::ScreenIs { screen } => Some(SimpleAtom::ScreenIs {
                screen: screen.clone(),
            }),
            GoalAtom::ToggleStateIs { widget, on } => Some(SimpleAtom::ToggleStateIs {
                widget: widget.clone(),
                on: *on,
            }),
            GoalAtom::OrderedSubgoals { .. } => None,
        }
    }
}

/// A conjunction of atoms. The empty conjunction is vacuously true.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GoalPredicate {
    pub atoms: Vec<GoalAtom>,
}

impl GoalPredicate {
    pub fn new(atoms: Vec<GoalAtom>) -> Self {
        GoalPredicate { atoms }
    }

    /// Ordered subgoal sequences in declaration order.
    pub fn ordered_sequences(&self) -> Vec<&[SimpleAtom]> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                GoalAtom::OrderedSubgoals { atoms } => Some(atoms.as_slice()),
                _ => None,
            })
            .collect()
    }

    /// Widget ids referenced by plain (non-ordered) atoms.
    pub fn referenced_widgets(&self) -> Vec<&str> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                GoalAtom::WidgetValueEquals { widget, .. }
                | GoalAtom::ToggleStateIs { widget, .. } => Some(widget.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// Tracks how far each ordered subgoal sequence has advanced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OrderedProgress {
    /// One pointer per ordered sequence, counting discharged atoms.
    pub pointers: Vec<usize>,
}

impl OrderedProgress {
    pub fn start(goal: &GoalPredicate) -> Self {
        OrderedProgress {
            pointers: vec![0; goal.ordered_sequences().len()],
        }
    }

    /// Advance every sequence pointer as far as `state` allows.
    pub fn advance_on_state(&mut self, goal: &GoalPredicate, state: &WorldState) {
        for (seq, ptr) in goal.ordered_sequences().iter().zip(self.pointers.iter_mut()) {
            while *ptr < seq.len() && seq[*ptr].holds_on_state(state) {
                *ptr += 1;
            }
        }
    }

    /// Advance every sequence pointer as far as the rendered view allows.
    pub fn advance_on_view(
        &mut self,
        goal: &GoalPredicate,
        obs: &Observation,
        blanked: &BTreeSet<String>,
    ) {
        for (seq, ptr) in goal.ordered_sequences().iter().zip(self.pointers.iter_mut()) {
            while *ptr < seq.len() && seq[*ptr].holds_on_view(obs, blanked) {
                *ptr += 1;
            }
        }
    }

    pub fn complete(&self, goal: &GoalPredicate) -> bool {
        goal.ordered_sequences()
            .iter()
            .zip(self.pointers.iter())
            .all(|(seq, ptr)| *ptr >= seq.len())
    }
}

/// True iff every plain atom holds on `state` and every ordered sequence was
/// discharged, in order, somewhere along `history`.
///
/// `history` must contain all episode states in order (including the final
/// one); `state` is the final state plain atoms are checked against.
pub fn goal_check(state: &WorldState, goal: &GoalPredicate, history: &[WorldState]) -> bool {
    let plain_ok = goal
        .atoms
        .iter()
        .filter_map(GoalAtom::as_simple)
        .all(|a| a.holds_on_state(state));
    if !plain_ok {
        return false;
    }
    let mut progress = OrderedProgress::start(goal);
    for s in history {
        progress.advance_on_state(goal, s);
    }
    progress.complete(goal)
}
