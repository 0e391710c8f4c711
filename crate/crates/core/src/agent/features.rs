//! The planner's feature map.
//!
//! Every candidate decision token is scored as `theta . phi` where `phi` is
//! the fixed-dimension vector built here. All features lie in [0, 1]. The
//! layout is frozen under [`FEATURE_MAP_VERSION`]; checkpoints embed the
//! version and loading refuses a mismatch.

use std::collections::BTreeSet;

use crate::action::ActionKind;
use crate::env::Observation;
use crate::plan::Token;

use super::planner::StepContext;

/// Feature vector length.
pub const FEATURE_DIM: usize = 21;

/// Version tag for the feature layout below.
pub const FEATURE_MAP_VERSION: &str = "fm1-d21";

/// Hotkey strings the planner may emit. The superset of every built-in
/// application's bindings plus a generic key.
pub const HOTKEY_VOCABULARY: [&str; 5] = ["ctrl+b", "ctrl+g", "ctrl+l", "ctrl+t", "enter"];

// Feature layout:
//   0..6   plan action-kind one-hot
//   6..12  referenced-widget kind one-hot
//   12     instruction overlap score of the referenced widget or payload
//   13     referenced widget/payload named verbatim in the instruction
//   14     candidate repeats the previous step's plan
//   15     step fraction t / T
//   16     referenced widget's view changed since the previous observation
//   17     focus readiness for typing
//   18     referenced widget's value already matches an instruction payload
//   19     finish readiness: fraction of instruction payloads visible
//   20     finish readiness: fraction of instruction-named widgets acted on
const F_KIND: usize = 0;
const F_WIDGET_KIND: usize = 6;
const F_OVERLAP: usize = 12;
const F_NAMED: usize = 13;
const F_REPEAT: usize = 14;
const F_STEP_FRACTION: usize = 15;
const F_CHANGED: usize = 16;
const F_FOCUS_READY: usize = 17;
const F_VALUE_SET: usize = 18;
const F_FINISH_PAYLOADS: usize = 19;
const F_FINISH_ACTED: usize = 20;

fn kind_index(kind: ActionKind) -> usize {
    ActionKind::ALL.iter().position(|k| *k == kind).unwrap()
}

fn words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

/// Fraction of `reference` words that occur in `instruction`.
fn overlap_score(instruction_words: &BTreeSet<String>, reference: &str) -> f64 {
    let ref_words = words(reference);
    if ref_words.is_empty() {
        return 0.0;
    }
    let hits = ref_words.intersection(instruction_words).count();
    hits as f64 / ref_words.len() as f64
}

fn named_in(instruction: &str, reference: &str) -> bool {
    !reference.is_empty() && instruction.to_lowercase().contains(&reference.to_lowercase())
}

/// Double-quoted substrings of the instruction, in order, deduplicated.
/// These are the candidate payloads for `type` arguments.
pub fn payload_candidates(instruction: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = instruction;
    while let Some(start) = rest.find('"') {
        let tail = &rest[start + 1..];
        let Some(end) = tail.find('"') else { break };
        let payload = &tail[..end];
        if !payload.is_empty() && !out.iter().any(|p| p == payload) {
            out.push(payload.to_string());
        }
        rest = &tail[end + 1..];
    }
    out
}

fn view_changed(o_prev: &Observation, o_cur: &Observation, widget_id: &str) -> bool {
    match (o_prev.view(widget_id), o_cur.view(widget_id)) {
        (Some(a), Some(b)) => a != b,
        (None, None) => false,
        _ => true,
    }
}

/// The widget id a token refers to, if any: targets always, and drag
/// destinations (an argument token under a drag prefix).
fn referenced_widget<'t>(prefix: &[Token], candidate: &'t Token) -> Option<&'t str> {
    match candidate {
        Token::Target(id) => Some(id),
        Token::Argument(arg) => match prefix.first() {
            Some(Token::Kind(ActionKind::Drag)) => Some(arg),
            _ => None,
        },
        Token::Kind(_) => None,
    }
}

/// Payload text a token carries, if any (type/hotkey arguments).
fn payload_text<'t>(prefix: &[Token], candidate: &'t Token) -> Option<&'t str> {
    match candidate {
        Token::Argument(arg) => match prefix.first() {
            Some(Token::Kind(ActionKind::Type)) | Some(Token::Kind(ActionKind::Hotkey)) => {
                Some(arg)
            }
            _ => None,
        },
        _ => None,
    }
}

/// Build the feature vector for one candidate token given the already-chosen
/// prefix. Deterministic; every entry lies in [0, 1].
pub fn features(ctx: &StepContext<'_>, prefix: &[Token], candidate: &Token) -> Vec<f64> {
    let mut phi = vec![0.0; FEATURE_DIM];
    let instruction = &ctx.task.instruction;
    let instruction_words = words(instruction);
    let payloads = payload_candidates(instruction);

    let plan_kind = match (prefix.first(), candidate) {
        (_, Token::Kind(k)) => *k,
        (Some(Token::Kind(k)), _) => *k,
        // Unreachable for well-formed prefixes; treated as finish.
        _ => ActionKind::Finish,
    };
    phi[F_KIND + kind_index(plan_kind)] = 1.0;

    if let Some(widget_id) = referenced_widget(prefix, candidate) {
        if let Some(view) = ctx.o_cur.view(widget_id) {
            phi[F_WIDGET_KIND + view.kind as usize] = 1.0;
            let reference = format!("{} {}", view.label, view.id);
            phi[F_OVERLAP] = overlap_score(&instruction_words, &reference);
            if named_in(instruction, &view.label) {
                phi[F_NAMED] = 1.0;
            }
            if view_changed(ctx.o_prev, ctx.o_cur, widget_id) {
                phi[F_CHANGED] = 1.0;
            }
            if !view.value.is_empty() && payloads.iter().any(|p| *p == view.value) {
                phi[F_VALUE_SET] = 1.0;
            }
            if plan_kind == ActionKind::Type && view.focused {
                phi[F_FOCUS_READY] = 1.0;
            }
        }
    }

    if let Some(payload) = payload_text(prefix, candidate) {
        phi[F_OVERLAP] = overlap_score(&instruction_words, payload);
        if named_in(instruction, payload) {
            phi[F_NAMED] = 1.0;
        }
        if plan_kind == ActionKind::Type {
            // Target field already holds this payload.
            if let Some(Token::Target(field)) = prefix.get(1) {
                if ctx.o_cur.view(field).is_some_and(|v| v.value == *payload) {
                    phi[F_VALUE_SET] = 1.0;
                }
            }
        }
    }

    if let Token::Kind(kind) = candidate {
        if *kind == ActionKind::Type && ctx.o_cur.views.iter().any(|v| v.focused) {
            phi[F_FOCUS_READY] = 1.0;
        }
        if *kind == ActionKind::Finish {
            if !payloads.is_empty() {
                let present = payloads
                    .iter()
                    .filter(|p| ctx.o_cur.views.iter().any(|v| v.value == **p))
                    .count();
                phi[F_FINISH_PAYLOADS] = present as f64 / payloads.len() as f64;
            }
            let named: Vec<&str> = ctx
                .o_cur
                .views
                .iter()
                .filter(|v| named_in(instruction, &v.label))
                .map(|v| v.id.as_str())
                .collect();
            if !named.is_empty() {
                let acted = named
                    .iter()
                    .filter(|id| {
                        ctx.history
                            .steps
                            .iter()
                            .any(|s| s.plan.target.as_deref() == Some(**id))
                    })
                    .count();
                phi[F_FINISH_ACTED] = acted as f64 / named.len() as f64;
            }
        }
    }

    if let Some(last) = ctx.history.steps.last() {
        let last_tokens = last.plan.tokens();
        let pos = prefix.len();
        if last_tokens.len() > pos
            && last_tokens[..pos] == *prefix
            && last_tokens[pos] == *candidate
        {
            phi[F_REPEAT] = 1.0;
        }
    }

    phi[F_STEP_FRACTION] = ctx.history.steps.len() as f64 / f64::from(ctx.task.max_steps.max(1));

    phi
}
