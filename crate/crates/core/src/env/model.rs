//! Software models, world state, and the transition function.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::env::EnvError;
use crate::geometry::{Point, Rect, Resolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    Button,
    TextField,
    Toggle,
    Menu,
    MenuItem,
    Canvas,
}

impl WidgetKind {
    pub const ALL: [WidgetKind; 6] = [
        WidgetKind::Button,
        WidgetKind::TextField,
        WidgetKind::Toggle,
        WidgetKind::Menu,
        WidgetKind::MenuItem,
        WidgetKind::Canvas,
    ];
}

/// A single UI element. `value` is the initial value; live values are held
/// in [`WorldState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Widget {
    pub id: String,
    pub kind: WidgetKind,
    pub bbox: Rect,
    pub label: String,
    #[serde(default)]
    pub value: String,
    #[serde(default = "default_true")]
    pub visible: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub id: String,
    pub widgets: Vec<Widget>,
}

/// A piece of a composed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuePart {
    Lit(String),
    WidgetValue(String),
}

/// Declarative state change applied when a widget or hotkey fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Effect {
    Navigate { screen: String },
    SetValue { widget: String, value: String },
    ClearValue { widget: String },
    CopyValue { from: String, to: String },
    ToggleValue { widget: String },
    Compose { target: String, parts: Vec<ValuePart> },
}

/// Effects fired when dragging from one specific widget to another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DragRule {
    pub source: String,
    pub dest: String,
    pub effects: Vec<Effect>,
}

/// A deterministic simulated application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftwareModel {
    pub name: String,
    pub native: Resolution,
    pub initial_screen: String,
    pub screens: Vec<Screen>,
    #[serde(default)]
    pub click_effects: BTreeMap<String, Vec<Effect>>,
    #[serde(default)]
    pub double_click_effects: BTreeMap<String, Vec<Effect>>,
    #[serde(default)]
    pub hotkeys: BTreeMap<String, Vec<Effect>>,
    #[serde(default)]
    pub drag_rules: Vec<DragRule>,
    /// Text payloads tasks draw typed values from; also the oracle solver's
    /// typing alphabet.
    #[serde(default)]
    pub value_vocabulary: Vec<String>,
}

impl SoftwareModel {
    pub fn screen(&self, id: &str) -> Option<&Screen> {
        self.screens.iter().find(|s| s.id == id)
    }

    pub fn widget(&self, id: &str) -> Option<&Widget> {
        self.screens
            .iter()
            .flat_map(|s| s.widgets.iter())
            .find(|w| w.id == id)
    }

    /// The screen a widget lives on.
    pub fn screen_of(&self, widget_id: &str) -> Option<&str> {
        self.screens
            .iter()
            .find(|s| s.widgets.iter().any(|w| w.id == widget_id))
            .map(|s| s.id.as_str())
    }

    pub fn initial_state(&self) -> WorldState {
        let values = self
            .screens
            .iter()
            .flat_map(|s| s.widgets.iter())
            .map(|w| (w.id.clone(), w.value.clone()))
            .collect();
        WorldState {
            software: self.name.clone(),
            screen: self.initial_screen.clone(),
            values,
            focus: None,
            step: 0,
        }
    }

    /// Checks the structural invariants: bboxes inside the native bounds,
    /// globally unique widget ids, and pairwise disjoint visible widgets per
    /// screen (closed rectangles, so a one-pixel gap is required).
    pub fn validate(&self) -> Result<(), EnvError> {
        let fail = |reason: String| EnvError::InvalidModel {
            name: self.name.clone(),
            reason,
        };
        if self.screen(&self.initial_screen).is_none() {
            return Err(fail(format!("missing initial screen '{}'", self.initial_screen)));
        }
        let bounds = Rect::new(0, 0, i64::from(self.native.w), i64::from(self.native.h));
        let mut ids = BTreeSet::new();
        for screen in &self.screens {
            for w in &screen.widgets {
                if !ids.insert(w.id.clone()) {
                    return Err(fail(format!("duplicate widget id '{}'", w.id)));
                }
                if w.bbox.w <= 0 || w.bbox.h <= 0 {
                    return Err(fail(format!("widget '{}' has a degenerate bbox", w.id)));
                }
                let inside = w.bbox.x >= bounds.x
                    && w.bbox.y >= bounds.y
                    && w.bbox.x + w.bbox.w <= bounds.w
                    && w.bbox.y + w.bbox.h <= bounds.h;
                if !inside {
                    return Err(fail(format!("widget '{}' exceeds screen bounds", w.id)));
                }
            }
            let visible: Vec<&Widget> = screen.widgets.iter().filter(|w| w.visible).collect();
            for (i, a) in visible.iter().enumerate() {
                for b in visible.iter().skip(i + 1) {
                    if a.bbox.touches_or_overlaps(&b.bbox) {
                        return Err(fail(format!(
                            "visible widgets '{}' and '{}' overlap on screen '{}'",
                            a.id, b.id, screen.id
                        )));
                    }
                }
            }
        }
        for rule in &self.drag_rules {
            if self.widget(&rule.source).is_none() || self.widget(&rule.dest).is_none() {
                return Err(fail(format!(
                    "drag rule references unknown widget '{}' or '{}'",
                    rule.source, rule.dest
                )));
            }
        }
        Ok(())
    }
}

/// The latent simulator state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub software: String,
    pub screen: String,
    pub values: BTreeMap<String, String>,
    /// Most recently clicked text field; `type` actions apply here.
    pub focus: Option<String>,
    pub step: u32,
}

impl WorldState {
    pub fn value(&self, widget_id: &str) -> &str {
        self.values.get(widget_id).map(String::as_str).unwrap_or("")
    }

    /// A canonical key ignoring the step counter, used for search dedup.
    pub fn canonical_key(&self) -> (String, Vec<(String, String)>, Option<String>) {
        (
            self.screen.clone(),
            self.values
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            self.focus.clone(),
        )
    }
}

/// Marker value a canvas takes after being clicked.
pub const CANVAS_MARKED: &str = "marked";

/// Applies one action. Total and deterministic: unrecognized or ineffective
/// actions return the state unchanged except for the step counter.
pub fn step(model: &SoftwareModel, state: &WorldState, action: &Action) -> WorldState {
    let mut next = state.clone();
    next.step = state.step + 1;
    match action {
        Action::Click { point } => {
            if let Some(w) = widget_at(model, state, *point) {
                apply_click(model, &mut next, &w);
            }
        }
        Action::DoubleClick { point } => {
            if let Some(w) = widget_at(model, state, *point) {
                apply_double_click(model, &mut next, &w);
            }
        }
        Action::Type { text } => {
            if let Some(focus) = state.focus.clone() {
                let on_screen = visible_on_active(model, state)
                    .any(|w| w.id == focus && w.kind == WidgetKind::TextField);
                if on_screen {
                    next.values.insert(focus, text.clone());
                }
            }
        }
        Action::Hotkey { keys } => {
            if let Some(effects) = model.hotkeys.get(keys).cloned() {
                apply_effects(model, &mut next, &effects);
            }
        }
        Action::Drag { source, dest } => {
            let src = widget_at(model, state, source.center());
            let dst = widget_at(model, state, dest.center());
            if let (Some(src), Some(dst)) = (src, dst) {
                apply_drag(model, &mut next, &src, &dst);
            }
        }
        Action::Finish => {}
    }
    next
}

fn widget_at(model: &SoftwareModel, state: &WorldState, point: Point) -> Option<Widget> {
    visible_on_active(model, state)
        .find(|w| w.bbox.contains(point))
        .cloned()
}

fn visible_on_active<'a>(
    model: &'a SoftwareModel,
    state: &WorldState,
) -> impl Iterator<Item = &'a Widget> {
    model
        .screen(&state.screen)
        .into_iter()
        .flat_map(|s| s.widgets.iter())
        .filter(|w| w.visible)
}

fn apply_click(model: &SoftwareModel, next: &mut WorldState, widget: &Widget) {
    match widget.kind {
        WidgetKind::TextField => next.focus = Some(widget.id.clone()),
        WidgetKind::Toggle => toggle_value(next, &widget.id),
        WidgetKind::Canvas => {
            next.values.insert(widget.id.clone(), CANVAS_MARKED.to_string());
        }
        WidgetKind::Button | WidgetKind::Menu | WidgetKind::MenuItem => {}
    }
    if let Some(effects) = model.click_effects.get(&widget.id).cloned() {
        apply_effects(model, next, &effects);
    }
}

fn apply_double_click(model: &SoftwareModel, next: &mut WorldState, widget: &Widget) {
    if widget.kind == WidgetKind::TextField {
        // Select-all-and-delete: focus the field and clear it.
        next.focus = Some(widget.id.clone());
        next.values.insert(widget.id.clone(), String::new());
    }
    if let Some(effects) = model.double_click_effects.get(&widget.id).cloned() {
        apply_effects(model, next, &effects);
    }
}

fn apply_drag(model: &SoftwareModel, next: &mut WorldState, src: &Widget, dst: &Widget) {
    let rule = model
        .drag_rules
        .iter()
        .find(|r| r.source == src.id && r.dest == dst.id)
        .cloned();
    if let Some(rule) = rule {
        apply_effects(model, next, &rule.effects);
    } else if matches!(dst.kind, WidgetKind::TextField | WidgetKind::Canvas) {
        // Default gesture: dragging deposits the source value on the target.
        let v = next.value(&src.id).to_string();
        next.values.insert(dst.id.clone(), v);
    }
}

fn toggle_value(state: &mut WorldState, widget_id: &str) {
    let flipped = if state.value(widget_id) == "on" { "off" } else { "on" };
    state.values.insert(widget_id.to_string(), flipped.to_string());
}

fn apply_effects(model: &SoftwareModel, state: &mut WorldState, effects: &[Effect]) {
    for effect in effects {
        match effect {
            Effect::Navigate { screen } => {
                if model.screen(screen).is_some() {
                    state.screen = screen.clone();
                }
            }
            Effect::SetValue { widget, value } => {
                state.values.insert(widget.clone(), value.clone());
            }
            Effect::ClearValue { widget } => {
                state.values.insert(widget.clone(), String::new());
            }
            Effect::CopyValue { from, to } => {
                let v = state.value(from).to_string();
                state.values.insert(to.clone(), v);
            }
            Effect::ToggleValue { widget } => toggle_value(state, widget),
            Effect::Compose { target, parts } => {
                let mut out = String::new();
                for part in parts {
                    match part {
                        ValuePart::Lit(s) => out.push_str(s),
                        ValuePart::WidgetValue(id) => out.push_str(state.value(id)),
                    }
                }
                state.values.insert(target.clone(), out);
            }
        }
    }
}

/// Catalog of software models addressable by name.
#[derive(Debug, Clone, Default)]
pub struct EnvCatalog {
    models: BTreeMap<String, SoftwareModel>,
}

impl EnvCatalog {
    pub fn new(models: impl IntoIterator<Item = SoftwareModel>) -> Self {
        EnvCatalog {
            models: models.into_iter().map(|m| (m.name.clone(), m)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Result<&SoftwareModel, EnvError> {
        self.models
            .get(name)
            .ok_or_else(|| EnvError::UnknownSoftware(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn insert(&mut self, model: SoftwareModel) {
        self.models.insert(model.name.clone(), model);
    }
}
