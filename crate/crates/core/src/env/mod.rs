//! Simulated GUI software environments.
//!
//! Each [`SoftwareModel`] is a small deterministic application: named screens
//! holding widgets, a total transition function over [`Action`]s, and a
//! declarative effect vocabulary that wires buttons, menus, hotkeys, and
//! drags to state changes. [`render`] projects the hidden state onto a
//! resolution-dependent view with intentional information loss at low
//! resolutions. Goals are decidable predicates; tasks pair an instruction
//! with a goal and are generated from seeded templates, each checked for
//! reachability by the breadth-first oracle in [`solver`].

mod catalog;
mod config;
mod goal;
mod model;
mod render;
pub mod solver;
mod taskgen;

pub use catalog::{builtin_catalog, builtin_templates};
pub use config::{load_catalog_file, CatalogFile};
pub use goal::{goal_check, GoalAtom, GoalPredicate, OrderedProgress, SimpleAtom};
pub use model::{
    step, DragRule, Effect, EnvCatalog, Screen, SoftwareModel, ValuePart, Widget, WidgetKind,
    WorldState,
};
pub use render::{render, Observation, WidgetView, MIN_RENDER_WIDTH};
pub use taskgen::{generate_tasks, SlotDomain, SlotSpec, Task, TaskTemplate, DEFAULT_MAX_STEPS};

use thiserror::Error;

/// Errors from environment construction, rendering, and task generation.
#[derive(Debug, Error)]
pub enum EnvError {
    #[error("resolution {0} is narrower than the {MIN_RENDER_WIDTH} px minimum")]
    ResolutionTooSmall(crate::geometry::Resolution),
    #[error("resolution {0} does not preserve the native aspect ratio of {1}")]
    AspectMismatch(crate::geometry::Resolution, crate::geometry::Resolution),
    #[error("resolution {0} exceeds the native width of {1}")]
    ResolutionTooLarge(crate::geometry::Resolution, crate::geometry::Resolution),
    #[error("unknown software '{0}'")]
    UnknownSoftware(String),
    #[error("software model '{name}' is invalid: {reason}")]
    InvalidModel { name: String, reason: String },
    #[error("task generation needs n >= 1")]
    EmptyTaskRequest,
    #[error("task generation needs a non-empty template set")]
    EmptyTemplateSet,
    #[error("no reachable goal found for template '{template}' after {attempts} attempts")]
    UnsatisfiableTemplate { template: String, attempts: u32 },
    #[error("catalog file error: {0}")]
    CatalogFile(String),
}
