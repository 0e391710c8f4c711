//! Concrete GUI actions emitted by the executor and consumed by the
//! simulator. Coordinates are native-resolution pixels.

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Rect};

/// The action vocabulary shared by plans and actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Click,
    DoubleClick,
    Type,
    Hotkey,
    Drag,
    Finish,
}

impl ActionKind {
    pub const ALL: [ActionKind; 6] = [
        ActionKind::Click,
        ActionKind::DoubleClick,
        ActionKind::Type,
        ActionKind::Hotkey,
        ActionKind::Drag,
        ActionKind::Finish,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ActionKind::Click => "click",
            ActionKind::DoubleClick => "double_click",
            ActionKind::Type => "type",
            ActionKind::Hotkey => "hotkey",
            ActionKind::Drag => "drag",
            ActionKind::Finish => "finish",
        }
    }
}

impl std::fmt::Display for ActionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully parameterized GUI action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Click { point: Point },
    DoubleClick { point: Point },
    Type { text: String },
    Hotkey { keys: String },
    Drag { source: Rect, dest: Rect },
    Finish,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Click { .. } => ActionKind::Click,
            Action::DoubleClick { .. } => ActionKind::DoubleClick,
            Action::Type { .. } => ActionKind::Type,
            Action::Hotkey { .. } => ActionKind::Hotkey,
            Action::Drag { .. } => ActionKind::Drag,
            Action::Finish => ActionKind::Finish,
        }
    }
}
