//! Structured planner output: a short sequence of decision tokens plus an
//! unscored free-text rationale.
//!
//! A plan carries at most three decision tokens: the action type, an optional
//! target widget, and an optional argument (text payload for `type`/`hotkey`,
//! destination widget for `drag`). The rationale never enters probabilities
//! or rewards.

use serde::{Deserialize, Serialize};

use crate::action::ActionKind;

/// A single decision token at one autoregressive position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Kind(ActionKind),
    Target(String),
    Argument(String),
}

/// The planner's structured thought for one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub kind: ActionKind,
    /// Widget id from the current observation; `None` for finish and hotkey.
    #[serde(default)]
    pub target: Option<String>,
    /// Text payload for type/hotkey, destination widget id for drag,
    /// empty otherwise.
    #[serde(default)]
    pub argument: String,
    /// Free text, excluded from scoring.
    #[serde(default)]
    pub rationale: String,
}

impl Plan {
    pub fn finish() -> Plan {
        Plan {
            kind: ActionKind::Finish,
            target: None,
            argument: String::new(),
            rationale: String::new(),
        }
    }

    pub fn click(target: impl Into<String>) -> Plan {
        Plan {
            kind: ActionKind::Click,
            target: Some(target.into()),
            argument: String::new(),
            rationale: String::new(),
        }
    }

    pub fn double_click(target: impl Into<String>) -> Plan {
        Plan {
            kind: ActionKind::DoubleClick,
            target: Some(target.into()),
            argument: String::new(),
            rationale: String::new(),
        }
    }

    pub fn type_text(target: impl Into<String>, text: impl Into<String>) -> Plan {
        Plan {
            kind: ActionKind::Type,
            target: Some(target.into()),
            argument: text.into(),
            rationale: String::new(),
        }
    }

    pub fn hotkey(keys: impl Into<String>) -> Plan {
        Plan {
            kind: ActionKind::Hotkey,
            target: None,
            argument: keys.into(),
            rationale: String::new(),
        }
    }

    pub fn drag(source: impl Into<String>, dest: impl Into<String>) -> Plan {
        Plan {
            kind: ActionKind::Drag,
            target: Some(source.into()),
            argument: dest.into(),
            rationale: String::new(),
        }
    }

    /// Number of decision tokens: 1 for finish, 2 for click/double-click and
    /// hotkey, 3 for type and drag.
    pub fn token_count(&self) -> usize {
        match self.kind {
            ActionKind::Finish => 1,
            ActionKind::Click | ActionKind::DoubleClick | ActionKind::Hotkey => 2,
            ActionKind::Type | ActionKind::Drag => 3,
        }
    }

    /// The decision tokens in autoregressive order.
    pub fn tokens(&self) -> Vec<Token> {
        let mut out = vec![Token::Kind(self.kind)];
        match self.kind {
            ActionKind::Finish => {}
            ActionKind::Hotkey => out.push(Token::Argument(self.argument.clone())),
            ActionKind::Click | ActionKind::DoubleClick => {
                out.push(Token::Target(self.target.clone().unwrap_or_default()));
            }
            ActionKind::Type | ActionKind::Drag => {
                out.push(Token::Target(self.target.clone().unwrap_or_default()));
                out.push(Token::Argument(self.argument.clone()));
            }
        }
        out
    }

    /// Equality over decision tokens only; rationale is ignored.
    pub fn decision_eq(&self, other: &Plan) -> bool {
        self.kind == other.kind && self.target == other.target && self.argument == other.argument
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_counts_match_kind() {
        assert_eq!(Plan::finish().token_count(), 1);
        assert_eq!(Plan::click("w").token_count(), 2);
        assert_eq!(Plan::hotkey("ctrl+s").token_count(), 2);
        assert_eq!(Plan::type_text("f", "x").token_count(), 3);
        assert_eq!(Plan::drag("a", "b").token_count(), 3);
        for p in [
            Plan::finish(),
            Plan::click("w"),
            Plan::hotkey("ctrl+s"),
            Plan::type_text("f", "x"),
            Plan::drag("a", "b"),
        ] {
            assert_eq!(p.tokens().len(), p.token_count());
        }
    }

    #[test]
    fn rationale_excluded_from_decision_eq() {
        let mut a = Plan::click("w");
        let mut b = Plan::click("w");
        a.rationale = "because".into();
        b.rationale = "different".into();
        assert!(a.decision_eq(&b));
        assert!(!a.decision_eq(&Plan::click("v")));
    }
}
