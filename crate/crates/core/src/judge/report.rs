//! Judge-evaluation reports: one row per strategy, precision and recall
//! columns, rendered as text and as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::JudgeError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeReportRow {
    pub strategy: String,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JudgeReport {
    pub corpus_size: usize,
    pub rows: Vec<JudgeReportRow>,
}

impl JudgeReport {
    pub fn render_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.strategy.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = format!("{:<width$}  {:>9}  {:>9}\n", "strategy", "precision", "recall");
        for row in &self.rows {
            let fmt = |v: Option<f64>| match v {
                Some(x) => format!("{:>9.3}", x),
                None => format!("{:>9}", "-"),
            };
            out.push_str(&format!(
                "{:<width$}  {}  {}\n",
                row.strategy,
                fmt(row.precision),
                fmt(row.recall)
            ));
        }
        out
    }

    pub fn save_json(&self, path: &Path) -> Result<(), JudgeError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| JudgeError::ReportIo(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| JudgeError::ReportIo(e.to_string()))
    }

    pub fn load_json(path: &Path) -> Result<Self, JudgeError> {
        let text = std::fs::read_to_string(path).map_err(|e| JudgeError::ReportIo(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| JudgeError::ReportIo(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_and_roundtrips() {
        let report = JudgeReport {
            corpus_size: 200,
            rows: vec![
                JudgeReportRow {
                    strategy: "single".into(),
                    precision: Some(0.645),
                    recall: Some(0.834),
                },
                JudgeReportRow {
                    strategy: "voting@4".into(),
                    precision: Some(0.761),
                    recall: Some(0.795),
                },
                JudgeReportRow {
                    strategy: "none".into(),
                    precision: None,
                    recall: Some(0.0),
                },
            ],
        };
        let text = report.render_text();
        assert!(text.contains("voting@4"));
        assert!(text.contains("0.761"));
        assert!(text.contains('-'));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        report.save_json(&path).unwrap();
        assert_eq!(JudgeReport::load_json(&path).unwrap(), report);
    }
}
