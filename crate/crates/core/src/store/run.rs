//! Run writers, readers, the clean filter, and verification.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::{EnvCatalog, Task};
use crate::judge::{is_clean, JudgeVerdict};
use crate::store::{StoreError, Trajectory, FORMAT_VERSION};

const LOG_FILE: &str = "log.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunCounts {
    pub tasks: u64,
    pub trajectories: u64,
    pub clean_trajectories: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    /// `stage1:<software>`, `stage2`, `eval`, or a caller-chosen tag.
    pub stage: String,
    pub format_version: u32,
    pub code_version: String,
    pub config_snapshot: serde_json::Value,
    pub counts: RunCounts,
    pub closed: bool,
}

/// One log line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Manifest(RunManifest),
    Task(Task),
    Trajectory {
        id: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit_id: Option<u64>,
        trajectory: Trajectory,
    },
    Verdict {
        trajectory_id: u64,
        verdict: JudgeVerdict,
    },
}

/// Single writer for one run. Appends are flushed per record; `close`
/// appends a final manifest carrying the counts.
pub struct RunWriter {
    file: File,
    manifest: RunManifest,
    next_trajectory_id: u64,
}

impl RunWriter {
    pub fn create(
        root: &Path,
        run_id: &str,
        stage: &str,
        config_snapshot: serde_json::Value,
    ) -> Result<RunWriter, StoreError> {
        let dir = root.join(run_id);
        if dir.exists() {
            return Err(StoreError::RunExists(run_id.to_string()));
        }
        std::fs::create_dir_all(&dir).map_err(io_err)?;
        let manifest = RunManifest {
            run_id: run_id.to_string(),
            stage: stage.to_string(),
            format_version: FORMAT_VERSION,
            code_version: crate::store::CODE_VERSION.to_string(),
            config_snapshot,
            counts: RunCounts::default(),
            closed: false,
        };
        let file = OpenOptions::new()
            .create_new(true)
            .append(true)
            .open(dir.join(LOG_FILE))
            .map_err(io_err)?;
        let mut writer = RunWriter {
            file,
            manifest,
            next_trajectory_id: 0,
        };
        writer.write_record(&Record::Manifest(writer.manifest.clone()))?;
        Ok(writer)
    }

    /// Reopen an existing, still-open run for appending.
    pub fn resume(root: &Path, run_id: &str) -> Result<RunWriter, StoreError> {
        let reader = RunReader::open(root, run_id)?;
        if reader.manifest.closed {
            return Err(StoreError::RunClosed(run_id.to_string()));
        }
        let file = OpenOptions::new()
            .append(true)
            .open(root.join(run_id).join(LOG_FILE))
            .map_err(io_err)?;
        Ok(RunWriter {
            file,
            manifest: reader.manifest.clone(),
            next_trajectory_id: reader
                .trajectories
                .last()
                .map(|(id, _, _)| id + 1)
                .unwrap_or(0),
        })
    }

    fn write_record(&mut self, record: &Record) -> Result<(), StoreError> {
        let line = serde_json::to_string(record).map_err(|e| StoreError::Io(e.to_string()))?;
        writeln!(self.file, "{line}").map_err(io_err)?;
        self.file.flush().map_err(io_err)
    }

    pub fn append_task(&mut self, task: &Task) -> Result<(), StoreError> {
        self.write_record(&Record::Task(task.clone()))?;
        self.manifest.counts.tasks += 1;
        Ok(())
    }

    /// Returns the record id, strictly increasing per run.
    pub fn append_trajectory(
        &mut self,
        trajectory: &Trajectory,
        unit_id: Option<u64>,
    ) -> Result<u64, StoreError> {
        let id = self.next_trajectory_id;
        self.write_record(&Record::Trajectory {
            id,
            unit_id,
            trajectory: trajectory.clone(),
        })?;
        self.next_trajectory_id += 1;
        self.manifest.counts.trajectories += 1;
        Ok(id)
    }

    pub fn append_verdict(
        &mut self,
        trajectory_id: u64,
        verdict: &JudgeVerdict,
    ) -> Result<(), StoreError> {
        if is_clean(verdict) {
            self.manifest.counts.clean_trajectories += 1;
        }
        self.write_record(&Record::Verdict {
            trajectory_id,
            verdict: verdict.clone(),
        })
    }

    pub fn run_id(&self) -> &str {
        &self.manifest.run_id
    }

    /// Append the final manifest and mark the run closed.
    pub fn close(mut self) -> Result<RunManifest, StoreError> {
        self.manifest.closed = true;
        let manifest = self.manifest.clone();
        self.write_record(&Record::Manifest(manifest.clone()))?;
        Ok(manifest)
    }
}

fn io_err(e: std::io::Error) -> StoreError {
    StoreError::Io(e.to_string())
}

/// A fully loaded run. The last manifest line wins; unparseable lines are
/// counted as quarantined, not fatal.
#[derive(Debug, Clone)]
pub struct RunReader {
    pub manifest: RunManifest,
    pub tasks: Vec<Task>,
    /// (record id, orchestrator unit id, trajectory)
    pub trajectories: Vec<(u64, Option<u64>, Trajectory)>,
    pub verdicts: BTreeMap<u64, JudgeVerdict>,
    pub quarantined: usize,
    pub path: PathBuf,
}

impl RunReader {
    pub fn open(root: &Path, run_id: &str) -> Result<RunReader, StoreError> {
        let path = root.join(run_id).join(LOG_FILE);
        if !path.exists() {
            return Err(StoreError::RunNotFound(run_id.to_string()));
        }
        let file = File::open(&path).map_err(io_err)?;
        let mut manifest: Option<RunManifest> = None;
        let mut tasks = Vec::new();
        let mut trajectories = Vec::new();
        let mut verdicts = BTreeMap::new();
        let mut quarantined = 0usize;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(io_err)?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Record>(&line) {
                Ok(Record::Manifest(m)) => manifest = Some(m),
                Ok(Record::Task(t)) => tasks.push(t),
                Ok(Record::Trajectory {
                    id,
                    unit_id,
                    trajectory,
                }) => trajectories.push((id, unit_id, trajectory)),
                Ok(Record::Verdict {
                    trajectory_id,
                    verdict,
                }) => {
                    verdicts.insert(trajectory_id, verdict);
                }
                Err(_) => quarantined += 1,
            }
        }
        Ok(RunReader {
            manifest: manifest.ok_or(StoreError::MissingManifest)?,
            tasks,
            trajectories,
            verdicts,
            quarantined,
            path,
        })
    }

    pub fn task(&self, task_id: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == task_id)
    }
}

/// Anything that can answer "what was the verdict for record N".
pub trait VerdictSource {
    fn verdict_for(&self, trajectory_id: u64) -> Option<&JudgeVerdict>;
}

impl VerdictSource for BTreeMap<u64, JudgeVerdict> {
    fn verdict_for(&self, trajectory_id: u64) -> Option<&JudgeVerdict> {
        self.get(&trajectory_id)
    }
}

/// A clean trajectory with every action labeled positive.
#[derive(Debug, Clone)]
pub struct LabeledTrajectory {
    pub record_id: u64,
    pub trajectory: Trajectory,
    pub positive_actions: Vec<crate::action::Action>,
}

/// Keep exactly the trajectories whose verdict satisfies the clean rule
/// (correct, no redundant steps, no error step). Errors if any trajectory
/// lacks a verdict.
pub fn filter_clean(
    reader: &RunReader,
    verdicts: &dyn VerdictSource,
) -> Result<Vec<LabeledTrajectory>, StoreError> {
    let missing: Vec<u64> = reader
        .trajectories
        .iter()
        .map(|(id, _, _)| *id)
        .filter(|id| verdicts.verdict_for(*id).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(StoreError::MissingVerdicts(missing));
    }
    Ok(reader
        .trajectories
        .iter()
        .filter(|(id, _, _)| is_clean(verdicts.verdict_for(*id).expect("checked")))
        .map(|(id, _, trajectory)| LabeledTrajectory {
            record_id: *id,
            trajectory: trajectory.clone(),
            positive_actions: trajectory.steps.iter().map(|s| s.action.clone()).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub records: usize,
    pub quarantined: usize,
    pub counts_ok: bool,
    pub digests_ok: bool,
    pub issues: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.counts_ok && self.digests_ok && self.quarantined == 0
    }
}

/// Recompute counts and replay every trajectory to check its digests.
pub fn verify_run(
    root: &Path,
    run_id: &str,
    catalog: &EnvCatalog,
) -> Result<VerifyReport, StoreError> {
    let reader = RunReader::open(root, run_id)?;
    let mut report = VerifyReport {
        records: reader.tasks.len() + reader.trajectories.len() + reader.verdicts.len() + 1,
        quarantined: reader.quarantined,
        counts_ok: true,
        digests_ok: true,
        ..Default::default()
    };
    if reader.quarantined > 0 {
        report
            .issues
            .push(format!("{} quarantined record(s)", reader.quarantined));
    }
    let counts = &reader.manifest.counts;
    if counts.tasks != reader.tasks.len() as u64
        || counts.trajectories != reader.trajectories.len() as u64
    {
        report.counts_ok = false;
        report.issues.push(format!(
            "manifest counts ({}, {}) disagree with records ({}, {})",
            counts.tasks,
            counts.trajectories,
            reader.tasks.len(),
            reader.trajectories.len()
        ));
    }
    for (id, _, trajectory) in &reader.trajectories {
        let Some(task) = reader.task(&trajectory.task_id) else {
            report.digests_ok = false;
            report
                .issues
                .push(format!("record {id}: task '{}' not in log", trajectory.task_id));
            continue;
        };
        let model = match catalog.get(&trajectory.software) {
            Ok(m) => m,
            Err(e) => {
                report.digests_ok = false;
                report.issues.push(format!("record {id}: {e}"));
                continue;
            }
        };
        if let Err(e) = crate::rollout::replay_trajectory(model, task, trajectory) {
            report.digests_ok = false;
            report.issues.push(format!("record {id}: {e}"));
        }
    }
    Ok(report)
}
