//! Task registry with optional persistence to `tasks.jsonl`.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use flowboat_core::catalog::Catalog;
use flowboat_core::task::{parse_recording, TaskDefinition, TaskError};

const TASK_LOG: &str = "tasks.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("task storage failed: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt task log: {0}")]
    Corrupt(String),
}

#[derive(Debug, Default)]
pub struct TaskRegistry {
    path: Option<PathBuf>,
    tasks: Vec<TaskDefinition>,
}

impl TaskRegistry {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(dir: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let path = dir.as_ref().join(TASK_LOG);
        let mut tasks = Vec::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines().filter(|l| !l.trim().is_empty()) {
                tasks.push(serde_json::from_str(line).map_err(|e| RegistryError::Corrupt(e.to_string()))?);
            }
        }
        Ok(Self {
            path: Some(path),
            tasks,
        })
    }

    fn next_id(&self) -> String {
        format!("t{}", self.tasks.len() + 1)
    }

    fn persist(&mut self, task: TaskDefinition) -> Result<TaskDefinition, RegistryError> {
        if let Some(path) = &self.path {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", serde_json::to_string(&task).map_err(io::Error::from)?)?;
            f.sync_data()?;
        }
        self.tasks.push(task.clone());
        Ok(task)
    }

    pub fn define_manual(
        &mut self,
        start: &str,
        end: &str,
        name: Option<String>,
        catalog: &Catalog,
    ) -> Result<TaskDefinition, RegistryError> {
        let task = TaskDefinition::manual(self.next_id(), start, end, name, catalog)?;
        self.persist(task)
    }

    /// Task from the text of a recording file (one element id per line).
    pub fn define_from_recording(
        &mut self,
        recording: &str,
        name: Option<String>,
        catalog: &Catalog,
    ) -> Result<TaskDefinition, RegistryError> {
        let ids = parse_recording(recording);
        let task = TaskDefinition::from_recording(self.next_id(), &ids, name, catalog)?;
        self.persist(task)
    }

    pub fn get(&self, task_id: &str) -> Option<&TaskDefinition> {
        self.tasks.iter().find(|t| t.task_id == task_id)
    }

    pub fn all(&self) -> &[TaskDefinition] {
        &self.tasks
    }
}
