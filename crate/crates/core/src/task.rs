//! Task definitions: a start and an end UI element bounding the behavior
//! under analysis.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskDefinition {
    pub task_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub start_element: String,
    pub end_element: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("element {0:?} is not interactive")]
    NotInteractive(String),
    #[error("start and end element must differ")]
    StartEqualsEnd,
    #[error("recording needs at least two element ids")]
    TooShort,
}

impl TaskError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            TaskError::UnknownElement(_) => "unknown_element",
            TaskError::NotInteractive(_) => "not_interactive",
            TaskError::StartEqualsEnd => "start_equals_end",
            TaskError::TooShort => "too_short",
        }
    }
}

impl TaskDefinition {
    /// Task from an explicitly chosen start and end element.
    pub fn manual(
        task_id: impl Into<String>,
        start_element: &str,
        end_element: &str,
        name: Option<String>,
        catalog: &Catalog,
    ) -> Result<Self, TaskError> {
        for id in [start_element, end_element] {
            let element = catalog.get(id).ok_or_else(|| TaskError::UnknownElement(id.into()))?;
            if !element.interactive {
                return Err(TaskError::NotInteractive(id.into()));
            }
        }
        if start_element == end_element {
            return Err(TaskError::StartEqualsEnd);
        }
        Ok(Self {
            task_id: task_id.into(),
            name,
            start_element: start_element.into(),
            end_element: end_element.into(),
        })
    }

    /// Task bounded by the first and last element of a recorded click path.
    /// Every recorded id must resolve, not just the two bounds.
    pub fn from_recording<S: AsRef<str>>(
        task_id: impl Into<String>,
        recording: &[S],
        name: Option<String>,
        catalog: &Catalog,
    ) -> Result<Self, TaskError> {
        if recording.len() < 2 {
            return Err(TaskError::TooShort);
        }
        if let Some(missing) = recording.iter().find(|id| catalog.get(id.as_ref()).is_none()) {
            return Err(TaskError::UnknownElement(missing.as_ref().into()));
        }
        let first = recording[0].as_ref();
        let last = recording[recording.len() - 1].as_ref();
        Self::manual(task_id, first, last, name, catalog)
    }
}

/// Splits a recording file into element ids, one per non-blank line.
pub fn parse_recording(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}
