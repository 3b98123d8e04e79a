use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::extract::{InteractionSequence, SequenceStatus};

/// Sequence filter. Present criteria are combined with AND; within one
/// criterion any listed value matches. `top_n_flows` is rank-dependent and
/// is applied where flows are ranked, not by [`apply_filter`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub software_versions: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub car_models: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_n_flows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statuses: Option<BTreeSet<SequenceStatus>>,
    /// Inclusive bounds on the first event timestamp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_range: Option<(i64, i64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("top_n_flows must be at least 1")]
    ZeroTopN,
    #[error("time range start is after its end")]
    InvertedTimeRange,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<(), FilterError> {
        if self.top_n_flows == Some(0) {
            return Err(FilterError::ZeroTopN);
        }
        if let Some((from, to)) = self.time_range {
            if from > to {
                return Err(FilterError::InvertedTimeRange);
            }
        }
        Ok(())
    }

    pub fn matches(&self, seq: &InteractionSequence) -> bool {
        fn allowed<T: Ord>(set: &Option<BTreeSet<T>>, value: &T) -> bool {
            set.as_ref().is_none_or(|s| s.contains(value))
        }
        allowed(&self.software_versions, &seq.software_version)
            && allowed(&self.car_models, &seq.car_model)
            && allowed(&self.statuses, &seq.status)
            && self
                .time_range
                .is_none_or(|(from, to)| (from..=to).contains(&seq.first_ms()))
    }
}

pub fn apply_filter(sequences: &[InteractionSequence], filter: &FilterSpec) -> Vec<InteractionSequence> {
    sequences.iter().filter(|s| filter.matches(s)).cloned().collect()
}
