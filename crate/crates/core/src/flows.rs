//! Grouping of sequences into flows: sequences with the same element path
//! and the same outcome.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::extract::{InteractionSequence, SequenceStatus};
use crate::hash::short_id;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    Aborted,
}

impl FlowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowStatus::Completed => "completed",
            FlowStatus::Aborted => "aborted",
        }
    }
}

impl From<SequenceStatus> for FlowStatus {
    fn from(s: SequenceStatus) -> Self {
        if s.is_completed() {
            FlowStatus::Completed
        } else {
            FlowStatus::Aborted
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flow {
    pub flow_id: String,
    pub path: Vec<String>,
    pub status: FlowStatus,
    pub sequence_ids: Vec<String>,
    pub count: usize,
}

pub fn flow_id<S: AsRef<str>>(path: &[S], status: FlowStatus) -> String {
    let mut parts: Vec<&str> = Vec::with_capacity(path.len() + 1);
    parts.push(status.as_str());
    parts.extend(path.iter().map(AsRef::as_ref));
    short_id("f", &parts)
}

/// Partitions `sequences` into flows, most frequent first, ties by id.
pub fn group_flows(sequences: &[InteractionSequence]) -> Vec<Flow> {
    let mut groups: BTreeMap<(FlowStatus, Vec<&str>), Vec<String>> = BTreeMap::new();
    for seq in sequences {
        groups
            .entry((seq.status.into(), seq.path()))
            .or_default()
            .push(seq.sequence_id.clone());
    }
    let mut flows: Vec<Flow> = groups
        .into_iter()
        .map(|((status, path), sequence_ids)| Flow {
            flow_id: flow_id(&path, status),
            path: path.into_iter().map(String::from).collect(),
            status,
            count: sequence_ids.len(),
            sequence_ids,
        })
        .collect();
    flows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.flow_id.cmp(&b.flow_id)));
    flows
}


#[cfg(test)]
mod tests {
    use super::fixtures::sequence;
    use super::*;
    use alloc::vec;

    #[test]
    fn groups_by_path() {
        let seqs = vec![
            sequence(0, &["S", "E"], SequenceStatus::Completed),
            sequence(1, &["S", "B", "E"], SequenceStatus::Completed),
            sequence(2, &["S", "E"], SequenceStatus::Completed),
        ];
        let flows = group_flows(&seqs);
        assert_eq!(flows.len(), 2);
        assert_eq!(flows[0].count, 2);
        assert_eq!(flows[0].sequence_ids, vec!["seq0", "seq2"]);
        assert_eq!(flows[1].count, 1);
    }

    #[test]
    fn status_is_part_of_identity() {
        let seqs = vec![
            sequence(0, &["S", "E"], SequenceStatus::Completed),
            sequence(1, &["S", "E"], SequenceStatus::AbortedGap),
        ];
        let flows = group_flows(&seqs);
        assert_eq!(flows.len(), 2);
        assert_ne!(flows[0].flow_id, flows[1].flow_id);
    }

    #[test]
    fn aborted_variants_share_a_flow() {
        let seqs = vec![
            sequence(0, &["S", "B"], SequenceStatus::AbortedGap),
            sequence(1, &["S", "B"], SequenceStatus::AbortedRestart),
        ];
        assert_eq!(group_flows(&seqs).len(), 1);
    }

    #[test]
    fn empty_input() {
        assert!(group_flows(&[]).is_empty());
    }
}
