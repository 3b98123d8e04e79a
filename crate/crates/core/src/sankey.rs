//! Depth-layered flow graph. A node is an element at a given step of the
//! path; every path ends in an explicit END (completed) or ABORT sink so
//! drop-off per step stays visible.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::Serialize;

use crate::filter::FilterSpec;
use crate::flows::{Flow, FlowStatus};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NodeRef {
    pub depth: usize,
    pub element_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SankeyNode {
    pub depth: usize,
    pub element_id: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeTarget {
    Element { depth: usize, element_id: String },
    End { depth: usize },
    Abort { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SankeyEdge {
    pub from: NodeRef,
    pub to: EdgeTarget,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SankeyGraph {
    pub nodes: Vec<SankeyNode>,
    pub edges: Vec<SankeyEdge>,
    pub total_sequences: usize,
}

/// Builds the graph over `flows` (ranked as returned by `group_flows`),
/// keeping only the top `filter.top_n_flows` when set. Other filter
/// criteria must already have been applied to the sequences.
pub fn build_sankey(flows: &[Flow], filter: &FilterSpec) -> SankeyGraph {
    let selected = match filter.top_n_flows {
        Some(n) => &flows[..n.min(flows.len())],
        None => flows,
    };
    let mut nodes: BTreeMap<NodeRef, usize> = BTreeMap::new();
    let mut edges: BTreeMap<(NodeRef, EdgeTarget), usize> = BTreeMap::new();
    let mut total = 0;
    for flow in selected.iter().filter(|f| f.count > 0 && !f.path.is_empty()) {
        total += flow.count;
        for (depth, element) in flow.path.iter().enumerate() {
            let node = NodeRef {
                depth,
                element_id: element.clone(),
            };
            *nodes.entry(node.clone()).or_default() += flow.count;
            let to = match flow.path.get(depth + 1) {
                Some(next) => EdgeTarget::Element {
                    depth: depth + 1,
                    element_id: next.clone(),
                },
                None if flow.status == FlowStatus::Completed => EdgeTarget::End { depth: depth + 1 },
                None => EdgeTarget::Abort { depth: depth + 1 },
            };
            *edges.entry((node, to)).or_default() += flow.count;
        }
    }
    SankeyGraph {
        nodes: nodes
            .into_iter()
            .map(|(n, count)| SankeyNode {
                depth: n.depth,
                element_id: n.element_id,
                count,
            })
            .collect(),
        edges: edges
            .into_iter()
            .map(|((from, to), count)| SankeyEdge { from, to, count })
            .collect(),
        total_sequences: total,
    }
}
