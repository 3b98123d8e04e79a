//! Reference implementations used to cross-check the production code.
//! Each one follows a different route from the code under test.
#![allow(dead_code)]

use std::collections::BTreeMap;

use flowboat_core::boxplot::BoxplotStats;
use flowboat_core::extract::SequenceStatus;
use flowboat_core::model::GlanceEvent;
use flowboat_core::sankey::{EdgeTarget, SankeyGraph};

/// Enumerates every index window `[i, j]` of a session and keeps the ones
/// that qualify as an attempt, checking the closing condition declaratively
/// instead of simulating a scan.
pub fn brute_force_windows(
    events: &[(i64, &str)],
    start: &str,
    end: &str,
    max_gap_ms: i64,
) -> Vec<(usize, usize, SequenceStatus)> {
    let n = events.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if events[i].1 != start {
                continue;
            }
            let gaps_ok = (i + 1..=j).all(|k| events[k].0 - events[k - 1].0 <= max_gap_ms);
            let no_inner_start = (i + 1..=j).all(|k| events[k].1 != start);
            let no_inner_end = (i + 1..j).all(|k| events[k].1 != end);
            if !(gaps_ok && no_inner_start && no_inner_end) {
                continue;
            }
            let status = if j > i && events[j].1 == end {
                Some(SequenceStatus::Completed)
            } else if j + 1 == n {
                Some(SequenceStatus::AbortedSessionEnd)
            } else if events[j + 1].0 - events[j].0 > max_gap_ms {
                Some(SequenceStatus::AbortedGap)
            } else if events[j + 1].1 == start {
                Some(SequenceStatus::AbortedRestart)
            } else {
                None
            };
            if let Some(status) = status {
                out.push((i, j, status));
            }
        }
    }
    out
}

fn at_depth(sorted: &[f64], depth: f64) -> f64 {
    // depth is 1-based and either integral or a half
    let lo = depth.floor() as usize;
    if depth.fract() == 0.0 {
        sorted[lo - 1]
    } else {
        (sorted[lo - 1] + sorted[lo]) / 2.0
    }
}

/// Tukey's depth formulation: median at depth (n+1)/2, hinges at depth
/// (floor(median depth)+1)/2 counted from either end.
pub fn order_statistics_boxplot(values: &[f64]) -> BoxplotStats {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let median_depth = (n as f64 + 1.0) / 2.0;
    let hinge_depth = (median_depth.floor() + 1.0) / 2.0;
    let median = at_depth(&v, median_depth);
    let q1 = at_depth(&v, hinge_depth);
    let reversed: Vec<f64> = v.iter().rev().copied().collect();
    let q3 = at_depth(&reversed, hinge_depth);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let mut whisker_low = f64::INFINITY;
    let mut whisker_high = f64::NEG_INFINITY;
    let mut outliers = Vec::new();
    for &x in &v {
        if x < lo || x > hi {
            outliers.push(x);
        } else {
            whisker_low = whisker_low.min(x);
            whisker_high = whisker_high.max(x);
        }
    }
    BoxplotStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    }
}

/// Per-node (inflow, outflow) computed from the edge list alone; depth-0
/// inflow is the graph's sequence total.
pub fn node_balance(g: &SankeyGraph) -> BTreeMap<(usize, String), (usize, usize)> {
    let mut balance: BTreeMap<(usize, String), (usize, usize)> = BTreeMap::new();
    for node in &g.nodes {
        balance.entry((node.depth, node.element_id.clone())).or_default();
    }
    for edge in &g.edges {
        balance
            .entry((edge.from.depth, edge.from.element_id.clone()))
            .or_default()
            .1 += edge.count;
        if let EdgeTarget::Element { depth, element_id } = &edge.to {
            balance.entry((*depth, element_id.clone())).or_default().0 += edge.count;
        }
    }
    for ((depth, _), (inflow, _)) in balance.iter_mut() {
        if *depth == 0 {
            *inflow = g.total_sequences;
        }
    }
    balance
}

/// Measure of the part of `[from, to]` covered by glances to `aoi`,
/// counted one millisecond cell `[t, t + 1]` at a time.
pub fn covered_ms(glances: &[GlanceEvent], aoi: flowboat_core::Aoi, from: i64, to: i64) -> i64 {
    (from..to)
        .filter(|t| {
            glances
                .iter()
                .any(|g| g.aoi == aoi && g.start_ms <= *t && *t < g.end_ms)
        })
        .count() as i64
}
