//! Per-sequence metrics and per-flow metric distributions.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use serde::{Serialize, Serializer};

use crate::boxplot::{boxplot_stats, BoxplotStats};
use crate::extract::InteractionSequence;
use crate::filter::{apply_filter, FilterSpec};
use crate::flows::{group_flows, FlowStatus};
use crate::model::{Aoi, SignalSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    TimeOnTaskMs,
    NInteractions,
    /// Total glance duration to the metric AOI, clipped to the event span.
    TgdMs,
    /// Mean glance duration: `TgdMs / NGlances`.
    MgdMs,
    NGlances,
    MeanSpeedMps,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric {0:?}")]
pub struct UnknownMetric(pub String);

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::TimeOnTaskMs,
        Metric::NInteractions,
        Metric::TgdMs,
        Metric::MgdMs,
        Metric::NGlances,
        Metric::MeanSpeedMps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::TimeOnTaskMs => "time_on_task_ms",
            Metric::NInteractions => "n_interactions",
            Metric::TgdMs => "tgd_ms",
            Metric::MgdMs => "mgd_ms",
            Metric::NGlances => "n_glances",
            Metric::MeanSpeedMps => "mean_speed_mps",
        }
    }
}

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownMetric(s.into()))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Glances to `aoi` with positive duration after clipping to the span.
fn contributing_glances(seq: &InteractionSequence, aoi: Aoi) -> (i64, usize) {
    seq.clipped_glances()
        .iter()
        .filter(|g| g.aoi == aoi && g.duration_ms() > 0)
        .fold((0, 0), |(total, n), g| (total + g.duration_ms(), n + 1))
}

fn speed_at(samples: &[SignalSample], t: f64) -> f64 {
    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    if t <= first.timestamp_ms as f64 {
        return first.speed_mps;
    }
    if t >= last.timestamp_ms as f64 {
        return last.speed_mps;
    }
    let i = samples.partition_point(|s| (s.timestamp_ms as f64) <= t);
    let (a, b) = (&samples[i - 1], &samples[i]);
    let (ta, tb) = (a.timestamp_ms as f64, b.timestamp_ms as f64);
    a.speed_mps + (b.speed_mps - a.speed_mps) * (t - ta) / (tb - ta)
}

/// Trapezoidal time-weighted mean of speed over `[from, to]`, with speed
/// linearly interpolated between samples and held constant beyond them.
pub fn time_weighted_speed(samples: &[SignalSample], from: i64, to: i64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    if from >= to {
        return Some(speed_at(samples, from as f64));
    }
    let mut knots: Vec<i64> = Vec::with_capacity(samples.len() + 2);
    knots.push(from);
    knots.extend(samples.iter().map(|s| s.timestamp_ms).filter(|t| *t > from && *t < to));
    knots.push(to);
    let area: f64 = knots
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0] as f64, w[1] as f64);
            (speed_at(samples, a) + speed_at(samples, b)) * 0.5 * (b - a)
        })
        .sum();
    Some(area / (to - from) as f64)
}

/// Value of `metric` for one sequence, `None` when the required context
/// is missing (no contributing glances for `MgdMs`, no samples for speed).
pub fn compute_metric(seq: &InteractionSequence, metric: Metric, aoi: Aoi) -> Option<f64> {
    match metric {
        Metric::TimeOnTaskMs => Some((seq.last_ms() - seq.first_ms()) as f64),
        Metric::NInteractions => Some(seq.events.len() as f64),
        Metric::TgdMs => Some(contributing_glances(seq, aoi).0 as f64),
        Metric::NGlances => Some(contributing_glances(seq, aoi).1 as f64),
        Metric::MgdMs => {
            let (total, n) = contributing_glances(seq, aoi);
            (n > 0).then(|| total as f64 / n as f64)
        }
        Metric::MeanSpeedMps => time_weighted_speed(&seq.signals, seq.first_ms(), seq.last_ms()),
    }
}

/// Every defined metric of `seq`, keyed by metric id.
pub fn summary_metrics(seq: &InteractionSequence, aoi: Aoi) -> BTreeMap<&'static str, f64> {
    Metric::ALL
        .into_iter()
        .filter_map(|m| compute_metric(seq, m, aoi).map(|v| (m.as_str(), v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricPoint {
    pub sequence_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowDistribution {
    pub flow_id: String,
    pub path: Vec<String>,
    pub status: FlowStatus,
    pub count: usize,
    /// Absent when no sequence of the flow has a defined value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<BoxplotStats>,
    pub points: Vec<MetricPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDistribution {
    pub metric_id: Metric,
    pub flows: Vec<FlowDistribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistributionError {
    #[error("unknown flow {0:?}")]
    UnknownFlow(String),
    #[error("no flows selected")]
    NoFlowsSelected,
}

/// Distribution of `metric` per selected flow. Sequences are filtered
/// first, then grouped and ranked; `filter.top_n_flows` limits which flows
/// can be selected. `selected = None` means every remaining flow.
pub fn metric_distribution<S: AsRef<str>>(
    sequences: &[InteractionSequence],
    selected: Option<&[S]>,
    metric: Metric,
    filter: &FilterSpec,
    aoi: Aoi,
) -> Result<MetricDistribution, DistributionError> {
    let filtered = apply_filter(sequences, filter);
    let mut flows = group_flows(&filtered);
    if let Some(n) = filter.top_n_flows {
        flows.truncate(n);
    }
    let chosen: Vec<_> = match selected {
        None => flows.iter().collect(),
        Some([]) => return Err(DistributionError::NoFlowsSelected),
        Some(ids) => ids
            .iter()
            .map(|id| {
                flows
                    .iter()
                    .find(|f| f.flow_id == id.as_ref())
                    .ok_or_else(|| DistributionError::UnknownFlow(id.as_ref().into()))
            })
            .collect::<Result<_, _>>()?,
    };
    let by_id: BTreeMap<&str, &InteractionSequence> = filtered.iter().map(|s| (s.sequence_id.as_str(), s)).collect();
    let entries = chosen
        .into_iter()
        .map(|flow| {
            let points: Vec<MetricPoint> = flow
                .sequence_ids
                .iter()
                .filter_map(|id| {
                    let seq = by_id.get(id.as_str())?;
                    compute_metric(seq, metric, aoi).map(|value| MetricPoint {
                        sequence_id: id.clone(),
                        value,
                    })
                })
                .collect();
            let values: Vec<f64> = points.iter().map(|p| p.value).collect();
            FlowDistribution {
                flow_id: flow.flow_id.clone(),
                path: flow.path.clone(),
                status: flow.status,
                count: flow.count,
                stats: boxplot_stats(&values).ok(),
                points,
            }
        })
        .collect();
    Ok(MetricDistribution {
        metric_id: metric,
        flows: entries,
    })
}
