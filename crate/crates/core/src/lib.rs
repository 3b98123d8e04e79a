//! Pure analysis core for touchscreen interaction telemetry.
//!
//! Everything in this crate works on in-memory records and allocates only
//! through `alloc`; file formats, persistence and the HTTP surface live in
//! the `flowboat` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boxplot;
pub mod catalog;
pub mod detail;
pub mod extract;
pub mod filter;
pub mod flows;
pub mod metrics;
pub mod model;
pub mod sankey;
pub mod task;

mod hash;

pub use boxplot::{boxplot_stats, BoxplotStats, EmptyInput};
pub use catalog::{Catalog, CatalogError, UiElement};
pub use detail::{sequence_detail, SequenceDetail};
pub use extract::{
    attach_context, extract_sequences, extract_session, ExtractionConfig, InteractionSequence, SequenceStatus,
    SessionData, SIGNAL_PADDING_MS,
};
pub use filter::{apply_filter, FilterSpec};
pub use flows::{group_flows, Flow, FlowStatus};
pub use metrics::{compute_metric, metric_distribution, DistributionError, Metric, MetricDistribution};
pub use model::{Action, Aoi, GlanceEvent, InteractionEvent, SessionKey, SignalSample};
pub use sankey::{build_sankey, SankeyGraph};
pub use task::{TaskDefinition, TaskError};
