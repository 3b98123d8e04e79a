//! Snapshot-pinned analysis over the store: extraction cache, flows,
//! Sankey, distributions and sequence detail.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use flowboat_core::catalog::UiElement;
use flowboat_core::detail::{sequence_detail, SequenceDetail};
use flowboat_core::filter::FilterError;
use flowboat_core::flows::Flow;
use flowboat_core::metrics::{metric_distribution, DistributionError, Metric, MetricDistribution};
use flowboat_core::sankey::SankeyGraph;
use flowboat_core::{
    apply_filter, build_sankey, extract_sequences, group_flows, ExtractionConfig, FilterSpec, InteractionSequence,
    TaskDefinition,
};
use serde::Serialize;

use crate::catalog_file::CatalogHandle;
use crate::store::{Snapshot, SnapshotId, Store, StoreError};
use crate::tasks::{RegistryError, TaskRegistry};

const CACHE_LIMIT: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unknown sequence {0:?}")]
    UnknownSequence(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// Snapshot selection plus extraction and filter settings of one request.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisQuery {
    pub snapshot: Option<SnapshotId>,
    pub config: ExtractionConfig,
    pub filter: FilterSpec,
}

/// A response body tagged with the snapshot it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pinned<T> {
    pub snapshot_id: SnapshotId,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskFlows {
    pub task_id: String,
    pub total_sequences: usize,
    pub flows: Vec<Flow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskSankey {
    pub task_id: String,
    #[serde(flatten)]
    pub graph: SankeyGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskDistribution {
    pub task_id: String,
    #[serde(flatten)]
    pub distribution: MetricDistribution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownElement {
    pub element_id: String,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub distinct_elements: usize,
    pub resolved: usize,
    pub unknown: Vec<UnknownElement>,
}

type CacheKey = (String, SnapshotId, i64, bool);

pub struct Engine {
    pub store: Store,
    pub catalog: CatalogHandle,
    tasks: RwLock<TaskRegistry>,
    cache: Mutex<HashMap<CacheKey, Arc<Vec<InteractionSequence>>>>,
}

impl Engine {
    pub fn new(store: Store, catalog: CatalogHandle, tasks: TaskRegistry) -> Self {
        Self {
            store,
            catalog,
            tasks: RwLock::new(tasks),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn task(&self, task_id: &str) -> Result<TaskDefinition, AnalysisError> {
        self.tasks
            .read()
            .unwrap()
            .get(task_id)
            .cloned()
            .ok_or_else(|| AnalysisError::UnknownTask(task_id.into()))
    }

    pub fn tasks(&self) -> Vec<TaskDefinition> {
        self.tasks.read().unwrap().all().to_vec()
    }

    pub fn define_manual(&self, start: &str, end: &str, name: Option<String>) -> Result<TaskDefinition, AnalysisError> {
        let catalog = self.catalog.current();
        Ok(self.tasks.write().unwrap().define_manual(start, end, name, &catalog)?)
    }

    pub fn define_from_recording(
        &self,
        recording: &str,
        name: Option<String>,
    ) -> Result<TaskDefinition, AnalysisError> {
        let catalog = self.catalog.current();
        Ok(self
            .tasks
            .write()
            .unwrap()
            .define_from_recording(recording, name, &catalog)?)
    }

    /// Extracted sequences of a task on a snapshot, cached per extraction
    /// setting.
    pub fn sequences(
        &self,
        task: &TaskDefinition,
        snapshot: &Snapshot,
        config: &ExtractionConfig,
    ) -> Arc<Vec<InteractionSequence>> {
        let key = (
            task.task_id.clone(),
            snapshot.id,
            config.max_gap_ms,
            config.include_aborted,
        );
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let seqs = Arc::new(extract_sequences(task, snapshot.sessions(), config));
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.entry(key).or_insert(seqs).clone()
    }

    fn prepare(
        &self,
        task_id: &str,
        query: &AnalysisQuery,
    ) -> Result<(Arc<Snapshot>, Arc<Vec<InteractionSequence>>), AnalysisError> {
        query.filter.validate()?;
        let task = self.task(task_id)?;
        let snapshot = self.store.resolve(query.snapshot)?;
        let seqs = self.sequences(&task, &snapshot, &query.config);
        Ok((snapshot, seqs))
    }

    pub fn flows(&self, task_id: &str, query: &AnalysisQuery) -> Result<Pinned<TaskFlows>, AnalysisError> {
        let (snapshot, seqs) = self.prepare(task_id, query)?;
        let filtered = apply_filter(&seqs, &query.filter);
        let mut flows = group_flows(&filtered);
        if let Some(n) = query.filter.top_n_flows {
            flows.truncate(n);
        }
        Ok(Pinned {
            snapshot_id: snapshot.id,
            body: TaskFlows {
                task_id: task_id.into(),
                total_sequences: flows.iter().map(|f| f.count).sum(),
                flows,
            },
        })
    }

    pub fn sankey(&self, task_id: &str, query: &AnalysisQuery) -> Result<Pinned<TaskSankey>, AnalysisError> {
        let (snapshot, seqs) = self.prepare(task_id, query)?;
        let flows = group_flows(&apply_filter(&seqs, &query.filter));
        Ok(Pinned {
            snapshot_id: snapshot.id,
            body: TaskSankey {
                task_id: task_id.into(),
                graph: build_sankey(&flows, &query.filter),
            },
        })
    }

    pub fn distribution(
        &self,
        task_id: &str,
        query: &AnalysisQuery,
        selected: Option<&[String]>,
        metric: Metric,
    ) -> Result<Pinned<TaskDistribution>, AnalysisError> {
        let (snapshot, seqs) = self.prepare(task_id, query)?;
        let distribution = metric_distribution(
            &seqs,
            selected,
            metric,
            &query.filter,
            query.config.glance_aoi_for_metrics,
        )?;
        Ok(Pinned {
            snapshot_id: snapshot.id,
            body: TaskDistribution {
                task_id: task_id.into(),
                distribution,
            },
        })
    }

    /// Looks a sequence up across every defined task on the snapshot.
    pub fn sequence(&self, sequence_id: &str, query: &AnalysisQuery) -> Result<Pinned<SequenceDetail>, AnalysisError> {
        let snapshot = self.store.resolve(query.snapshot)?;
        for task in self.tasks() {
            let seqs = self.sequences(&task, &snapshot, &query.config);
            if let Some(seq) = seqs.iter().find(|s| s.sequence_id == sequence_id) {
                let catalog = self.catalog.current();
                return Ok(Pinned {
                    snapshot_id: snapshot.id,
                    body: sequence_detail(seq, &catalog, query.config.glance_aoi_for_metrics),
                });
            }
        }
        Err(AnalysisError::UnknownSequence(sequence_id.into()))
    }

    pub fn element(&self, element_id: &str) -> Result<UiElement, AnalysisError> {
        self.catalog
            .current()
            .get(element_id)
            .cloned()
            .ok_or_else(|| AnalysisError::UnknownElement(element_id.into()))
    }

    /// Element ids seen in the snapshot's interactions that the catalog
    /// cannot resolve, each reported once.
    pub fn coverage(&self, snapshot: Option<SnapshotId>) -> Result<Pinned<CoverageReport>, AnalysisError> {
        let snapshot = self.store.resolve(snapshot)?;
        let catalog = self.catalog.current();
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, session) in snapshot.sessions() {
            for e in &session.events {
                *seen.entry(e.element_id.as_str()).or_default() += 1;
            }
        }
        let unknown: Vec<UnknownElement> = seen
            .iter()
            .filter(|(id, _)| catalog.get(id).is_none())
            .map(|(id, n)| UnknownElement {
                element_id: (*id).into(),
                occurrences: *n,
            })
            .collect();
        Ok(Pinned {
            snapshot_id: snapshot.id,
            body: CoverageReport {
                distinct_elements: seen.len(),
                resolved: seen.len() - unknown.len(),
                unknown,
            },
        })
    }
}
