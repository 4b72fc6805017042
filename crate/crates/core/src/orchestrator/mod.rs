//! Simulation lifecycle: records, inputs, background runs, re-runs and series.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    EnergyPlusConfig, EnergyPlusEngine, Engine, EngineKind, EngineResult, RunControl, SurrogateEngine,
};
use crate::eso::write_csv;
use crate::room::{room_geometry, RoomGeometry};

pub mod pool;
pub mod prepare;
pub mod record;
pub mod store;

pub use pool::WorkerPool;
pub use prepare::{build_job, check_input, prepare_model, RawInputs};
pub use record::{
    ArtifactRef, Combination, InputKind, Inputs, Overrides, Parameters, RecordSummary, ResultKind, Results,
    SeriesChild, SeriesChildView, SeriesRecord, SeriesSpec, SeriesStatus, SeriesView, SimulationRecord, Status,
    StatusView,
};
pub use store::{DocumentStore, FileStore, MemoryStore, StoreError, SERIES, SIMULATIONS};

pub const DEFAULT_WORKERS: usize = 2;
const INTERRUPTED: &str = "run interrupted: the service stopped before the simulation finished";

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("simulation `{0}` not found")]
    NotFound(String),
    #[error("series `{0}` not found")]
    SeriesNotFound(String),
    #[error("simulation `{0}` is currently running")]
    CurrentlyRunning(String),
    #[error("simulation `{0}` is already running")]
    AlreadyRunning(String),
    #[error("simulation `{0}` is not configured")]
    NotConfigured(String),
    #[error("simulation `{0}` has no results yet")]
    NotFinished(String),
    #[error("simulation `{0}` is finished; its inputs are immutable (use rerun)")]
    Finished(String),
    #[error("source simulation `{0}` has not finished")]
    SourceNotFinished(String),
    #[error("invalid {input} input: {detail}")]
    InvalidInput { input: &'static str, detail: String },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("series axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub type Result<T, E = OrchestratorError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default)]
pub struct OrchestratorConfig {
    pub workers: usize,
    pub energyplus: Option<EnergyPlusConfig>,
    /// Parent of the per-run EnergyPlus working directories.
    pub work_root: Option<PathBuf>,
}

struct Inner {
    store: Arc<dyn DocumentStore>,
    engines: HashMap<EngineKind, Arc<dyn Engine>>,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    controls: Mutex<HashMap<String, Arc<RunControl>>>,
    finished: (Mutex<u64>, Condvar),
}

pub struct Orchestrator {
    inner: Arc<Inner>,
    pool: WorkerPool,
}

impl std::fmt::Debug for Orchestrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut engines: Vec<&str> = self.inner.engines.keys().map(|k| k.as_str()).collect();
        engines.sort();
        f.debug_struct("Orchestrator")
            .field("engines", &engines)
            .field("pool", &self.pool)
            .finish()
    }
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("records serialize")
}

fn from_json<T: DeserializeOwned>(id: &str, value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| StoreError::Corrupt(id.to_string(), e.to_string()).into())
}

impl Inner {
    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table");
        Arc::clone(locks.entry(id.to_string()).or_default())
    }

    fn load(&self, id: &str) -> Result<SimulationRecord> {
        match self.store.get(SIMULATIONS, id)? {
            Some(v) => from_json(id, v),
            None => Err(OrchestratorError::NotFound(id.to_string())),
        }
    }

    fn save(&self, record: &SimulationRecord) -> Result<()> {
        self.store.put(SIMULATIONS, &record.id, &to_json(record))?;
        Ok(())
    }

    /// Runs `f` on the record while holding its write lock, then persists it.
    fn update<T>(&self, id: &str, f: impl FnOnce(&mut SimulationRecord) -> Result<T>) -> Result<T> {
        let lock = self.lock_for(id);
        let _guard = lock.lock().expect("record lock");
        let mut record = self.load(id)?;
        let out = f(&mut record)?;
        self.save(&record)?;
        Ok(out)
    }

    fn read_artifact(&self, reference: &ArtifactRef) -> Result<Vec<u8>> {
        self.store
            .get_artifact(SIMULATIONS, &reference.record, &reference.name)?
            .ok_or_else(|| {
                StoreError::Unavailable(format!("artifact {}/{} is missing", reference.record, reference.name)).into()
            })
    }

    fn input_bytes(&self, record: &SimulationRecord) -> Result<[Vec<u8>; 3]> {
        self.input_bytes_with(record, None)
    }

    /// Like [`Inner::input_bytes`], with one input replaced by `replacement`.
    fn input_bytes_with(
        &self,
        record: &SimulationRecord,
        replacement: Option<(InputKind, &[u8])>,
    ) -> Result<[Vec<u8>; 3]> {
        let mut out: [Vec<u8>; 3] = Default::default();
        for (slot, kind) in out.iter_mut().zip(InputKind::ALL) {
            if let Some((_, bytes)) = replacement.filter(|(k, _)| *k == kind) {
                *slot = bytes.to_vec();
                continue;
            }
            let reference = record.inputs.get(kind).ok_or_else(|| {
                OrchestratorError::ValidationFailed(format!("{} input has not been uploaded", kind.as_str()))
            })?;
            *slot = self.read_artifact(reference)?;
        }
        Ok(out)
    }

    fn validate(&self, record: &SimulationRecord, params: &Parameters) -> Result<Parameters> {
        self.validate_with(record, params, None)
    }

    fn validate_with(
        &self,
        record: &SimulationRecord,
        params: &Parameters,
        replacement: Option<(InputKind, &[u8])>,
    ) -> Result<Parameters> {
        let [idf, weather, occupancy] = self.input_bytes_with(record, replacement)?;
        let job = build_job(
            RawInputs {
                idf: &idf,
                weather: &weather,
                occupancy: &occupancy,
            },
            params,
        )
        .map_err(OrchestratorError::ValidationFailed)?;
        if !self.engines.contains_key(&params.engine) {
            return Err(OrchestratorError::ValidationFailed(format!(
                "engine `{}` is not available on this server",
                params.engine.as_str()
            )));
        }
        Ok(Parameters {
            step: Some(job.step_minutes),
            ..*params
        })
    }

    fn execute(&self, id: &str, control: &RunControl) -> std::result::Result<EngineResult, String> {
        let record = self.load(id).map_err(|e| e.to_string())?;
        let params = record
            .parameters
            .ok_or_else(|| OrchestratorError::NotConfigured(id.to_string()).to_string())?;
        let [idf, weather, occupancy] = self.input_bytes(&record).map_err(|e| e.to_string())?;
        let job = build_job(
            RawInputs {
                idf: &idf,
                weather: &weather,
                occupancy: &occupancy,
            },
            &params,
        )?;
        let engine = self
            .engines
            .get(&params.engine)
            .ok_or_else(|| format!("engine `{}` is not available", params.engine.as_str()))?;
        engine.run(&job, control).map_err(|e| e.to_string())
    }

    fn finish(&self, id: &str, outcome: std::result::Result<EngineResult, String>) {
        let stored = self.update(id, |record| {
            match outcome {
                Ok(result) => {
                    let eso = ResultKind::Eso.artifact_name();
                    let csv = ResultKind::Csv.artifact_name();
                    let written = self
                        .store
                        .put_artifact(SIMULATIONS, id, eso, result.eso_text.as_bytes())
                        .and_then(|_| {
                            self.store
                                .put_artifact(SIMULATIONS, id, csv, write_csv(&result.result_table).as_bytes())
                        });
                    match written {
                        Ok(()) => {
                            record.status = Status::Done;
                            record.error = None;
                            record.results = Some(Results {
                                eso: ArtifactRef {
                                    record: id.to_string(),
                                    name: eso.to_string(),
                                },
                                csv: ArtifactRef {
                                    record: id.to_string(),
                                    name: csv.to_string(),
                                },
                            });
                        }
                        Err(e) => {
                            record.status = Status::Failed;
                            record.error = Some(format!("storing results failed: {e}"));
                        }
                    }
                }
                Err(message) => {
                    record.status = Status::Failed;
                    record.results = None;
                    record.error = Some(if message.trim().is_empty() {
                        "simulation failed".to_string()
                    } else {
                        message
                    });
                }
            }
            Ok(())
        });
        if let Err(e) = stored {
            tracing::error!(id, error = %e, "could not persist simulation outcome");
        }
        self.controls.lock().expect("controls").remove(id);
        let (count, signal) = &self.finished;
        *count.lock().expect("finished counter") += 1;
        signal.notify_all();
    }
}

impl Orchestrator {
    /// Orchestrator with the surrogate engine plus EnergyPlus when configured.
    pub fn new(store: Arc<dyn DocumentStore>, config: OrchestratorConfig) -> Result<Self> {
        let mut engines: Vec<Arc<dyn Engine>> = vec![Arc::new(SurrogateEngine)];
        if let Some(eplus) = config.energyplus {
            let work_root = config
                .work_root
                .unwrap_or_else(|| std::env::temp_dir().join("roomsim-energyplus"));
            engines.push(Arc::new(EnergyPlusEngine {
                config: eplus,
                work_root,
            }));
        }
        Self::with_engines(store, config.workers, engines)
    }

    /// File-backed orchestrator rooted at `data_root`.
    pub fn open(data_root: impl Into<PathBuf>, config: OrchestratorConfig) -> Result<Self> {
        let store = FileStore::open(data_root)?;
        Self::new(Arc::new(store), config)
    }

    /// Uses exactly the given engines. Records left running by a previous
    /// process are marked failed.
    pub fn with_engines(
        store: Arc<dyn DocumentStore>,
        workers: usize,
        engines: Vec<Arc<dyn Engine>>,
    ) -> Result<Self> {
        let workers = if workers == 0 { DEFAULT_WORKERS } else { workers };
        let inner = Arc::new(Inner {
            store,
            engines: engines.into_iter().map(|e| (e.kind(), e)).collect(),
            locks: Mutex::new(HashMap::new()),
            controls: Mutex::new(HashMap::new()),
            finished: (Mutex::new(0), Condvar::new()),
        });
        for id in inner.store.list(SIMULATIONS)? {
            inner.update(&id, |record| {
                if record.status == Status::Running {
                    record.status = Status::Failed;
                    record.error = Some(INTERRUPTED.to_string());
                }
                Ok(())
            })?;
        }
        Ok(Orchestrator {
            inner,
            pool: WorkerPool::new(workers),
        })
    }

    pub fn engines(&self) -> Vec<EngineKind> {
        let mut kinds: Vec<EngineKind> = self.inner.engines.keys().copied().collect();
        kinds.sort_by_key(|k| k.as_str());
        kinds
    }

    pub fn workers(&self) -> usize {
        self.pool.size()
    }

    pub fn create_simulation(&self) -> Result<SimulationRecord> {
        let record = SimulationRecord::new(None);
        self.inner.save(&record)?;
        Ok(record)
    }

    pub fn get(&self, id: &str) -> Result<SimulationRecord> {
        self.inner.load(id)
    }

    pub fn history(&self) -> Result<Vec<RecordSummary>> {
        self.records().map(|records| records.iter().map(SimulationRecord::summary).collect())
    }

    pub fn records(&self) -> Result<Vec<SimulationRecord>> {
        self.inner
            .store
            .list(SIMULATIONS)?
            .iter()
            .map(|id| self.inner.load(id))
            .collect()
    }

    /// Stores an input file after checking that it parses. A configured
    /// record is re-validated against its parameters with the new file.
    pub fn upload_input(&self, id: &str, kind: InputKind, bytes: &[u8]) -> Result<SimulationRecord> {
        check_input(kind, bytes).map_err(|detail| OrchestratorError::InvalidInput {
            input: kind.as_str(),
            detail,
        })?;
        let inner = &self.inner;
        inner.update(id, |record| {
            match record.status {
                Status::Running => return Err(OrchestratorError::CurrentlyRunning(id.to_string())),
                Status::Done | Status::Failed => return Err(OrchestratorError::Finished(id.to_string())),
                Status::Created | Status::Configured => {}
            }
            let name = kind.artifact_name();
            let reference = ArtifactRef {
                record: id.to_string(),
                name: name.to_string(),
            };
            if let Some(params) = record.parameters.filter(|_| record.status == Status::Configured) {
                record.parameters = Some(inner.validate_with(record, &params, Some((kind, bytes)))?);
            }
            inner.store.put_artifact(SIMULATIONS, id, name, bytes)?;
            record.inputs.set(kind, reference);
            Ok(record.clone())
        })
    }

    /// Builds the model eagerly so that every validation error surfaces here.
    pub fn configure(&self, id: &str, params: &Parameters) -> Result<SimulationRecord> {
        let inner = &self.inner;
        inner.update(id, |record| {
            if record.status == Status::Running {
                return Err(OrchestratorError::CurrentlyRunning(id.to_string()));
            }
            let resolved = inner.validate(record, params)?;
            record.parameters = Some(resolved);
            record.status = Status::Configured;
            record.results = None;
            record.error = None;
            Ok(record.clone())
        })
    }

    /// Moves a configured record to running and queues it on the pool.
    pub fn start(&self, id: &str) -> Result<SimulationRecord> {
        let control = Arc::new(RunControl::new());
        let record = self.inner.update(id, |record| {
            match record.status {
                Status::Configured => {}
                Status::Running => return Err(OrchestratorError::AlreadyRunning(id.to_string())),
                _ => return Err(OrchestratorError::NotConfigured(id.to_string())),
            }
            record.status = Status::Running;
            record.results = None;
            record.error = None;
            self.inner
                .controls
                .lock()
                .expect("controls")
                .insert(id.to_string(), Arc::clone(&control));
            Ok(record.clone())
        })?;
        let inner = Arc::clone(&self.inner);
        let job_id = id.to_string();
        self.pool.submit(move || {
            let outcome = if control.is_cancelled() {
                Err("simulation cancelled".to_string())
            } else {
                inner.execute(&job_id, &control)
            };
            inner.finish(&job_id, outcome);
        });
        Ok(record)
    }

    /// Requests cancellation of a running record. Returns whether a run was signalled.
    pub fn cancel(&self, id: &str) -> Result<bool> {
        self.inner.load(id)?;
        let controls = self.inner.controls.lock().expect("controls");
        Ok(controls.get(id).map(|c| c.cancel()).is_some())
    }

    pub fn status(&self, id: &str) -> Result<StatusView> {
        let record = self.inner.load(id)?;
        let progress = match record.status {
            Status::Running => Some(
                self.inner
                    .controls
                    .lock()
                    .expect("controls")
                    .get(id)
                    .map(|c| c.progress())
                    .unwrap_or(0.0),
            ),
            Status::Done => Some(1.0),
            _ => None,
        };
        Ok(StatusView {
            status: record.status,
            progress,
            error: record.error,
        })
    }

    /// Blocks until the record is no longer running or `timeout` elapses,
    /// then returns its current state.
    pub fn wait(&self, id: &str, timeout: Duration) -> Result<SimulationRecord> {
        let deadline = Instant::now().checked_add(timeout);
        let (count, signal) = &self.inner.finished;
        loop {
            let seen = *count.lock().expect("finished counter");
            let record = self.inner.load(id)?;
            let now = Instant::now();
            if record.status != Status::Running || deadline.is_some_and(|d| now >= d) {
                return Ok(record);
            }
            let guard = count.lock().expect("finished counter");
            if *guard == seen {
                let remaining = deadline.map_or(Duration::MAX, |d| d - now);
                let wait = remaining.min(Duration::from_millis(200));
                drop(signal.wait_timeout(guard, wait).expect("finished counter"));
            }
        }
    }

    pub fn result_artifact(&self, id: &str, kind: ResultKind) -> Result<Vec<u8>> {
        let record = self.inner.load(id)?;
        let results = match (record.status, record.results) {
            (Status::Done, Some(results)) => results,
            _ => return Err(OrchestratorError::NotFinished(id.to_string())),
        };
        let reference = match kind {
            ResultKind::Csv => results.csv,
            ResultKind::Eso => results.eso,
        };
        self.inner.read_artifact(&reference)
    }

    pub fn input_artifact(&self, id: &str, kind: InputKind) -> Result<Option<Vec<u8>>> {
        let record = self.inner.load(id)?;
        record.inputs.get(kind).map(|r| self.inner.read_artifact(r)).transpose()
    }

    /// Surfaces of the prepared model.
    pub fn geometry(&self, id: &str) -> Result<RoomGeometry> {
        let record = self.inner.load(id)?;
        let params = match (record.status, record.parameters) {
            (Status::Created, _) | (_, None) => return Err(OrchestratorError::NotConfigured(id.to_string())),
            (_, Some(p)) => p,
        };
        let [idf, weather, occupancy] = self.inner.input_bytes(&record)?;
        let job = build_job(
            RawInputs {
                idf: &idf,
                weather: &weather,
                occupancy: &occupancy,
            },
            &params,
        )
        .map_err(OrchestratorError::ValidationFailed)?;
        room_geometry(&job.model).map_err(|e| OrchestratorError::ValidationFailed(e.to_string()))
    }

    /// Inputs for a derived record. References into `source` are copied
    /// when `source` can still change, so they stay immutable.
    fn derive_inputs(&self, source: &SimulationRecord, target: &str) -> Result<Inputs> {
        let mut inputs = Inputs::default();
        for kind in InputKind::ALL {
            let Some(reference) = source.inputs.get(kind) else {
                continue;
            };
            if reference.record == source.id && !source.status.is_finished() {
                let bytes = self.inner.read_artifact(reference)?;
                self.inner
                    .store
                    .put_artifact(SIMULATIONS, target, kind.artifact_name(), &bytes)?;
                inputs.set(
                    kind,
                    ArtifactRef {
                        record: target.to_string(),
                        name: kind.artifact_name().to_string(),
                    },
                );
            } else {
                inputs.set(kind, reference.clone());
            }
        }
        Ok(inputs)
    }

    /// New configured record with the source's inputs and `overrides`
    /// applied to its parameters. Nothing is stored when validation fails.
    pub fn rerun_with(&self, id: &str, overrides: &Overrides) -> Result<SimulationRecord> {
        let source = self.inner.load(id)?;
        if !source.status.is_finished() {
            return Err(OrchestratorError::SourceNotFinished(id.to_string()));
        }
        let base = source
            .parameters
            .ok_or_else(|| OrchestratorError::NotConfigured(id.to_string()))?;
        let mut child = SimulationRecord::new(Some(source.id.clone()));
        child.inputs = self.derive_inputs(&source, &child.id)?;
        let params = overrides.apply(&base);
        child.parameters = Some(self.inner.validate(&child, &params)?);
        child.status = Status::Configured;
        self.inner.save(&child)?;
        Ok(child)
    }

    /// One child per parameter combination, each started on the pool.
    /// A child that fails validation is recorded in the series with its
    /// error and the remaining children still run.
    pub fn run_series(&self, spec: &SeriesSpec) -> Result<SeriesView> {
        let base = self.inner.load(&spec.base_id)?;
        let base_params = match (base.status, base.parameters) {
            (Status::Created, _) | (_, None) => {
                return Err(OrchestratorError::NotConfigured(spec.base_id.clone()))
            }
            (Status::Running, _) => return Err(OrchestratorError::SourceNotFinished(spec.base_id.clone())),
            (_, Some(p)) => p,
        };
        let combinations = spec
            .combinations(&base_params.room)
            .map_err(OrchestratorError::EmptyAxis)?;

        let mut children = Vec::with_capacity(combinations.len());
        let mut to_start = Vec::new();
        for combination in combinations {
            let mut child = SimulationRecord::new(Some(base.id.clone()));
            child.inputs = self.derive_inputs(&base, &child.id)?;
            let params = combination.overrides().apply(&base_params);
            let error = match self.inner.validate(&child, &params) {
                Ok(resolved) => {
                    child.parameters = Some(resolved);
                    child.status = Status::Configured;
                    to_start.push(child.id.clone());
                    None
                }
                Err(e) => {
                    child.parameters = Some(params);
                    Some(e.to_string())
                }
            };
            self.inner.save(&child)?;
            children.push(SeriesChild {
                id: child.id,
                combination,
                error,
            });
        }
        let series = SeriesRecord {
            id: uuid::Uuid::new_v4().to_string(),
            created_at: Utc::now(),
            spec: spec.clone(),
            children,
        };
        self.inner.store.put(SERIES, &series.id, &to_json(&series))?;
        for id in to_start {
            self.start(&id)?;
        }
        self.series(&series.id)
    }

    pub fn series(&self, series_id: &str) -> Result<SeriesView> {
        let series: SeriesRecord = match self.inner.store.get(SERIES, series_id)? {
            Some(v) => from_json(series_id, v)?,
            None => return Err(OrchestratorError::SeriesNotFound(series_id.to_string())),
        };
        let mut children = Vec::with_capacity(series.children.len());
        for child in &series.children {
            let record = self.inner.load(&child.id)?;
            children.push(SeriesChildView {
                id: child.id.clone(),
                combination: child.combination,
                status: record.status,
                error: child.error.clone().or(record.error),
            });
        }
        let running = children
            .iter()
            .any(|c| c.error.is_none() && !c.status.is_finished());
        Ok(SeriesView {
            id: series.id,
            created_at: series.created_at,
            base_id: series.spec.base_id,
            status: if running { SeriesStatus::Running } else { SeriesStatus::Done },
            children,
        })
    }

    pub fn series_ids(&self) -> Result<Vec<String>> {
        Ok(self.inner.store.list(SERIES)?)
    }

    /// Waits for every child of a series to finish.
    pub fn wait_series(&self, series_id: &str, timeout: Duration) -> Result<SeriesView> {
        let deadline = Instant::now().checked_add(timeout);
        let view = self.series(series_id)?;
        for child in &view.children {
            let left = deadline.map_or(Duration::MAX, |d| d.saturating_duration_since(Instant::now()));
            self.wait(&child.id, left)?;
        }
        self.series(series_id)
    }
}
