//! Simulation backends. Both engines produce ESO text plus the joined
//! [`ResultTable`](crate::eso::ResultTable).

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eso::{EsoError, ResultTable, VariableMap};
use crate::idf::IdfDocument;
use crate::schedule::{OccupancyTimeSeries, RunPeriod};
use crate::weather::{WeatherError, WeatherSeries};

pub mod energyplus;
pub mod surrogate;

pub use energyplus::{EnergyPlusConfig, EnergyPlusEngine};
pub use surrogate::{SurrogateEngine, SurrogateParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("EnergyPlus executable not found: {0}")]
    ExecutableNotFound(String),
    #[error("simulation process failed:\n{log}")]
    ProcessFailed { log: String },
    #[error("engine produced no eplusout.eso")]
    EsoMissing,
    #[error("model has no AirChanges/Hour ZoneInfiltration:DesignFlowRate object")]
    MissingInfiltrationObject,
    #[error("zone volume cannot be derived from the model geometry")]
    ZoneVolumeUnavailable,
    #[error("simulation cancelled")]
    Cancelled,
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Weather(#[from] WeatherError),
    #[error(transparent)]
    Eso(#[from] EsoError),
}

impl From<std::io::Error> for EngineError {
    fn from(e: std::io::Error) -> Self {
        EngineError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    EnergyPlus,
    #[default]
    Surrogate,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::EnergyPlus => "energyplus",
            EngineKind::Surrogate => "surrogate",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "energyplus" => Ok(EngineKind::EnergyPlus),
            "surrogate" => Ok(EngineKind::Surrogate),
            other => Err(format!("unknown engine `{other}` (expected energyplus or surrogate)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationJob {
    /// Fully prepared model (geometry, schedules, run period applied).
    pub model: IdfDocument,
    pub weather: WeatherSeries,
    /// Original EPW text, handed to EnergyPlus unchanged.
    pub epw_text: String,
    pub run_period: RunPeriod,
    pub step_minutes: u32,
    pub occupancy: OccupancyTimeSeries,
    pub surrogate: SurrogateParams,
    pub variables: VariableMap,
}

impl SimulationJob {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.step_minutes == 0 || 60 % self.step_minutes != 0 {
            return Err(EngineError::InvalidJob(format!(
                "step {} min does not divide an hour",
                self.step_minutes
            )));
        }
        if !self
            .occupancy
            .covers_dates(self.run_period.begin, self.run_period.end)
        {
            return Err(EngineError::InvalidJob(
                "occupancy series does not cover the run period".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineResult {
    pub eso_text: String,
    pub result_table: ResultTable,
    pub log: String,
}

/// Cancellation flag and progress shared between a running job and observers.
#[derive(Debug, Default)]
pub struct RunControl {
    cancelled: AtomicBool,
    progress_permille: AtomicU32,
}

impl RunControl {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.cancelled.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.cancelled.load(Ordering::SeqCst)
    }

    pub fn set_progress(&self, fraction: f64) {
        let permille = (fraction.clamp(0.0, 1.0) * 1000.0).round() as u32;
        self.progress_permille.store(permille, Ordering::Relaxed);
    }

    pub fn progress(&self) -> f64 {
        self.progress_permille.load(Ordering::Relaxed) as f64 / 1000.0
    }
}

pub trait Engine: Send + Sync {
    fn kind(&self) -> EngineKind;

    fn run(&self, job: &SimulationJob, control: &RunControl) -> Result<EngineResult, EngineError>;
}
