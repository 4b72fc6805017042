//! Persisted record shapes and request payloads.

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::engine::{EngineKind, SurrogateParams};
use crate::room::{RoomSpec, DEFAULT_GAP, DEFAULT_MARGIN};
use crate::schedule::RunPeriod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Created,
    Configured,
    Running,
    Done,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Created => "created",
            Status::Configured => "configured",
            Status::Running => "running",
            Status::Done => "done",
            Status::Failed => "failed",
        }
    }

    pub fn is_finished(self) -> bool {
        matches!(self, Status::Done | Status::Failed)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Idf,
    Weather,
    Occupancy,
}

impl InputKind {
    pub const ALL: [InputKind; 3] = [InputKind::Idf, InputKind::Weather, InputKind::Occupancy];

    pub fn artifact_name(self) -> &'static str {
        match self {
            InputKind::Idf => "model.idf",
            InputKind::Weather => "weather.epw",
            InputKind::Occupancy => "occupancy.csv",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputKind::Idf => "idf",
            InputKind::Weather => "weather",
            InputKind::Occupancy => "occupancy",
        }
    }
}

impl std::str::FromStr for InputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "idf" => Ok(InputKind::Idf),
            "weather" => Ok(InputKind::Weather),
            "occupancy" => Ok(InputKind::Occupancy),
            other => Err(format!("unknown input `{other}` (expected idf, weather or occupancy)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    Csv,
    Eso,
}

impl ResultKind {
    pub fn artifact_name(self) -> &'static str {
        match self {
            ResultKind::Csv => "result.csv",
            ResultKind::Eso => "result.eso",
        }
    }
}

impl std::str::FromStr for ResultKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ResultKind::Csv),
            "eso" => Ok(ResultKind::Eso),
            other => Err(format!("unknown result `{other}` (expected csv or eso)")),
        }
    }
}

/// Points at an artifact owned by `record`, which may be another record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub record: String,
    pub name: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub idf: Option<ArtifactRef>,
    pub weather: Option<ArtifactRef>,
    pub occupancy: Option<ArtifactRef>,
}

impl Inputs {
    pub fn get(&self, kind: InputKind) -> Option<&ArtifactRef> {
        match kind {
            InputKind::Idf => self.idf.as_ref(),
            InputKind::Weather => self.weather.as_ref(),
            InputKind::Occupancy => self.occupancy.as_ref(),
        }
    }

    pub fn set(&mut self, kind: InputKind, reference: ArtifactRef) {
        let slot = match kind {
            InputKind::Idf => &mut self.idf,
            InputKind::Weather => &mut self.weather,
            InputKind::Occupancy => &mut self.occupancy,
        };
        *slot = Some(reference);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Results {
    pub eso: ArtifactRef,
    pub csv: ArtifactRef,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

fn default_gap() -> f64 {
    DEFAULT_GAP
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub room: RoomSpec,
    pub run_period: RunPeriod,
    /// Simulation step in minutes; defaults to the occupancy step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u32>,
    #[serde(default)]
    pub engine: EngineKind,
    #[serde(default)]
    pub surrogate: SurrogateParams,
    #[serde(default = "default_margin")]
    pub window_margin: f64,
    #[serde(default = "default_gap")]
    pub window_gap: f64,
}

impl Parameters {
    pub fn new(room: RoomSpec, run_period: RunPeriod) -> Self {
        Parameters {
            room,
            run_period,
            step: None,
            engine: EngineKind::default(),
            surrogate: SurrogateParams::default(),
            window_margin: DEFAULT_MARGIN,
            window_gap: DEFAULT_GAP,
        }
    }
}

/// Field-level changes applied on top of an existing record's parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub width: Option<f64>,
    pub depth: Option<f64>,
    pub height: Option<f64>,
    pub orientation: Option<f64>,
    pub infiltration_ach: Option<f64>,
    pub begin: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub step: Option<u32>,
    pub engine: Option<EngineKind>,
    pub surrogate: Option<SurrogateParams>,
    pub window_margin: Option<f64>,
    pub window_gap: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, base: &Parameters) -> Parameters {
        let mut p = *base;
        p.room.width = self.width.unwrap_or(p.room.width);
        p.room.depth = self.depth.unwrap_or(p.room.depth);
        p.room.height = self.height.unwrap_or(p.room.height);
        p.room.orientation = self.orientation.unwrap_or(p.room.orientation);
        p.room.infiltration_ach = self.infiltration_ach.unwrap_or(p.room.infiltration_ach);
        p.run_period.begin = self.begin.unwrap_or(p.run_period.begin);
        p.run_period.end = self.end.unwrap_or(p.run_period.end);
        if self.step.is_some() {
            p.step = self.step;
        }
        p.engine = self.engine.unwrap_or(p.engine);
        p.surrogate = self.surrogate.unwrap_or(p.surrogate);
        p.window_margin = self.window_margin.unwrap_or(p.window_margin);
        p.window_gap = self.window_gap.unwrap_or(p.window_gap);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub status: Status,
    pub inputs: Inputs,
    pub parameters: Option<Parameters>,
    pub results: Option<Results>,
    pub error: Option<String>,
    pub parent_id: Option<String>,
}

impl SimulationRecord {
    pub fn new(parent_id: Option<String>) -> Self {
        SimulationRecord {
            id: uuid::Uuid::new_v4().to_string(),
            created_at: Utc::now(),
            status: Status::Created,
            inputs: Inputs::default(),
            parameters: None,
            results: None,
            error: None,
            parent_id,
        }
    }

    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            id: self.id.clone(),
            created_at: self.created_at,
            status: self.status,
            engine: self.parameters.map(|p| p.engine),
            parent_id: self.parent_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub status: Status,
    pub engine: Option<EngineKind>,
    pub parent_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusView {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub progress: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sweep over room parameters. An omitted axis keeps the base record's
/// value; an empty axis is an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub base_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infiltrations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub width: f64,
    pub depth: f64,
    pub orientation: f64,
    pub infiltration_ach: f64,
}

impl Combination {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            width: Some(self.width),
            depth: Some(self.depth),
            orientation: Some(self.orientation),
            infiltration_ach: Some(self.infiltration_ach),
            ..Overrides::default()
        }
    }

    /// Deterministic directory name, e.g. `w4_d5_o90_ach0.5`.
    pub fn label(&self) -> String {
        format!(
            "w{}_d{}_o{}_ach{}",
            self.width, self.depth, self.orientation, self.infiltration_ach
        )
    }
}

impl SeriesSpec {
    /// Cartesian product in width, depth, orientation, infiltration order.
    /// Returns the name of the first empty axis on failure.
    pub fn combinations(&self, base: &RoomSpec) -> Result<Vec<Combination>, &'static str> {
        let axis = |values: &Option<Vec<f64>>, name: &'static str, fallback: f64| match values {
            Some(v) if v.is_empty() => Err(name),
            Some(v) => Ok(v.clone()),
            None => Ok(vec![fallback]),
        };
        let widths = axis(&self.widths, "widths", base.width)?;
        let depths = axis(&self.depths, "depths", base.depth)?;
        let orientations = axis(&self.orientations, "orientations", base.orientation)?;
        let infiltrations = axis(&self.infiltrations, "infiltrations", base.infiltration_ach)?;
        let mut out = Vec::with_capacity(widths.len() * depths.len() * orientations.len() * infiltrations.len());
        for &width in &widths {
            for &depth in &depths {
                for &orientation in &orientations {
                    for &infiltration_ach in &infiltrations {
                        out.push(Combination {
                            width,
                            depth,
                            orientation,
                            infiltration_ach,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesChild {
    pub id: String,
    pub combination: Combination,
    /// Set when the child could not be configured.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub spec: SeriesSpec,
    pub children: Vec<SeriesChild>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesStatus {
    Running,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesChildView {
    pub id: String,
    pub combination: Combination,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesView {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub base_id: String,
    pub status: SeriesStatus,
    pub children: Vec<SeriesChildView>,
}

impl SeriesView {
    pub fn failed(&self) -> usize {
        self.children.iter().filter(|c| c.error.is_some() || c.status == Status::Failed).count()
    }
}
