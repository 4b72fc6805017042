//! Single-zone, well-mixed surrogate for EnergyPlus: first-order CO₂,
//! sensible heat and moisture balances integrated with explicit Euler.

use serde::{Deserialize, Serialize};

use super::{Engine, EngineError, EngineKind, EngineResult, RunControl, SimulationJob};
use crate::eso::{EsoWriter, ResultRow, ResultTable};
use crate::room::{infiltration_ach, zone_name, zone_volume};
use crate::weather::{slice_resample, OutdoorConditions};

/// Longest internal Euler step, s.
pub const MAX_SUBSTEP: f64 = 60.0;
pub const AIR_DENSITY: f64 = 1.2;
const WATER_AIR_MASS_RATIO: f64 = 0.622;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateParams {
    /// m³/s of CO₂ per occupant.
    pub co2_gen_per_person: f64,
    /// ppm
    pub outdoor_co2: f64,
    /// W per occupant.
    pub heat_gain_per_person: f64,
    /// J/(m³·K)
    pub air_heat_capacity: f64,
    /// Envelope time constant with windows closed, s.
    pub envelope_time_constant: f64,
    /// Air changes per hour added while the window is open.
    pub window_open_ach: f64,
    /// kg/s of water vapour per occupant.
    pub moisture_gen_per_person: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            co2_gen_per_person: 5.0e-6,
            outdoor_co2: 400.0,
            heat_gain_per_person: 100.0,
            air_heat_capacity: 1206.0,
            envelope_time_constant: 7200.0,
            window_open_ach: 5.0,
            moisture_gen_per_person: 1.5e-5,
        }
    }
}

impl SurrogateParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("co2_gen_per_person", self.co2_gen_per_person),
            ("heat_gain_per_person", self.heat_gain_per_person),
            ("air_heat_capacity", self.air_heat_capacity),
            ("envelope_time_constant", self.envelope_time_constant),
            ("window_open_ach", self.window_open_ach),
            ("moisture_gen_per_person", self.moisture_gen_per_person),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.outdoor_co2.is_finite() && self.outdoor_co2 >= 0.0) {
            return Err(format!("outdoor_co2 must be >= 0, got {}", self.outdoor_co2));
        }
        Ok(())
    }
}

fn substeps(dt: f64, max_substep: f64) -> (usize, f64) {
    let n = (dt / max_substep).ceil().max(1.0) as usize;
    (n, dt / n as f64)
}

/// Air exchange rate, 1/s, from infiltration plus an open window.
pub fn exchange_rate(infiltration_ach: f64, window_open: bool, params: &SurrogateParams) -> f64 {
    let window = if window_open { params.window_open_ach } else { 0.0 };
    (infiltration_ach + window) / 3600.0
}

/// Effective thermal time constant: envelope losses and air exchange act in parallel.
pub fn effective_time_constant(lambda: f64, params: &SurrogateParams) -> f64 {
    1.0 / (1.0 / params.envelope_time_constant + lambda)
}

fn co2_derivative(c: f64, occupants: f64, lambda: f64, params: &SurrogateParams, volume: f64) -> f64 {
    1e6 * params.co2_gen_per_person * occupants / volume + lambda * (params.outdoor_co2 - c)
}

/// Advances zone CO₂ (ppm) by `dt` seconds.
pub fn co2_step(c: f64, occupants: f64, lambda: f64, params: &SurrogateParams, volume: f64, dt: f64) -> f64 {
    co2_step_with(c, occupants, lambda, params, volume, dt, MAX_SUBSTEP)
}

pub fn co2_step_with(
    mut c: f64,
    occupants: f64,
    lambda: f64,
    params: &SurrogateParams,
    volume: f64,
    dt: f64,
    max_substep: f64,
) -> f64 {
    let (n, h) = substeps(dt, max_substep);
    for _ in 0..n {
        c += h * co2_derivative(c, occupants, lambda, params, volume);
    }
    c
}

/// Advances zone air temperature (°C) by `dt` seconds.
pub fn temp_step(
    t: f64,
    t_out: f64,
    occupants: f64,
    lambda: f64,
    params: &SurrogateParams,
    volume: f64,
    dt: f64,
) -> f64 {
    temp_step_with(t, t_out, occupants, lambda, params, volume, dt, MAX_SUBSTEP)
}

#[allow(clippy::too_many_arguments)]
fn temp_step_with(
    mut t: f64,
    t_out: f64,
    occupants: f64,
    lambda: f64,
    params: &SurrogateParams,
    volume: f64,
    dt: f64,
    max_substep: f64,
) -> f64 {
    let tau = effective_time_constant(lambda, params);
    let gain = occupants * params.heat_gain_per_person / (params.air_heat_capacity * volume);
    let (n, h) = substeps(dt, max_substep);
    for _ in 0..n {
        t += h * ((t_out - t) / tau + gain);
    }
    t
}

/// Advances the zone humidity ratio (kg/kg) by `dt` seconds.
pub fn humidity_step(
    w: f64,
    w_out: f64,
    occupants: f64,
    lambda: f64,
    params: &SurrogateParams,
    volume: f64,
    dt: f64,
) -> f64 {
    humidity_step_with(w, w_out, occupants, lambda, params, volume, dt, MAX_SUBSTEP)
}

#[allow(clippy::too_many_arguments)]
fn humidity_step_with(
    mut w: f64,
    w_out: f64,
    occupants: f64,
    lambda: f64,
    params: &SurrogateParams,
    volume: f64,
    dt: f64,
    max_substep: f64,
) -> f64 {
    let source = occupants * params.moisture_gen_per_person / (AIR_DENSITY * volume);
    let (n, h) = substeps(dt, max_substep);
    for _ in 0..n {
        w += h * (lambda * (w_out - w) + source);
    }
    w
}

/// Saturation vapour pressure over water, Pa (Magnus form).
pub fn saturation_pressure(t: f64) -> f64 {
    610.94 * (17.625 * t / (t + 243.04)).exp()
}

pub fn humidity_ratio(t: f64, relative_humidity: f64, pressure: f64) -> f64 {
    let pv = relative_humidity / 100.0 * saturation_pressure(t);
    WATER_AIR_MASS_RATIO * pv / (pressure - pv)
}

/// Relative humidity in percent, capped at saturation.
pub fn relative_humidity(w: f64, t: f64, pressure: f64) -> f64 {
    let pv = w * pressure / (WATER_AIR_MASS_RATIO + w);
    (100.0 * pv / saturation_pressure(t)).clamp(0.0, 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneState {
    pub temperature: f64,
    pub co2: f64,
    pub humidity_ratio: f64,
}

/// Zone constants the surrogate reads from the prepared model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneProperties {
    pub volume: f64,
    pub infiltration_ach: f64,
}

impl ZoneProperties {
    pub fn from_model(model: &crate::idf::IdfDocument) -> Result<Self, EngineError> {
        Ok(ZoneProperties {
            volume: zone_volume(model).ok_or(EngineError::ZoneVolumeUnavailable)?,
            infiltration_ach: infiltration_ach(model).ok_or(EngineError::MissingInfiltrationObject)?,
        })
    }
}

/// One reporting step of all three balances.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    state: ZoneState,
    outdoor: &OutdoorConditions,
    occupants: u32,
    window_open: bool,
    zone: ZoneProperties,
    params: &SurrogateParams,
    dt: f64,
    max_substep: f64,
) -> ZoneState {
    let n = occupants as f64;
    let lambda = exchange_rate(zone.infiltration_ach, window_open, params);
    let w_out = humidity_ratio(outdoor.dry_bulb, outdoor.relative_humidity, outdoor.pressure);
    ZoneState {
        temperature: temp_step_with(state.temperature, outdoor.dry_bulb, n, lambda, params, zone.volume, dt, max_substep),
        co2: co2_step_with(state.co2, n, lambda, params, zone.volume, dt, max_substep),
        humidity_ratio: humidity_step_with(state.humidity_ratio, w_out, n, lambda, params, zone.volume, dt, max_substep),
    }
}

/// Runs the surrogate over the job's run period.
pub fn run_surrogate(job: &SimulationJob, params: &SurrogateParams) -> Result<EngineResult, EngineError> {
    run_surrogate_with(job, params, &RunControl::new(), MAX_SUBSTEP)
}

pub fn run_surrogate_with(
    job: &SimulationJob,
    params: &SurrogateParams,
    control: &RunControl,
    max_substep: f64,
) -> Result<EngineResult, EngineError> {
    job.validate()?;
    params.validate().map_err(EngineError::InvalidJob)?;
    let zone = ZoneProperties::from_model(&job.model)?;
    let zone_key = zone_name(&job.model)
        .map_err(|e| EngineError::InvalidJob(e.to_string()))?
        .to_ascii_uppercase();
    let outdoor = slice_resample(&job.weather, &job.run_period, job.step_minutes)?;
    let first = outdoor
        .first()
        .ok_or_else(|| EngineError::InvalidJob("empty run period".into()))?;

    let mut eso = EsoWriter::new("roomsim surrogate, Version 1");
    let vars = &job.variables;
    let temp_code = eso.declare(&zone_key, &vars.zone_air_temperature, "C");
    let co2_code = eso.declare(&zone_key, &vars.zone_co2, "ppm");
    let rh_code = eso.declare(&zone_key, &vars.zone_relative_humidity, "%");
    let out_temp_code = eso.declare("Environment", &vars.outdoor_temperature, "C");
    let pressure_code = eso.declare("Environment", &vars.outdoor_pressure, "Pa");
    eso.begin_environment("RUN PERIOD 1", &job.weather.location);

    let dt = job.step_minutes as f64 * 60.0;
    let mut state = ZoneState {
        temperature: first.dry_bulb,
        co2: params.outdoor_co2,
        humidity_ratio: humidity_ratio(first.dry_bulb, first.relative_humidity, first.pressure),
    };
    let mut rows = Vec::with_capacity(outdoor.len());
    for (k, conditions) in outdoor.iter().enumerate() {
        if control.is_cancelled() {
            return Err(EngineError::Cancelled);
        }
        let sample = job
            .occupancy
            .sample_at(conditions.timestamp)
            .ok_or_else(|| EngineError::InvalidJob(format!("no occupancy at {}", conditions.timestamp)))?;
        state = advance(state, conditions, sample.occupants, sample.window_open, zone, params, dt, max_substep);
        let row = ResultRow {
            timestamp: conditions.timestamp,
            zone_air_temperature: state.temperature,
            zone_co2: state.co2,
            zone_relative_humidity: relative_humidity(state.humidity_ratio, state.temperature, conditions.pressure),
            outdoor_temperature: conditions.dry_bulb,
            outdoor_pressure: conditions.pressure,
            occupancy: sample.occupants,
            window_open: sample.window_open,
        };
        eso.timestamp(row.timestamp, job.step_minutes);
        eso.value(temp_code, row.zone_air_temperature);
        eso.value(co2_code, row.zone_co2);
        eso.value(rh_code, row.zone_relative_humidity);
        eso.value(out_temp_code, row.outdoor_temperature);
        eso.value(pressure_code, row.outdoor_pressure);
        rows.push(row);
        control.set_progress((k + 1) as f64 / outdoor.len() as f64);
    }
    Ok(EngineResult {
        eso_text: eso.finish(),
        result_table: ResultTable { rows },
        log: format!(
            "surrogate: volume {:.3} m3, infiltration {} ach, {} steps of {} min\n",
            zone.volume,
            zone.infiltration_ach,
            outdoor.len(),
            job.step_minutes
        ),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SurrogateEngine;

impl Engine for SurrogateEngine {
    fn kind(&self) -> EngineKind {
        EngineKind::Surrogate
    }

    fn run(&self, job: &SimulationJob, control: &RunControl) -> Result<EngineResult, EngineError> {
        run_surrogate_with(job, &job.surrogate, control, MAX_SUBSTEP)
    }
}
