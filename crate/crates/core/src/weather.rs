//! EPW weather files.

use std::collections::HashMap;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::RunPeriod;

const HEADER_LINES: usize = 8;
const DRY_BULB_COLUMN: usize = 6;
const RELATIVE_HUMIDITY_COLUMN: usize = 8;
const PRESSURE_COLUMN: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeatherError {
    #[error("bad EPW header: {0}")]
    BadHeader(String),
    #[error("EPW file has {found} hourly records, expected 8760 or 8784")]
    ShortFile { found: usize },
    #[error("line {line}, column {column}: `{value}` is not a number")]
    NonNumericField { line: usize, column: usize, value: String },
    #[error("line {line}: {detail}")]
    OutOfRange { line: usize, detail: String },
    #[error("{0} is outside the weather year")]
    OutsideWeatherYear(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub timezone: f64,
    pub elevation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub month: u32,
    pub day: u32,
    /// EPW hour, 1..=24.
    pub hour: u32,
    pub dry_bulb: f64,
    pub relative_humidity: f64,
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    pub location: Location,
    pub records: Vec<WeatherRecord>,
    /// Unparsed data lines, kept for pass-through.
    pub raw_lines: Vec<String>,
    day_index: HashMap<(u32, u32), usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutdoorConditions {
    pub timestamp: NaiveDateTime,
    pub dry_bulb: f64,
    pub relative_humidity: f64,
    pub pressure: f64,
}

fn number(fields: &[&str], column: usize, line: usize) -> Result<f64, WeatherError> {
    let raw = fields.get(column).map(|s| s.trim()).unwrap_or("");
    raw.parse().map_err(|_| WeatherError::NonNumericField {
        line,
        column: column + 1,
        value: raw.to_string(),
    })
}

pub fn parse_epw(text: &str) -> Result<WeatherSeries, WeatherError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    if lines.len() < HEADER_LINES {
        return Err(WeatherError::BadHeader(format!(
            "expected {HEADER_LINES} header lines, found {}",
            lines.len()
        )));
    }
    let location_line = lines[0].trim_start_matches('\u{feff}');
    if !location_line.to_ascii_uppercase().starts_with("LOCATION") {
        return Err(WeatherError::BadHeader("first line must start with LOCATION".into()));
    }
    if !lines[HEADER_LINES - 1].to_ascii_uppercase().starts_with("DATA PERIODS") {
        return Err(WeatherError::BadHeader(format!(
            "line {HEADER_LINES} must start with DATA PERIODS"
        )));
    }
    let loc: Vec<&str> = location_line.split(',').collect();
    if loc.len() < 10 {
        return Err(WeatherError::BadHeader("LOCATION line has fewer than 10 fields".into()));
    }
    let location = Location {
        name: loc[1].trim().to_string(),
        latitude: number(&loc, 6, 1)?,
        longitude: number(&loc, 7, 1)?,
        timezone: number(&loc, 8, 1)?,
        elevation: number(&loc, 9, 1)?,
    };

    let data: Vec<(usize, &str)> = lines
        .iter()
        .enumerate()
        .skip(HEADER_LINES)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, *l))
        .collect();
    if data.len() != 8760 && data.len() != 8784 {
        return Err(WeatherError::ShortFile { found: data.len() });
    }
    let mut records = Vec::with_capacity(data.len());
    let mut day_index = HashMap::new();
    for (line, text) in &data {
        let fields: Vec<&str> = text.split(',').collect();
        let int = |column: usize| -> Result<u32, WeatherError> {
            let v = number(&fields, column, *line)?;
            Ok(v as u32)
        };
        let record = WeatherRecord {
            month: int(1)?,
            day: int(2)?,
            hour: int(3)?,
            dry_bulb: number(&fields, DRY_BULB_COLUMN, *line)?,
            relative_humidity: number(&fields, RELATIVE_HUMIDITY_COLUMN, *line)?,
            pressure: number(&fields, PRESSURE_COLUMN, *line)?,
        };
        if !(0.0..=100.0).contains(&record.relative_humidity) {
            return Err(WeatherError::OutOfRange {
                line: *line,
                detail: format!("relative humidity {} outside [0, 100]", record.relative_humidity),
            });
        }
        if record.pressure <= 0.0 {
            return Err(WeatherError::OutOfRange {
                line: *line,
                detail: format!("pressure {} must be positive", record.pressure),
            });
        }
        day_index.entry((record.month, record.day)).or_insert(records.len());
        records.push(record);
    }
    Ok(WeatherSeries {
        location,
        records,
        raw_lines: data.iter().map(|(_, l)| l.to_string()).collect(),
        day_index,
    })
}

impl WeatherSeries {
    /// Record index of hour 0 (EPW hour 1) of the given month/day.
    fn day_start(&self, month: u32, day: u32) -> Option<usize> {
        self.day_index.get(&(month, day)).copied()
    }

    fn interpolate(&self, index: usize, fraction: f64) -> (f64, f64, f64) {
        let a = &self.records[index];
        let b = self.records.get(index + 1).unwrap_or(a);
        let lerp = |x: f64, y: f64| if fraction == 0.0 { x } else { x + (y - x) * fraction };
        (
            lerp(a.dry_bulb, b.dry_bulb),
            lerp(a.relative_humidity, b.relative_humidity),
            lerp(a.pressure, b.pressure),
        )
    }
}

/// Outdoor conditions at every step start in the run period. EPW hour `h`
/// is anchored at minute 0 of hour `h - 1`; values in between are linear.
pub fn slice_resample(
    series: &WeatherSeries,
    run_period: &RunPeriod,
    step_minutes: u32,
) -> Result<Vec<OutdoorConditions>, WeatherError> {
    if step_minutes == 0 || 60 % step_minutes != 0 {
        return Err(WeatherError::OutsideWeatherYear(format!("step {step_minutes} min")));
    }
    for date in run_period.days() {
        if series.day_start(date.month(), date.day()).is_none() {
            return Err(WeatherError::OutsideWeatherYear(date.to_string()));
        }
    }
    Ok(run_period
        .step_starts(step_minutes)
        .map(|t| {
            let base = series.day_start(t.month(), t.day()).expect("checked above");
            let index = base + t.hour() as usize;
            let fraction = t.minute() as f64 / 60.0;
            let (dry_bulb, relative_humidity, pressure) = series.interpolate(index, fraction);
            OutdoorConditions {
                timestamp: t,
                dry_bulb,
                relative_humidity,
                pressure,
            }
        })
        .collect())
}
