//! EnergyPlus Standard Output (ESO) reading and writing, and the tabular
//! result view built from it.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::schedule::{parse_timestamp, weekday_name, OccupancyTimeSeries, RunPeriod};
use crate::weather::OutdoorConditions;

pub const DICTIONARY_END: &str = "End of Data Dictionary";
pub const DATA_END: &str = "End of Data";
/// Highest report code reserved for timestamp records.
const LAST_TIME_CODE: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EsoError {
    #[error("missing `End of Data Dictionary`")]
    MissingDictionaryTerminator,
    #[error("missing `End of Data`")]
    MissingDataTerminator,
    #[error("line {line}: report code {code} is not declared in the dictionary")]
    UnknownReportCode { line: usize, code: u32 },
    #[error("line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("variable not reported: {0}")]
    VariableNotReported(String),
    #[error("no timestep or hourly data found")]
    NoData,
    #[error("no occupancy sample for {0}")]
    OccupancyNotCovered(NaiveDateTime),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frequency {
    TimeStep,
    Hourly,
    Daily,
    Monthly,
    RunPeriod,
    Annual,
    Other,
}

impl Frequency {
    fn parse(text: &str) -> Frequency {
        let word = text.trim().split(|c: char| c.is_whitespace() || c == '[').next().unwrap_or("");
        match word.to_ascii_lowercase().as_str() {
            "timestep" | "detailed" | "each" => Frequency::TimeStep,
            "hourly" => Frequency::Hourly,
            "daily" => Frequency::Daily,
            "monthly" => Frequency::Monthly,
            "runperiod" | "environment" => Frequency::RunPeriod,
            "annual" => Frequency::Annual,
            _ => Frequency::Other,
        }
    }

    fn is_time_series(self) -> bool {
        matches!(self, Frequency::TimeStep | Frequency::Hourly)
    }

    pub fn label(self) -> &'static str {
        match self {
            Frequency::TimeStep => "TimeStep",
            Frequency::Hourly => "Hourly",
            Frequency::Daily => "Daily",
            Frequency::Monthly => "Monthly",
            Frequency::RunPeriod => "RunPeriod",
            Frequency::Annual => "Annual",
            Frequency::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsoDictionaryEntry {
    pub report_code: u32,
    pub key: String,
    pub variable: String,
    pub units: String,
    pub frequency: Frequency,
}

/// One code-2 timestamp record and the values reported under it.
#[derive(Debug, Clone, PartialEq)]
pub struct EsoInterval {
    pub day_of_simulation: u32,
    pub month: u32,
    pub day: u32,
    pub dst: u32,
    /// 1..=24
    pub hour: u32,
    pub start_minute: f64,
    pub end_minute: f64,
    pub day_type: String,
    pub values: Vec<(u32, f64)>,
}

impl EsoInterval {
    /// Interval start as a timestamp in `year`.
    pub fn start(&self, year: i32) -> Option<NaiveDateTime> {
        let date = NaiveDate::from_ymd_opt(year, self.month, self.day)?;
        let minutes = (self.hour as i64 - 1) * 60 + self.start_minute.round() as i64;
        Some(date.and_time(NaiveTime::MIN) + Duration::minutes(minutes))
    }

    pub fn value(&self, code: u32) -> Option<f64> {
        self.values.iter().find(|(c, _)| *c == code).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsoEnvironment {
    pub title: String,
    pub intervals: Vec<EsoInterval>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EsoFile {
    pub header: String,
    pub dictionary: Vec<EsoDictionaryEntry>,
    pub environments: Vec<EsoEnvironment>,
    pub warnings: Vec<String>,
}

impl EsoFile {
    pub fn entry(&self, code: u32) -> Option<&EsoDictionaryEntry> {
        self.dictionary.iter().find(|e| e.report_code == code)
    }

    /// Finds a variable by name (case-insensitive), preferring `key` when given.
    pub fn find_variable(&self, variable: &str, key: Option<&str>) -> Option<&EsoDictionaryEntry> {
        let candidates: Vec<&EsoDictionaryEntry> = self
            .dictionary
            .iter()
            .filter(|e| e.frequency.is_time_series() && e.variable.eq_ignore_ascii_case(variable))
            .collect();
        key.and_then(|k| candidates.iter().find(|e| e.key.eq_ignore_ascii_case(k)).copied())
            .or_else(|| candidates.first().copied())
    }

    /// The weather-file run period environment if present, otherwise the last one.
    pub fn main_environment(&self) -> Option<&EsoEnvironment> {
        self.environments
            .iter()
            .find(|e| e.title.to_ascii_uppercase().starts_with("RUN PERIOD"))
            .or(self.environments.last())
    }
}

fn malformed(line: usize, detail: impl Into<String>) -> EsoError {
    EsoError::Malformed { line, detail: detail.into() }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, EsoError> {
    s.trim()
        .parse()
        .map_err(|_| malformed(line, format!("`{}` is not a number", s.trim())))
}

fn parse_dictionary_line(line: &str, line_no: usize) -> Result<Option<EsoDictionaryEntry>, EsoError> {
    let (head, freq) = match line.find('!') {
        Some(pos) => (&line[..pos], &line[pos + 1..]),
        None => (line, ""),
    };
    let parts: Vec<&str> = head.split(',').map(str::trim).collect();
    if parts.len() < 2 {
        return Err(malformed(line_no, "dictionary line needs a code and an item count"));
    }
    let code: u32 = parse_num(parts[0], line_no)?;
    if code <= LAST_TIME_CODE {
        return Ok(None);
    }
    // meters carry no key: `code,1,Electricity:Facility [J]`
    let (key, name_units) = match parts.len() {
        3 => ("", parts[2]),
        n if n >= 4 => (parts[2], parts[3]),
        _ => return Err(malformed(line_no, "dictionary line has no variable name")),
    };
    let (variable, units) = match (name_units.find('['), name_units.rfind(']')) {
        (Some(open), Some(close)) if open < close => (
            name_units[..open].trim().to_string(),
            name_units[open + 1..close].trim().to_string(),
        ),
        _ => (name_units.trim().to_string(), String::new()),
    };
    Ok(Some(EsoDictionaryEntry {
        report_code: code,
        key: key.to_string(),
        variable,
        units,
        frequency: Frequency::parse(freq),
    }))
}

/// Parses ESO text in a single forward pass.
pub fn parse_eso(text: &str) -> Result<EsoFile, EsoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut eso = EsoFile::default();
    let mut dictionary_done = false;
    for (line_no, line) in lines.by_ref() {
        if line.trim() == DICTIONARY_END {
            dictionary_done = true;
            break;
        }
        if line_no == 1 && line.starts_with("Program Version") {
            eso.header = line.to_string();
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if let Some(entry) = parse_dictionary_line(line, line_no)? {
            eso.dictionary.push(entry);
        }
    }
    if !dictionary_done {
        return Err(EsoError::MissingDictionaryTerminator);
    }

    let codes: HashMap<u32, Frequency> = eso
        .dictionary
        .iter()
        .map(|e| (e.report_code, e.frequency))
        .collect();
    let mut warned: HashSet<u32> = HashSet::new();
    for entry in &eso.dictionary {
        if !entry.frequency.is_time_series() && warned.insert(entry.report_code) {
            let message = format!(
                "skipping {} `{}` ({}): only timestep and hourly data are read",
                entry.report_code,
                entry.variable,
                entry.frequency.label()
            );
            warn!("{message}");
            eso.warnings.push(message);
        }
    }

    let mut data_done = false;
    // set while the latest timestamp record is not a code-2 record
    let mut in_aggregate = false;
    for (line_no, line) in lines {
        let trimmed = line.trim();
        if trimmed == DATA_END {
            data_done = true;
            break;
        }
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let code: u32 = parse_num(parts.next().unwrap_or(""), line_no)?;
        let rest: Vec<&str> = parts.collect();
        match code {
            1 => {
                eso.environments.push(EsoEnvironment {
                    title: rest.first().map(|s| s.trim().to_string()).unwrap_or_default(),
                    intervals: Vec::new(),
                });
                in_aggregate = false;
            }
            2 => {
                if rest.len() < 7 {
                    return Err(malformed(line_no, "timestamp record needs 8 items"));
                }
                let env = eso
                    .environments
                    .last_mut()
                    .ok_or_else(|| malformed(line_no, "timestamp before environment record"))?;
                env.intervals.push(EsoInterval {
                    day_of_simulation: parse_num(rest[0], line_no)?,
                    month: parse_num(rest[1], line_no)?,
                    day: parse_num(rest[2], line_no)?,
                    dst: parse_num(rest[3], line_no)?,
                    hour: parse_num(rest[4], line_no)?,
                    start_minute: parse_num(rest[5], line_no)?,
                    end_minute: parse_num(rest[6], line_no)?,
                    day_type: rest.get(7).map(|s| s.trim().to_string()).unwrap_or_default(),
                    values: Vec::new(),
                });
                in_aggregate = false;
            }
            3..=LAST_TIME_CODE => in_aggregate = true,
            _ => {
                let frequency = *codes
                    .get(&code)
                    .ok_or(EsoError::UnknownReportCode { line: line_no, code })?;
                if !frequency.is_time_series() || in_aggregate {
                    continue;
                }
                let value: f64 = parse_num(rest.first().copied().unwrap_or(""), line_no)?;
                let interval = eso
                    .environments
                    .last_mut()
                    .and_then(|e| e.intervals.last_mut())
                    .ok_or_else(|| malformed(line_no, "value record before any timestamp"))?;
                interval.values.push((code, value));
            }
        }
    }
    if !data_done {
        return Err(EsoError::MissingDataTerminator);
    }
    Ok(eso)
}

/// EnergyPlus output variable names for the tabulated quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariableMap {
    pub zone_air_temperature: String,
    pub zone_co2: String,
    pub zone_relative_humidity: String,
    pub outdoor_temperature: String,
    pub outdoor_pressure: String,
}

impl Default for VariableMap {
    fn default() -> Self {
        VariableMap {
            zone_air_temperature: "Zone Mean Air Temperature".into(),
            zone_co2: "Zone Air CO2 Concentration".into(),
            zone_relative_humidity: "Zone Air Relative Humidity".into(),
            outdoor_temperature: "Site Outdoor Air Drybulb Temperature".into(),
            outdoor_pressure: "Site Outdoor Air Barometric Pressure".into(),
        }
    }
}

impl VariableMap {
    pub fn zone_variables(&self) -> [&str; 3] {
        [&self.zone_air_temperature, &self.zone_co2, &self.zone_relative_humidity]
    }

    pub fn site_variables(&self) -> [&str; 2] {
        [&self.outdoor_temperature, &self.outdoor_pressure]
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "timestamp",
    "Simulated zone air temperature [C]",
    "Simulated zone CO2 concentration [ppm]",
    "Simulated zone relative humidity [%]",
    "Outdoor temperature [C]",
    "Outdoor air pressure [Pa]",
    "Occupancy state",
    "Window state",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Start of the reporting interval.
    pub timestamp: NaiveDateTime,
    pub zone_air_temperature: f64,
    pub zone_co2: f64,
    pub zone_relative_humidity: f64,
    pub outdoor_temperature: f64,
    pub outdoor_pressure: f64,
    pub occupancy: u32,
    pub window_open: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Joins ESO zone/site variables with the occupancy input and outdoor
/// weather. Site variables missing from the ESO fall back to `weather`.
pub fn to_result_table(
    eso: &EsoFile,
    variables: &VariableMap,
    zone_key: Option<&str>,
    occupancy: &OccupancyTimeSeries,
    weather: &[OutdoorConditions],
    run_period: &RunPeriod,
) -> Result<ResultTable, EsoError> {
    let mut zone_codes = [0u32; 3];
    for (slot, name) in zone_codes.iter_mut().zip(variables.zone_variables()) {
        *slot = eso
            .find_variable(name, zone_key)
            .ok_or_else(|| EsoError::VariableNotReported(name.to_string()))?
            .report_code;
    }
    let site_codes: Vec<Option<u32>> = variables
        .site_variables()
        .iter()
        .map(|name| eso.find_variable(name, None).map(|e| e.report_code))
        .collect();
    let weather_at: HashMap<NaiveDateTime, &OutdoorConditions> =
        weather.iter().map(|w| (w.timestamp, w)).collect();

    let env = eso.main_environment().ok_or(EsoError::NoData)?;
    let base = zone_codes[0];
    let year = run_period.begin.year();
    let mut rows = Vec::new();
    let mut last: HashMap<u32, f64> = HashMap::new();
    for interval in env.intervals.iter().filter(|i| i.value(base).is_some()) {
        for (code, value) in &interval.values {
            last.insert(*code, *value);
        }
        let timestamp = interval
            .start(year)
            .ok_or_else(|| malformed(0, format!("invalid date {}/{}", interval.month, interval.day)))?;
        let latest = |code: u32| last.get(&code).copied();
        let zone = |i: usize| latest(zone_codes[i]).ok_or_else(|| EsoError::VariableNotReported(variables.zone_variables()[i].to_string()));
        let site = |i: usize| -> Result<f64, EsoError> {
            if let Some(v) = site_codes[i].and_then(latest) {
                return Ok(v);
            }
            let w = weather_at
                .get(&timestamp)
                .ok_or_else(|| EsoError::VariableNotReported(variables.site_variables()[i].to_string()))?;
            Ok(if i == 0 { w.dry_bulb } else { w.pressure })
        };
        let sample = occupancy
            .sample_at(timestamp)
            .ok_or(EsoError::OccupancyNotCovered(timestamp))?;
        rows.push(ResultRow {
            timestamp,
            zone_air_temperature: zone(0)?,
            zone_co2: zone(1)?,
            zone_relative_humidity: zone(2)?,
            outdoor_temperature: site(0)?,
            outdoor_pressure: site(1)?,
            occupancy: sample.occupants,
            window_open: sample.window_open,
        });
    }
    if rows.is_empty() {
        return Err(EsoError::NoData);
    }
    Ok(ResultTable { rows })
}

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// Header row plus one line per row; floats use the shortest exact representation.
pub fn write_csv(table: &ResultTable) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in &table.rows {
        writer
            .write_record([
                r.timestamp.format(TIMESTAMP_FORMAT).to_string(),
                r.zone_air_temperature.to_string(),
                r.zone_co2.to_string(),
                r.zone_relative_humidity.to_string(),
                r.outdoor_temperature.to_string(),
                r.outdoor_pressure.to_string(),
                r.occupancy.to_string(),
                u8::from(r.window_open).to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Reads a table written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<ResultTable, EsoError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| malformed(1, e.to_string()))?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(malformed(1, "unexpected result header"));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| malformed(line, e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(malformed(line, "wrong column count"));
        }
        rows.push(ResultRow {
            timestamp: parse_timestamp(&record[0]).ok_or_else(|| malformed(line, "bad timestamp"))?,
            zone_air_temperature: parse_num(&record[1], line)?,
            zone_co2: parse_num(&record[2], line)?,
            zone_relative_humidity: parse_num(&record[3], line)?,
            outdoor_temperature: parse_num(&record[4], line)?,
            outdoor_pressure: parse_num(&record[5], line)?,
            occupancy: parse_num(&record[6], line)?,
            window_open: parse_num::<u8>(&record[7], line)? == 1,
        });
    }
    Ok(ResultTable { rows })
}

/// Streams an ESO file: dictionary first, then timestamped value records.
#[derive(Debug)]
pub struct EsoWriter {
    text: String,
    next_code: u32,
    records: usize,
    day_of_simulation: u32,
    current_date: Option<NaiveDate>,
    dictionary_closed: bool,
}

impl EsoWriter {
    pub fn new(program: &str) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "Program Version,{program}");
        text.push_str("1,5,Environment Title[],Latitude[deg],Longitude[deg],Time Zone[],Elevation[m]\n");
        text.push_str("2,8,Day of Simulation[],Month[],Day of Month[],DST Indicator[1=yes 0=no],Hour[],StartMinute[],EndMinute[],DayType\n");
        text.push_str("3,5,Cumulative Day of Simulation[],Month[],Day of Month[],DST Indicator[1=yes 0=no],DayType  ! When Daily Report Variables Requested\n");
        text.push_str("4,2,Cumulative Days of Simulation[],Month[]  ! When Monthly Report Variables Requested\n");
        text.push_str("5,1,Cumulative Days of Simulation[] ! When Run Period Report Variables Requested\n");
        text.push_str("6,1,Calendar Year of Simulation[] ! When Annual Report Variables Requested\n");
        EsoWriter {
            text,
            next_code: LAST_TIME_CODE + 1,
            records: 0,
            day_of_simulation: 0,
            current_date: None,
            dictionary_closed: false,
        }
    }

    /// Declares a timestep variable and returns its report code.
    pub fn declare(&mut self, key: &str, variable: &str, units: &str) -> u32 {
        assert!(!self.dictionary_closed, "dictionary already closed");
        let code = self.next_code;
        self.next_code += 1;
        let _ = writeln!(self.text, "{code},1,{key},{variable} [{units}] !TimeStep");
        code
    }

    pub fn begin_environment(&mut self, title: &str, location: &crate::weather::Location) {
        if !self.dictionary_closed {
            let _ = writeln!(self.text, "{DICTIONARY_END}");
            self.dictionary_closed = true;
        }
        let _ = writeln!(
            self.text,
            "1,{title},{},{},{},{}",
            location.latitude, location.longitude, location.timezone, location.elevation
        );
        self.records += 1;
    }

    pub fn timestamp(&mut self, start: NaiveDateTime, step_minutes: u32) {
        let date = start.date();
        if self.current_date != Some(date) {
            self.current_date = Some(date);
            self.day_of_simulation += 1;
        }
        let minute_of_day = (start - date.and_time(NaiveTime::MIN)).num_minutes() as u32;
        let hour = minute_of_day / 60 + 1;
        let start_minute = minute_of_day % 60;
        let _ = writeln!(
            self.text,
            "2,{},{},{},0,{},{:.2},{:.2},{}",
            self.day_of_simulation,
            date.month(),
            date.day(),
            hour,
            start_minute as f64,
            (start_minute + step_minutes) as f64,
            weekday_name(date.weekday())
        );
        self.records += 1;
    }

    pub fn value(&mut self, code: u32, value: f64) {
        let _ = writeln!(self.text, "{code},{value}");
        self.records += 1;
    }

    pub fn finish(mut self) -> String {
        if !self.dictionary_closed {
            let _ = writeln!(self.text, "{DICTIONARY_END}");
        }
        let _ = writeln!(self.text, "{DATA_END}");
        let _ = writeln!(self.text, " Number of Records Written={:>12}", self.records);
        self.text
    }
}
