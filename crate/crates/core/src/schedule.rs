//! Compiles tabular occupancy/window time series into EnergyPlus
//! `Schedule:Day:Interval` / `Schedule:Week:Daily` / `Schedule:Year` objects.
//!
//! A sample at timestamp `t` holds for `[t, t + step)`. In the day schedule
//! that becomes an interval ending at `t + step`, since `Until: hh:mm`
//! covers every time up to and including `hh:mm`.

use std::collections::HashMap;
use std::fmt;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::idf::{IdfDocument, IdfObject};
use crate::room::zone_name;

pub const FRACTION_LIMITS: &str = "roomsim_fraction";
pub const ONOFF_LIMITS: &str = "roomsim_onoff";
pub const ANY_LIMITS: &str = "roomsim_any";
pub const ALWAYS_ON_SCHEDULE: &str = "roomsim_always_on";
pub const ACTIVITY_SCHEDULE: &str = "roomsim_activity";
pub const PEOPLE_NAME: &str = "roomsim_people";
pub const WINDOW_VENTILATION_NAME: &str = "roomsim_window_ventilation";
pub const RUN_PERIOD_NAME: &str = "roomsim_run";

const MINUTES_PER_DAY: u32 = 24 * 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("bad header: expected `timestamp,occupancy[,window]`, found `{0}`")]
    BadHeader(String),
    #[error("row {row}: {detail}")]
    BadRow { row: usize, detail: String },
    #[error("row {row}: irregular step, expected {expected} min, found {found} min")]
    IrregularStep { row: usize, expected: i64, found: i64 },
    #[error("row {row}: timestamps are not strictly increasing")]
    NonMonotonicTimestamps { row: usize },
    #[error("row {row}: negative occupancy {value}")]
    NegativeOccupancy { row: usize, value: i64 },
    #[error("step of {0} min does not divide an hour")]
    UnsupportedStep(i64),
    #[error("series start {0} is not aligned to its step")]
    MisalignedStart(NaiveDateTime),
    #[error("series needs at least two rows to infer its step")]
    TooFewRows,
    #[error("series does not cover {0}")]
    DateNotCovered(NaiveDate),
    #[error("timestamp {0} is outside the run period")]
    OutsideRunPeriod(NaiveDateTime),
    #[error("invalid run period: {0}")]
    InvalidRunPeriod(String),
    #[error("model must contain exactly one zone, found {0}")]
    ZoneCountMismatch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub occupants: u32,
    pub window_open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyTimeSeries {
    pub start: NaiveDateTime,
    pub step_minutes: u32,
    pub samples: Vec<Sample>,
}

impl OccupancyTimeSeries {
    pub fn new(start: NaiveDateTime, step_minutes: u32, samples: Vec<Sample>) -> Result<Self, ScheduleError> {
        if step_minutes == 0 || step_minutes > 60 || 60 % step_minutes != 0 {
            return Err(ScheduleError::UnsupportedStep(step_minutes as i64));
        }
        if samples.is_empty() {
            return Err(ScheduleError::TooFewRows);
        }
        if start.second() != 0 || minute_of_day(start) % step_minutes != 0 {
            return Err(ScheduleError::MisalignedStart(start));
        }
        Ok(OccupancyTimeSeries {
            start,
            step_minutes,
            samples,
        })
    }

    pub fn step(&self) -> Duration {
        Duration::minutes(self.step_minutes as i64)
    }

    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        self.start + self.step() * index as i32
    }

    /// First instant not covered by the series.
    pub fn end(&self) -> NaiveDateTime {
        self.timestamp(self.samples.len())
    }

    /// Sample whose interval contains `t`.
    pub fn sample_at(&self, t: NaiveDateTime) -> Option<Sample> {
        if t < self.start {
            return None;
        }
        let index = (t - self.start).num_minutes() / self.step_minutes as i64;
        self.samples.get(index as usize).copied()
    }

    pub fn covers(&self, from: NaiveDateTime, to: NaiveDateTime) -> bool {
        self.start <= from && to <= self.end()
    }

    pub fn covers_dates(&self, begin: NaiveDate, end: NaiveDate) -> bool {
        self.covers(begin.and_time(NaiveTime::MIN), day_after(end))
    }

    /// Peak occupant count.
    pub fn n_max(&self) -> u32 {
        self.samples.iter().map(|s| s.occupants).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("timestamp,occupancy,window\n");
        for (i, s) in self.samples.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.timestamp(i).format("%Y-%m-%dT%H:%M:%S"),
                s.occupants,
                u8::from(s.window_open)
            ));
        }
        out
    }
}

fn minute_of_day(t: NaiveDateTime) -> u32 {
    t.hour() * 60 + t.minute()
}

fn day_after(date: NaiveDate) -> NaiveDateTime {
    (date + Duration::days(1)).and_time(NaiveTime::MIN)
}

pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"];
    let text = text.trim();
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
}

/// Parses `timestamp,occupancy[,window]` CSV text.
pub fn parse_occupancy_csv(text: &str) -> Result<OccupancyTimeSeries, ScheduleError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.trim_start_matches('\u{feff}').as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ScheduleError::BadHeader(e.to_string()))?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let has_window = match names.as_slice() {
        [t, o] if t == "timestamp" && o == "occupancy" => false,
        [t, o, w] if t == "timestamp" && o == "occupancy" && w == "window" => true,
        _ => return Err(ScheduleError::BadHeader(headers.iter().collect::<Vec<_>>().join(","))),
    };

    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| ScheduleError::BadRow { row, detail: e.to_string() })?;
        let expected = if has_window { 3 } else { 2 };
        if record.len() != expected {
            return Err(ScheduleError::BadRow {
                row,
                detail: format!("expected {expected} columns, found {}", record.len()),
            });
        }
        let t = parse_timestamp(&record[0]).ok_or_else(|| ScheduleError::BadRow {
            row,
            detail: format!("invalid timestamp `{}`", &record[0]),
        })?;
        let count: i64 = record[1].parse().map_err(|_| ScheduleError::BadRow {
            row,
            detail: format!("occupancy `{}` is not an integer", &record[1]),
        })?;
        if count < 0 {
            return Err(ScheduleError::NegativeOccupancy { row, value: count });
        }
        let window_open = if has_window {
            match &record[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(ScheduleError::BadRow {
                        row,
                        detail: format!("window state `{other}` must be 0 or 1"),
                    })
                }
            }
        } else {
            false
        };
        let occupants = u32::try_from(count).map_err(|_| ScheduleError::BadRow {
            row,
            detail: format!("occupancy {count} is too large"),
        })?;
        times.push((row, t));
        samples.push(Sample { occupants, window_open });
    }
    if times.len() < 2 {
        return Err(ScheduleError::TooFewRows);
    }
    let step = (times[1].1 - times[0].1).num_minutes();
    for pair in times.windows(2) {
        let (row, t) = pair[1];
        let delta = (t - pair[0].1).num_minutes();
        if t <= pair[0].1 {
            return Err(ScheduleError::NonMonotonicTimestamps { row });
        }
        if delta != step {
            return Err(ScheduleError::IrregularStep { row, expected: step, found: delta });
        }
    }
    if !(1..=60).contains(&step) || 60 % step != 0 {
        return Err(ScheduleError::UnsupportedStep(step));
    }
    OccupancyTimeSeries::new(times[0].1, step as u32, samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPeriod {
    pub begin: NaiveDate,
    pub end: NaiveDate,
}

impl RunPeriod {
    pub fn new(begin: NaiveDate, end: NaiveDate) -> Result<Self, ScheduleError> {
        RunPeriod { begin, end }.validate()
    }

    pub fn validate(self) -> Result<Self, ScheduleError> {
        if self.begin > self.end {
            return Err(ScheduleError::InvalidRunPeriod(format!(
                "begin {} is after end {}",
                self.begin, self.end
            )));
        }
        if self.begin.year() != self.end.year() {
            return Err(ScheduleError::InvalidRunPeriod(
                "run period must stay within one calendar year".into(),
            ));
        }
        Ok(self)
    }

    pub fn start_weekday(&self) -> Weekday {
        self.begin.weekday()
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        self.begin.iter_days().take_while(move |d| *d <= end)
    }

    pub fn day_count(&self) -> usize {
        ((self.end - self.begin).num_days() + 1) as usize
    }

    pub fn start(&self) -> NaiveDateTime {
        self.begin.and_time(NaiveTime::MIN)
    }

    /// Exclusive end instant (midnight after the last day).
    pub fn end_instant(&self) -> NaiveDateTime {
        day_after(self.end)
    }

    pub fn contains_date(&self, date: NaiveDate) -> bool {
        self.begin <= date && date <= self.end
    }

    /// Step start times covering the whole period.
    pub fn step_starts(&self, step_minutes: u32) -> impl Iterator<Item = NaiveDateTime> {
        let start = self.start();
        let count = self.day_count() as i64 * MINUTES_PER_DAY as i64 / step_minutes as i64;
        (0..count).map(move |i| start + Duration::minutes(i * step_minutes as i64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Occupancy,
    Window,
}

impl Quantity {
    pub fn prefix(self) -> &'static str {
        match self {
            Quantity::Occupancy => "occ",
            Quantity::Window => "win",
        }
    }

    fn type_limits(self) -> &'static str {
        match self {
            Quantity::Occupancy => FRACTION_LIMITS,
            Quantity::Window => ONOFF_LIMITS,
        }
    }

    fn value(self, sample: Sample, n_max: u32) -> f64 {
        match self {
            Quantity::Occupancy if n_max == 0 => 0.0,
            Quantity::Occupancy => sample.occupants as f64 / n_max as f64,
            Quantity::Window => f64::from(u8::from(sample.window_open)),
        }
    }

    pub fn day_name(self, date: NaiveDate) -> String {
        format!("{}_d_{}", self.prefix(), date.format("%Y%m%d"))
    }

    pub fn zero_day_name(self) -> String {
        format!("{}_d_zero", self.prefix())
    }

    pub fn week_name(self, sunday: NaiveDate) -> String {
        format!("{}_w_{}", self.prefix(), sunday.format("%Y%m%d"))
    }

    pub fn year_name(self) -> String {
        format!("{}_year", self.prefix())
    }
}

/// Time of day in minutes, 1..=1440, printed as `hh:mm` with `24:00` at the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Until(pub u32);

impl fmt::Display for Until {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaySchedule {
    pub name: String,
    /// `None` for the shared all-zero day.
    pub date: Option<NaiveDate>,
    pub intervals: Vec<(Until, f64)>,
}

impl DaySchedule {
    /// Value in effect for the timestep ending at `minute` (1..=1440).
    pub fn value_at(&self, minute: u32) -> f64 {
        self.intervals
            .iter()
            .find(|(until, _)| until.0 >= minute)
            .or(self.intervals.last())
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    fn zero(quantity: Quantity) -> Self {
        DaySchedule {
            name: quantity.zero_day_name(),
            date: None,
            intervals: vec![(Until(MINUTES_PER_DAY), 0.0)],
        }
    }

    fn to_idf(&self, quantity: Quantity) -> IdfObject {
        let mut fields = vec![self.name.clone(), quantity.type_limits().to_string(), "No".to_string()];
        for (until, value) in &self.intervals {
            fields.push(format!("Until: {until}"));
            fields.push(format!("{value}"));
        }
        IdfObject::new("Schedule:Day:Interval", fields)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeekSchedule {
    pub name: String,
    pub sunday: NaiveDate,
    /// Sunday..Saturday, Holiday, SummerDesignDay, WinterDesignDay, CustomDay1, CustomDay2.
    pub day_types: [String; 12],
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearSpan {
    pub week: String,
    pub from: NaiveDate,
    pub to: NaiveDate,
}

#[derive(Debug, Clone)]
pub struct CompiledSchedules {
    pub quantity: Quantity,
    pub run_period: RunPeriod,
    pub day_schedules: Vec<DaySchedule>,
    pub zero_day: DaySchedule,
    pub week_schedules: Vec<WeekSchedule>,
    pub year_schedule: Vec<YearSpan>,
    /// Peak occupant count; `None` for window state.
    pub n_max: Option<u32>,
    day_index: HashMap<String, usize>,
}

fn compile_day_with(
    series: &OccupancyTimeSeries,
    date: NaiveDate,
    quantity: Quantity,
    name: &str,
    n_max: u32,
) -> Result<DaySchedule, ScheduleError> {
    if !series.covers_dates(date, date) {
        return Err(ScheduleError::DateNotCovered(date));
    }
    let first = ((date.and_time(NaiveTime::MIN) - series.start).num_minutes() / series.step_minutes as i64) as usize;
    let per_day = (MINUTES_PER_DAY / series.step_minutes) as usize;
    let mut intervals: Vec<(Until, f64)> = Vec::new();
    for (k, sample) in series.samples[first..first + per_day].iter().enumerate() {
        let value = quantity.value(*sample, n_max);
        let until = Until((k as u32 + 1) * series.step_minutes);
        match intervals.last_mut() {
            Some((last_until, last_value)) if *last_value == value => *last_until = until,
            _ => intervals.push((until, value)),
        }
    }
    Ok(DaySchedule {
        name: name.to_string(),
        date: Some(date),
        intervals,
    })
}

/// Run-length encodes one day of the series into `Until:` intervals.
pub fn compile_day(
    series: &OccupancyTimeSeries,
    date: NaiveDate,
    quantity: Quantity,
    name: &str,
) -> Result<DaySchedule, ScheduleError> {
    compile_day_with(series, date, quantity, name, series.n_max())
}

fn sunday_of(date: NaiveDate) -> NaiveDate {
    date - Duration::days(date.weekday().num_days_from_sunday() as i64)
}

/// Builds the full day/week/year hierarchy for the run period.
pub fn compile_schedules(
    series: &OccupancyTimeSeries,
    run_period: RunPeriod,
    quantity: Quantity,
) -> Result<CompiledSchedules, ScheduleError> {
    let run_period = run_period.validate()?;
    let n_max = series.n_max();
    let zero_day = DaySchedule::zero(quantity);
    let day_schedules = run_period
        .days()
        .map(|d| compile_day_with(series, d, quantity, &quantity.day_name(d), n_max))
        .collect::<Result<Vec<_>, _>>()?;

    let mut week_schedules = Vec::new();
    let mut year_schedule = Vec::new();
    let mut sunday = sunday_of(run_period.begin);
    while sunday <= run_period.end {
        let name = quantity.week_name(sunday);
        let day_types: [String; 12] = std::array::from_fn(|i| {
            let date = sunday + Duration::days(i as i64);
            if i < 7 && run_period.contains_date(date) {
                quantity.day_name(date)
            } else {
                zero_day.name.clone()
            }
        });
        year_schedule.push(YearSpan {
            week: name.clone(),
            from: sunday.max(run_period.begin),
            to: (sunday + Duration::days(6)).min(run_period.end),
        });
        week_schedules.push(WeekSchedule { name, sunday, day_types });
        sunday += Duration::days(7);
    }

    let mut day_index: HashMap<String, usize> = day_schedules
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.clone(), i))
        .collect();
    day_index.insert(zero_day.name.clone(), usize::MAX);
    Ok(CompiledSchedules {
        quantity,
        run_period,
        day_schedules,
        zero_day,
        week_schedules,
        year_schedule,
        n_max: (quantity == Quantity::Occupancy).then_some(n_max),
        day_index,
    })
}

impl CompiledSchedules {
    pub fn day(&self, name: &str) -> Option<&DaySchedule> {
        match self.day_index.get(name) {
            Some(&usize::MAX) => Some(&self.zero_day),
            Some(&i) => self.day_schedules.get(i),
            None => None,
        }
    }

    /// IDF objects: zero day, per-date days, weeks, then the year schedule.
    /// The outer year spans are widened to Jan 1 / Dec 31 so the year is
    /// fully covered; the widened dates lie outside the run period.
    pub fn to_idf_objects(&self) -> Vec<IdfObject> {
        let mut objects = vec![self.zero_day.to_idf(self.quantity)];
        objects.extend(self.day_schedules.iter().map(|d| d.to_idf(self.quantity)));
        for week in &self.week_schedules {
            let mut fields = vec![week.name.clone()];
            fields.extend(week.day_types.iter().cloned());
            objects.push(IdfObject::new("Schedule:Week:Daily", fields));
        }
        let mut fields = vec![self.quantity.year_name(), self.quantity.type_limits().to_string()];
        let last = self.year_schedule.len().saturating_sub(1);
        for (i, span) in self.year_schedule.iter().enumerate() {
            let from = if i == 0 { (1, 1) } else { (span.from.month(), span.from.day()) };
            let to = if i == last { (12, 31) } else { (span.to.month(), span.to.day()) };
            fields.push(span.week.clone());
            for v in [from.0, from.1, to.0, to.1] {
                fields.push(v.to_string());
            }
        }
        objects.push(IdfObject::new("Schedule:Year", fields));
        objects
    }
}

/// Resolves year → week → day → interval for the timestep ending at `timestamp`.
/// Midnight belongs to the preceding day as `24:00`.
pub fn evaluate_schedules(compiled: &CompiledSchedules, timestamp: NaiveDateTime) -> Result<f64, ScheduleError> {
    let mut date = timestamp.date();
    let mut minute = minute_of_day(timestamp);
    if minute == 0 && timestamp.second() == 0 {
        date = date.pred_opt().ok_or(ScheduleError::OutsideRunPeriod(timestamp))?;
        minute = MINUTES_PER_DAY;
    }
    if !compiled.run_period.contains_date(date) {
        return Err(ScheduleError::OutsideRunPeriod(timestamp));
    }
    let span = compiled
        .year_schedule
        .iter()
        .find(|s| s.from <= date && date <= s.to)
        .ok_or(ScheduleError::OutsideRunPeriod(timestamp))?;
    let week = compiled
        .week_schedules
        .iter()
        .find(|w| w.name == span.week)
        .ok_or(ScheduleError::OutsideRunPeriod(timestamp))?;
    let day_name = &week.day_types[date.weekday().num_days_from_sunday() as usize];
    let day = compiled
        .day(day_name)
        .ok_or(ScheduleError::OutsideRunPeriod(timestamp))?;
    Ok(day.value_at(minute))
}

/// Schedule type limits and constant schedules the generated objects refer to.
pub fn support_objects() -> Vec<IdfObject> {
    vec![
        IdfObject::new("ScheduleTypeLimits", [FRACTION_LIMITS, "0", "1", "Continuous"]),
        IdfObject::new("ScheduleTypeLimits", [ONOFF_LIMITS, "0", "1", "Discrete"]),
        IdfObject::new("ScheduleTypeLimits", [ANY_LIMITS, "", "", "Continuous"]),
        IdfObject::new("Schedule:Constant", [ALWAYS_ON_SCHEDULE, FRACTION_LIMITS, "1"]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttachOptions {
    /// Air changes per hour while the window is open.
    pub window_open_ach: f64,
    /// Total heat per person, W; used as the People activity level.
    pub heat_gain_per_person: f64,
    /// m³/s per person.
    pub co2_gen_per_person: f64,
}

impl Default for AttachOptions {
    fn default() -> Self {
        AttachOptions {
            window_open_ach: 5.0,
            heat_gain_per_person: 100.0,
            co2_gen_per_person: 5.0e-6,
        }
    }
}

fn is_generated(o: &IdfObject) -> bool {
    let schedule_class = ["Schedule:Day:Interval", "Schedule:Week:Daily", "Schedule:Year"]
        .iter()
        .any(|c| o.is_class(c));
    schedule_class
        && o.name().is_some_and(|n| {
            let n = n.to_ascii_lowercase();
            n.starts_with("occ_") || n.starts_with("win_")
        })
}

/// Writes both schedule hierarchies into the model and wires them to a
/// People object, a window ventilation object and the run period.
pub fn attach_schedules(
    doc: &IdfDocument,
    occupancy: &CompiledSchedules,
    window: &CompiledSchedules,
    run_period: RunPeriod,
    options: AttachOptions,
) -> Result<IdfDocument, ScheduleError> {
    let zone = zone_name(doc).map_err(|e| match e {
        crate::room::RoomError::ZoneCountMismatch(n) => ScheduleError::ZoneCountMismatch(n),
        _ => ScheduleError::ZoneCountMismatch(0),
    })?;
    let run_period = run_period.validate()?;
    let mut out = doc.clone();
    out.remove_where(is_generated);
    out.remove_where(|o| {
        o.is_class("People") && !o.name().is_some_and(|n| n.eq_ignore_ascii_case(PEOPLE_NAME))
    });

    let mut objects = support_objects();
    objects.push(IdfObject::new(
        "Schedule:Constant",
        [ACTIVITY_SCHEDULE.to_string(), ANY_LIMITS.to_string(), format!("{}", options.heat_gain_per_person)],
    ));
    objects.extend(occupancy.to_idf_objects());
    objects.extend(window.to_idf_objects());
    let co2_rate = options.co2_gen_per_person / options.heat_gain_per_person;
    objects.push(IdfObject::new(
        "People",
        [
            PEOPLE_NAME.to_string(),
            zone.clone(),
            occupancy.quantity.year_name(),
            "People".into(),
            occupancy.n_max.unwrap_or(0).to_string(),
            String::new(),
            String::new(),
            "0.3".into(),
            "autocalculate".into(),
            ACTIVITY_SCHEDULE.into(),
            format!("{co2_rate:e}"),
        ],
    ));
    objects.push(IdfObject::new(
        "ZoneVentilation:DesignFlowRate",
        [
            WINDOW_VENTILATION_NAME.to_string(),
            zone,
            window.quantity.year_name(),
            "AirChanges/Hour".into(),
            String::new(),
            String::new(),
            String::new(),
            format!("{}", options.window_open_ach),
            "Natural".into(),
            "0".into(),
            "1".into(),
            "1".into(),
            "0".into(),
            "0".into(),
            "0".into(),
        ],
    ));
    for object in objects {
        let class = object.class_name.clone();
        out.upsert(&class, 0, object).expect("generated objects are named");
    }
    set_run_period(&mut out, run_period);
    Ok(out)
}

fn set_run_period(doc: &mut IdfDocument, run_period: RunPeriod) {
    let handles = doc.find_objects("RunPeriod");
    let values = [
        run_period.begin.month().to_string(),
        run_period.begin.day().to_string(),
        run_period.begin.year().to_string(),
        run_period.end.month().to_string(),
        run_period.end.day().to_string(),
        run_period.end.year().to_string(),
        weekday_name(run_period.start_weekday()).to_string(),
    ];
    match handles.first() {
        Some(first) => {
            let object = doc.get_mut(*first).expect("handle");
            for (i, v) in values.iter().enumerate() {
                object.set_field(i + 1, v.clone());
            }
            let keep = *first;
            let mut index = 0;
            doc.objects.retain(|o| {
                let retain = !o.is_class("RunPeriod") || index == keep.0;
                index += 1;
                retain
            });
        }
        None => {
            let mut fields = vec![RUN_PERIOD_NAME.to_string()];
            fields.extend(values);
            fields.extend(["No", "No", "No", "Yes", "Yes"].map(String::from));
            doc.push(IdfObject::new("RunPeriod", fields));
        }
    }
}

/// Sets the number of zone timesteps per hour.
pub fn set_timestep(doc: &IdfDocument, step_minutes: u32) -> IdfDocument {
    let mut out = doc.clone();
    let per_hour = (60 / step_minutes.max(1)).to_string();
    match out.find_objects("Timestep").first() {
        Some(h) => out.get_mut(*h).expect("handle").set_field(0, per_hour),
        None => {
            let at = out
                .objects
                .iter()
                .position(|o| o.is_class("Building"))
                .map(|i| i + 1)
                .unwrap_or(out.len());
            out.insert(at, [IdfObject::new("Timestep", [per_hour])]);
        }
    }
    out
}

pub fn weekday_name(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "Monday",
        Weekday::Tue => "Tuesday",
        Weekday::Wed => "Wednesday",
        Weekday::Thu => "Thursday",
        Weekday::Fri => "Friday",
        Weekday::Sat => "Saturday",
        Weekday::Sun => "Sunday",
    }
}
