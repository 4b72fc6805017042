#![allow(dead_code)]

pub mod http;
pub mod oracles;
pub mod schedules;

use std::path::PathBuf;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use roomsim::orchestrator::Parameters;
use roomsim::room::RoomSpec;
use roomsim::schedule::RunPeriod;

pub const REFERENCE_IDF: &str = include_str!("../data/reference_room.idf");

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(data_dir().join("idf"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "idf"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

/// Full-year EPW with dry bulb `temp(hour_index)`, 50 % RH and 95 kPa.
pub fn synthetic_epw(year: i32, temp: impl Fn(usize) -> f64) -> String {
    let mut out = String::from(
        "LOCATION,Testville,BY,DEU,SYN,000000,48.13,11.70,1.0,520.0\n\
         DESIGN CONDITIONS,0\n\
         TYPICAL/EXTREME PERIODS,0\n\
         GROUND TEMPERATURES,0\n\
         HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n\
         COMMENTS 1,synthetic test weather\n\
         COMMENTS 2,\n\
         DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31\n",
    );
    let mut date = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
    let mut i = 0;
    while date.year() == year {
        for hour in 1..=24 {
            out.push_str(&format!(
                "{},{},{},{},60,?9?9?9?9E0?9?9?9?9?9?9?9?9?9?9?9?9?9?9?9*9*9?9?9?9,{},5.0,50,95000,0,0,300,0,0,0,0,0,0,0,180,2.0,5,5,20.0,77777,9,999999999,0,0.1,0,88,0.2,0.0,1.0\n",
                date.year(),
                date.month(),
                date.day(),
                hour,
                temp(i)
            ));
            i += 1;
        }
        date = date.succ_opt().unwrap();
    }
    out
}

pub fn mild_epw() -> String {
    synthetic_epw(2023, |i| 12.0 + 6.0 * ((i % 24) as f64 / 24.0 * std::f64::consts::TAU).sin())
}

/// Office pattern: two people 08:00–17:00 on weekdays, window open
/// 12:00–12:30.
pub fn office_sample(t: NaiveDateTime) -> (u32, bool) {
    let weekday = t.weekday().num_days_from_monday() < 5;
    let minute = t.hour() * 60 + t.minute();
    let occupied = weekday && (8 * 60..17 * 60).contains(&minute);
    let window = weekday && (12 * 60..12 * 60 + 30).contains(&minute);
    (if occupied { 2 } else { 0 }, window)
}

pub fn occupancy_csv(begin: &str, days: i64, step_minutes: i64) -> String {
    let start = NaiveDate::parse_from_str(begin, "%Y-%m-%d").unwrap().and_hms_opt(0, 0, 0).unwrap();
    let mut out = String::from("timestamp,occupancy,window\n");
    let n = days * 24 * 60 / step_minutes;
    for k in 0..n {
        let t = start + Duration::minutes(k * step_minutes);
        let (occ, win) = office_sample(t);
        out.push_str(&format!("{},{},{}\n", t.format("%Y-%m-%dT%H:%M"), occ, u8::from(win)));
    }
    out
}

pub fn room(width: f64, depth: f64, height: f64, orientation: f64, ach: f64) -> RoomSpec {
    RoomSpec {
        width,
        depth,
        height,
        orientation,
        infiltration_ach: ach,
    }
}

pub fn run_period(begin: &str, end: &str) -> RunPeriod {
    RunPeriod::new(begin.parse().unwrap(), end.parse().unwrap()).unwrap()
}

pub fn one_day_parameters() -> Parameters {
    Parameters::new(room(4.0, 5.0, 3.0, 0.0, 0.5), run_period("2023-05-02", "2023-05-02"))
}

pub fn parameters_json(begin: &str, end: &str) -> serde_json::Value {
    serde_json::json!({
        "room": { "width": 4.0, "depth": 5.0, "height": 3.0, "orientation": 0.0, "infiltration_ach": 0.5 },
        "run_period": { "begin": begin, "end": end },
        "step": 10,
        "engine": "surrogate"
    })
}
