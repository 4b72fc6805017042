mod common;

use common::*;
use roomsim::engine::surrogate::run_surrogate;
use roomsim::engine::{SimulationJob, SurrogateParams};
use roomsim::eso::{parse_eso, read_csv, to_result_table, write_csv, ResultTable, CSV_HEADER};
use roomsim::orchestrator::{build_job, Parameters, RawInputs};
use roomsim::weather::slice_resample;

fn job(begin: &str, end: &str, step: u32) -> SimulationJob {
    let mut params = Parameters::new(room(4.0, 5.0, 3.0, 90.0, 0.7), run_period(begin, end));
    params.step = Some(step);
    build_job(
        RawInputs {
            idf: REFERENCE_IDF.as_bytes(),
            weather: mild_epw().as_bytes(),
            occupancy: occupancy_csv("2023-05-01", 14, 30).as_bytes(),
        },
        &params,
    )
    .unwrap()
}

fn assert_bit_identical(a: &ResultTable, b: &ResultTable) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.timestamp, y.timestamp);
        for (p, q) in [
            (x.zone_air_temperature, y.zone_air_temperature),
            (x.zone_co2, y.zone_co2),
            (x.zone_relative_humidity, y.zone_relative_humidity),
            (x.outdoor_temperature, y.outdoor_temperature),
            (x.outdoor_pressure, y.outdoor_pressure),
        ] {
            assert_eq!(p.to_bits(), q.to_bits(), "{} {p} vs {q}", x.timestamp);
        }
        assert_eq!((x.occupancy, x.window_open), (y.occupancy, y.window_open));
    }
}

#[test]
fn surrogate_eso_parses_to_the_in_memory_table() {
    for (begin, end, step) in [("2023-05-02", "2023-05-02", 10), ("2023-05-01", "2023-05-07", 15), ("2023-05-03", "2023-05-04", 30)] {
        let job = job(begin, end, step);
        let result = run_surrogate(&job, &SurrogateParams::default()).unwrap();
        let eso = parse_eso(&result.eso_text).unwrap();
        let weather = slice_resample(&job.weather, &job.run_period, step).unwrap();
        let table = to_result_table(&eso, &job.variables, Some("OFFICE"), &job.occupancy, &weather, &job.run_period).unwrap();
        assert_bit_identical(&table, &result.result_table);

        let minutes = job.run_period.day_count() as u32 * 1440;
        assert_eq!(table.len() as u32, minutes / step);
        assert_eq!(table.rows[0].timestamp, job.run_period.start());
    }
}

#[test]
fn csv_has_the_seven_columns_and_round_trips() {
    let job = job("2023-05-02", "2023-05-03", 10);
    let result = run_surrogate(&job, &SurrogateParams::default()).unwrap();
    let csv = write_csv(&result.result_table);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        header[1..],
        [
            "Simulated zone air temperature [C]",
            "Simulated zone CO2 concentration [ppm]",
            "Simulated zone relative humidity [%]",
            "Outdoor temperature [C]",
            "Outdoor air pressure [Pa]",
            "Occupancy state",
            "Window state",
        ]
    );
    assert_eq!(header, CSV_HEADER);
    assert_eq!(lines.count(), 2 * 1440 / 10);
    assert_bit_identical(&read_csv(&csv).unwrap(), &result.result_table);
}

#[test]
fn occupancy_and_window_columns_mirror_the_input() {
    let job = job("2023-05-01", "2023-05-07", 10);
    let table = run_surrogate(&job, &SurrogateParams::default()).unwrap().result_table;
    for row in &table.rows {
        let (occ, win) = office_sample(row.timestamp);
        assert_eq!((row.occupancy, row.window_open), (occ, win), "{}", row.timestamp);
    }
}
