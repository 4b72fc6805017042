mod common;

use chrono::{Duration, NaiveDate};
use common::oracles::steady_state_co2;
use common::*;
use roomsim::engine::surrogate::{co2_step, co2_step_with, run_surrogate_with, MAX_SUBSTEP};
use roomsim::engine::{RunControl, SimulationJob, SurrogateParams};
use roomsim::eso::ResultTable;
use roomsim::orchestrator::{build_job, Parameters, RawInputs};

const OUTDOOR: f64 = 400.0;

fn steady_state(occupants: f64, generation: f64, volume: f64, ach: f64) -> f64 {
    steady_state_co2(OUTDOOR, occupants, generation, volume, ach)
}

fn csv_with(begin: &str, days: i64, step: i64, occupants: impl Fn(i64) -> u32) -> String {
    let start = NaiveDate::parse_from_str(begin, "%Y-%m-%d").unwrap().and_hms_opt(0, 0, 0).unwrap();
    let mut out = String::from("timestamp,occupancy,window\n");
    for k in 0..days * 1440 / step {
        let t = start + Duration::minutes(k * step);
        out.push_str(&format!("{},{},0\n", t.format("%Y-%m-%dT%H:%M"), occupants(k * step)));
    }
    out
}

fn job(occupancy: &str, begin: &str, end: &str, step: u32) -> SimulationJob {
    let mut params = Parameters::new(room(4.0, 4.0, 3.0, 0.0, 1.0), run_period(begin, end));
    params.step = Some(step);
    build_job(
        RawInputs {
            idf: REFERENCE_IDF.as_bytes(),
            weather: mild_epw().as_bytes(),
            occupancy: occupancy.as_bytes(),
        },
        &params,
    )
    .unwrap()
}

fn run(job: &SimulationJob, max_substep: f64) -> ResultTable {
    run_surrogate_with(job, &SurrogateParams::default(), &RunControl::new(), max_substep)
        .unwrap()
        .result_table
}

#[test]
fn occupied_room_converges_to_the_analytic_steady_state() {
    let p = SurrogateParams::default();
    let expected = steady_state(2.0, p.co2_gen_per_person, 48.0, 1.0);
    assert!((expected - 1150.0).abs() < 1e-9);

    let occ = csv_with("2023-03-06", 2, 10, |_| 2);
    let table = run(&job(&occ, "2023-03-06", "2023-03-07", 10), MAX_SUBSTEP);
    let last = table.rows.last().unwrap().zone_co2;
    assert!((last - 1150.0).abs() <= 0.01 * 1150.0, "{last}");
    assert!(table.rows.windows(2).all(|w| w[1].zone_co2 >= w[0].zone_co2 - 1e-9));
}

#[test]
fn decay_reaches_one_over_e_after_one_time_constant() {
    let p = SurrogateParams::default();
    let lambda = 1.0 / 3600.0;
    let c0 = 2000.0;
    let target = OUTDOOR + (c0 - OUTDOOR) / std::f64::consts::E;
    let c = co2_step(c0, 0.0, lambda, &p, 48.0, 1.0 / lambda);
    assert!(((c - OUTDOOR) / (target - OUTDOOR) - 1.0).abs() <= 0.02, "{c} vs {target}");

    let occ = csv_with("2023-03-06", 2, 10, |minute| if minute < 1440 { 2 } else { 0 });
    let table = run(&job(&occ, "2023-03-06", "2023-03-07", 10), MAX_SUBSTEP);
    let start = table.rows.iter().position(|r| r.occupancy == 0).unwrap();
    let c_start = table.rows[start - 1].zone_co2;
    let after = table.rows[start + 5].zone_co2;
    let target = OUTDOOR + (c_start - OUTDOOR) / std::f64::consts::E;
    assert!(((after - OUTDOOR) / (target - OUTDOOR) - 1.0).abs() <= 0.02, "{after} vs {target}");
}

#[test]
fn halving_the_integration_step_changes_little() {
    let p = SurrogateParams::default();
    for (c0, n, ach) in [(400.0, 2.0, 1.0), (2000.0, 0.0, 1.0), (800.0, 5.0, 0.3), (400.0, 3.0, 6.0)] {
        let a = co2_step_with(c0, n, ach / 3600.0, &p, 48.0, 600.0, 60.0);
        let b = co2_step_with(c0, n, ach / 3600.0, &p, 48.0, 600.0, 30.0);
        assert!((a - b).abs() / b < 0.005, "{a} vs {b}");
    }

    let occ = csv_with("2023-03-06", 2, 10, |minute| {
        let hour = (minute / 60) % 24;
        if (8..17).contains(&hour) { 3 } else { 0 }
    });
    for step in [10, 5] {
        let job = job(&occ, "2023-03-06", "2023-03-07", step);
        let coarse = run(&job, MAX_SUBSTEP);
        let fine = run(&job, MAX_SUBSTEP / 2.0);
        assert_eq!(coarse.len(), fine.len());
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
        for (a, b) in coarse.rows.iter().zip(&fine.rows) {
            assert!(rel(a.zone_co2, b.zone_co2) < 0.005, "{} co2 {} vs {}", a.timestamp, a.zone_co2, b.zone_co2);
            assert!(rel(a.zone_air_temperature, b.zone_air_temperature) < 0.005);
            assert!(rel(a.zone_relative_humidity, b.zone_relative_humidity) < 0.005);
        }
    }
}

#[test]
fn open_window_accelerates_exchange() {
    let p = SurrogateParams::default();
    let closed = co2_step(1500.0, 0.0, 0.5 / 3600.0, &p, 48.0, 600.0);
    let open = co2_step(1500.0, 0.0, (0.5 + p.window_open_ach) / 3600.0, &p, 48.0, 600.0);
    assert!(open < closed && open > OUTDOOR);
}
