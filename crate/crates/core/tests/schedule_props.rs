mod common;

use chrono::{Datelike, Duration};
use common::oracles::sakamoto;
use common::schedules::{case, expected};
use proptest::prelude::*;
use roomsim::idf::IdfDocument;
use roomsim::schedule::{compile_schedules, evaluate_schedules, parse_occupancy_csv, Quantity};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluation_inverts_compilation(c in case()) {
        let n_max = c.series.samples.iter().map(|s| s.occupants).max().unwrap_or(0);
        for quantity in [Quantity::Occupancy, Quantity::Window] {
            let compiled = compile_schedules(&c.series, c.run_period, quantity).unwrap();
            let step = Duration::minutes(c.series.step_minutes as i64);
            for (k, sample) in c.series.samples.iter().enumerate() {
                let t = c.series.start + step * k as i32;
                if !c.run_period.contains_date(t.date()) {
                    continue;
                }
                let value = evaluate_schedules(&compiled, t + step).unwrap();
                prop_assert_eq!(value, expected(*sample, quantity, n_max), "{:?} at {}", quantity, t);
            }
        }
    }

    #[test]
    fn calendar_matches_independent_weekday(c in case()) {
        let compiled = compile_schedules(&c.series, c.run_period, Quantity::Occupancy).unwrap();
        let mut date = c.run_period.begin;
        while date <= c.run_period.end {
            let dow = sakamoto(date.year(), date.month(), date.day());
            let span = compiled.year_schedule.iter().find(|s| s.from <= date && date <= s.to);
            prop_assert!(span.is_some(), "{} not covered", date);
            let week = compiled.week_schedules.iter().find(|w| w.name == span.unwrap().week).unwrap();
            prop_assert_eq!(week.sunday, date - Duration::days(dow as i64));
            prop_assert_eq!(&week.day_types[dow], &Quantity::Occupancy.day_name(date));
            date = date.succ_opt().unwrap();
        }
        for week in &compiled.week_schedules {
            prop_assert_eq!(sakamoto(week.sunday.year(), week.sunday.month(), week.sunday.day()), 0);
            for (i, name) in week.day_types.iter().enumerate().take(7) {
                let day = week.sunday + Duration::days(i as i64);
                if !c.run_period.contains_date(day) {
                    prop_assert_eq!(name, &Quantity::Occupancy.zero_day_name());
                }
            }
        }
    }

    #[test]
    fn emitted_objects_parse_and_reference_each_other(c in case()) {
        let compiled = compile_schedules(&c.series, c.run_period, Quantity::Window).unwrap();
        let doc = IdfDocument { objects: compiled.to_idf_objects(), leading_comments: Vec::new() };
        let parsed = IdfDocument::parse(&doc.serialize()).unwrap();
        let days: Vec<&str> = parsed.objects_of("Schedule:Day:Interval").filter_map(|o| o.name()).collect();
        for week in parsed.objects_of("Schedule:Week:Daily") {
            for name in &week.fields[1..] {
                prop_assert!(days.contains(&name.as_str()), "{} missing", name);
            }
        }
        for day in parsed.objects_of("Schedule:Day:Interval") {
            let untils: Vec<u32> = day.fields[3..]
                .iter()
                .step_by(2)
                .map(|u| {
                    let hm = u.trim_start_matches("Until:").trim();
                    let (h, m) = hm.split_once(':').unwrap();
                    h.parse::<u32>().unwrap() * 60 + m.parse::<u32>().unwrap()
                })
                .collect();
            prop_assert_eq!(*untils.last().unwrap(), 1440);
            prop_assert!(untils.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn csv_round_trip(c in case()) {
        prop_assert_eq!(parse_occupancy_csv(&c.series.to_csv()).unwrap(), c.series);
    }
}

#[test]
fn sakamoto_agrees_with_known_dates() {
    assert_eq!(sakamoto(2023, 5, 1), 1);
    assert_eq!(sakamoto(2000, 1, 1), 6);
    assert_eq!(sakamoto(2024, 2, 29), 4);
}
