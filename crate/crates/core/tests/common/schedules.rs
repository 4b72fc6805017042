use chrono::{Datelike, Duration, NaiveDate};
use proptest::prelude::*;
use roomsim::schedule::{OccupancyTimeSeries, Quantity, RunPeriod, Sample};

#[derive(Debug, Clone)]
pub struct Case {
    pub series: OccupancyTimeSeries,
    pub run_period: RunPeriod,
}

pub fn case() -> impl Strategy<Value = Case> {
    (
        prop::sample::select(vec![10u32, 15, 30, 60]),
        2019i32..2026,
        0u32..340,
        1i64..=21,
        0i64..2,
    )
        .prop_flat_map(|(step, year, offset, days, lead)| {
            let begin = NaiveDate::from_ymd_opt(year, 1, 1).unwrap() + Duration::days(offset as i64 + 2);
            let end = begin + Duration::days(days - 1);
            let end = if end.year() != year { NaiveDate::from_ymd_opt(year, 12, 31).unwrap() } else { end };
            let first = begin - Duration::days(lead);
            let total_days = (end - first).num_days() + 1 + lead;
            let n = (total_days * 1440 / step as i64) as usize;
            let values = prop::collection::vec((0u32..=5, any::<bool>(), 0u32..4), n);
            (Just(step), Just(first), Just(begin), Just(end), values)
        })
        .prop_map(|(step, first, begin, end, raw)| {
            let samples = raw
                .into_iter()
                .map(|(occupants, window_open, sparse)| Sample {
                    occupants: if sparse == 0 { occupants } else { 0 },
                    window_open: window_open && sparse == 0,
                })
                .collect();
            Case {
                series: OccupancyTimeSeries::new(first.and_hms_opt(0, 0, 0).unwrap(), step, samples).unwrap(),
                run_period: RunPeriod::new(begin, end).unwrap(),
            }
        })
}

pub fn expected(sample: Sample, quantity: Quantity, n_max: u32) -> f64 {
    match quantity {
        Quantity::Occupancy if n_max == 0 => 0.0,
        Quantity::Occupancy => sample.occupants as f64 / n_max as f64,
        Quantity::Window => f64::from(u8::from(sample.window_open)),
    }
}
