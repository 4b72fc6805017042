//! Turns raw inputs plus parameters into a runnable job. Configure, run,
//! geometry and the CLI all go through [`build_job`].

use crate::engine::SimulationJob;
use crate::eso::VariableMap;
use crate::idf::IdfDocument;
use crate::room::{
    apply_room_geometry, extract_window_template, set_infiltration, set_orientation, PackingRules,
};
use crate::schedule::{
    attach_schedules, compile_schedules, parse_occupancy_csv, set_timestep, AttachOptions,
    OccupancyTimeSeries, Quantity,
};
use crate::weather::{parse_epw, slice_resample};

use super::record::{InputKind, Parameters};

/// Raw upload bodies, as stored.
#[derive(Debug, Clone, Copy)]
pub struct RawInputs<'a> {
    pub idf: &'a [u8],
    pub weather: &'a [u8],
    pub occupancy: &'a [u8],
}

fn utf8(kind: InputKind, bytes: &[u8]) -> Result<&str, String> {
    std::str::from_utf8(bytes).map_err(|e| format!("{} input is not UTF-8: {e}", kind.as_str()))
}

/// Parses an uploaded file, returning the parser's message on failure.
pub fn check_input(kind: InputKind, bytes: &[u8]) -> Result<(), String> {
    let text = utf8(kind, bytes)?;
    match kind {
        InputKind::Idf => IdfDocument::parse(text).map(drop).map_err(|e| e.to_string()),
        InputKind::Weather => parse_epw(text).map(drop).map_err(|e| e.to_string()),
        InputKind::Occupancy => parse_occupancy_csv(text).map(drop).map_err(|e| e.to_string()),
    }
}

/// Resolves the simulation step against the occupancy step.
pub fn resolve_step(params: &Parameters, occupancy: &OccupancyTimeSeries) -> Result<u32, String> {
    let step = params.step.unwrap_or(occupancy.step_minutes);
    if step == 0 || 60 % step != 0 {
        return Err(format!("step {step} min must divide 60"));
    }
    if occupancy.step_minutes % step != 0 {
        return Err(format!(
            "step {step} min must divide the occupancy step of {} min",
            occupancy.step_minutes
        ));
    }
    Ok(step)
}

/// Applies geometry, orientation, infiltration, schedules and timestep.
pub fn prepare_model(
    model: &IdfDocument,
    occupancy: &OccupancyTimeSeries,
    params: &Parameters,
    step_minutes: u32,
) -> Result<IdfDocument, String> {
    let room = params.room.validate().map_err(|e| e.to_string())?;
    let run_period = params.run_period.validate().map_err(|e| e.to_string())?;
    let template = extract_window_template(model).map_err(|e| e.to_string())?;
    let rules = PackingRules {
        margin: params.window_margin,
        gap: params.window_gap,
    };
    if !(rules.margin.is_finite() && rules.margin >= 0.0 && rules.gap.is_finite() && rules.gap >= 0.0) {
        return Err("window_margin and window_gap must be >= 0".into());
    }
    let doc = apply_room_geometry(model, &room, template, rules).map_err(|e| e.to_string())?;
    let doc = set_orientation(&doc, room.orientation).map_err(|e| e.to_string())?;
    let doc = set_infiltration(&doc, room.infiltration_ach).map_err(|e| e.to_string())?;
    let occ = compile_schedules(occupancy, run_period, Quantity::Occupancy).map_err(|e| e.to_string())?;
    let win = compile_schedules(occupancy, run_period, Quantity::Window).map_err(|e| e.to_string())?;
    let options = AttachOptions {
        window_open_ach: params.surrogate.window_open_ach,
        heat_gain_per_person: params.surrogate.heat_gain_per_person,
        co2_gen_per_person: params.surrogate.co2_gen_per_person,
    };
    let doc = attach_schedules(&doc, &occ, &win, run_period, options).map_err(|e| e.to_string())?;
    Ok(set_timestep(&doc, step_minutes))
}

/// Parses and validates everything a run needs.
pub fn build_job(inputs: RawInputs<'_>, params: &Parameters) -> Result<SimulationJob, String> {
    params.surrogate.validate()?;
    let model = IdfDocument::parse(utf8(InputKind::Idf, inputs.idf)?).map_err(|e| e.to_string())?;
    let epw_text = utf8(InputKind::Weather, inputs.weather)?.to_string();
    let weather = parse_epw(&epw_text).map_err(|e| e.to_string())?;
    let occupancy = parse_occupancy_csv(utf8(InputKind::Occupancy, inputs.occupancy)?).map_err(|e| e.to_string())?;
    let run_period = params.run_period.validate().map_err(|e| e.to_string())?;
    if !occupancy.covers_dates(run_period.begin, run_period.end) {
        return Err(format!(
            "occupancy series ({} to {}) does not cover the run period {} to {}",
            occupancy.start,
            occupancy.end(),
            run_period.begin,
            run_period.end
        ));
    }
    let step_minutes = resolve_step(params, &occupancy)?;
    slice_resample(&weather, &run_period, step_minutes).map_err(|e| e.to_string())?;
    let model = prepare_model(&model, &occupancy, params, step_minutes)?;
    let job = SimulationJob {
        model,
        weather,
        epw_text,
        run_period,
        step_minutes,
        occupancy,
        surrogate: params.surrogate,
        variables: VariableMap::default(),
    };
    job.validate().map_err(|e| e.to_string())?;
    Ok(job)
}
