//! Runs an external EnergyPlus executable in a private working directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use super::{Engine, EngineError, EngineKind, EngineResult, RunControl, SimulationJob};
use crate::eso::{parse_eso, to_result_table, VariableMap};
use crate::idf::{IdfDocument, IdfObject};
use crate::room::zone_name;
use crate::schedule::ANY_LIMITS;
use crate::weather::slice_resample;

pub const OUTDOOR_CO2_SCHEDULE: &str = "roomsim_outdoor_co2";
const POLL_INTERVAL: Duration = Duration::from_millis(20);

/// Argument template; `{epw}`, `{workdir}` and `{idf}` are substituted.
pub fn default_args() -> Vec<String> {
    ["-w", "{epw}", "-d", "{workdir}", "{idf}"].map(String::from).to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPlusConfig {
    pub executable: PathBuf,
    pub args: Vec<String>,
}

impl EnergyPlusConfig {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        EnergyPlusConfig {
            executable: executable.into(),
            args: default_args(),
        }
    }
}

/// Resolves a bare program name through `PATH`.
pub fn resolve_executable(exe: &Path) -> Option<PathBuf> {
    if exe.components().count() > 1 || exe.is_absolute() {
        return exe.is_file().then(|| exe.to_path_buf());
    }
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|dir| dir.join(exe))
            .find(|candidate| candidate.is_file())
    })
}

/// Adds the output requests and CO₂ balance settings the result table needs,
/// leaving anything already present alone.
pub fn inject_output_requests(model: &IdfDocument, variables: &VariableMap, outdoor_co2: f64) -> IdfDocument {
    let mut out = model.clone();
    let requested: Vec<String> = out
        .objects_of("Output:Variable")
        .filter_map(|o| o.field(1).map(str::to_ascii_lowercase))
        .collect();
    for name in variables.zone_variables().into_iter().chain(variables.site_variables()) {
        if !requested.contains(&name.to_ascii_lowercase()) {
            out.push(IdfObject::new("Output:Variable", ["*", name, "Timestep"]));
        }
    }
    match out.find_objects("ZoneAirContaminantBalance").first().copied() {
        Some(handle) => {
            let balance = out.get_mut(handle).expect("handle");
            balance.set_field(0, "Yes");
            if balance.field(1).is_none_or(str::is_empty) {
                balance.set_field(1, OUTDOOR_CO2_SCHEDULE);
            }
        }
        None => {
            out.push(IdfObject::new("ZoneAirContaminantBalance", ["Yes", OUTDOOR_CO2_SCHEDULE]));
        }
    }
    let uses_ours = out
        .first_of("ZoneAirContaminantBalance")
        .and_then(|b| b.field(1))
        .is_some_and(|s| s.eq_ignore_ascii_case(OUTDOOR_CO2_SCHEDULE));
    if uses_ours {
        for object in [
            IdfObject::new("ScheduleTypeLimits", [ANY_LIMITS, "", "", "Continuous"]),
            IdfObject::new(
                "Schedule:Constant",
                [OUTDOOR_CO2_SCHEDULE.to_string(), ANY_LIMITS.to_string(), format!("{outdoor_co2}")],
            ),
        ] {
            let class = object.class_name.clone();
            out.upsert(&class, 0, object).expect("named object");
        }
    }
    out
}

fn read_lossy(path: &Path) -> String {
    fs::read(path)
        .map(|b| String::from_utf8_lossy(&b).into_owned())
        .unwrap_or_default()
}

fn has_severe_errors(err_text: &str) -> bool {
    err_text.lines().any(|l| {
        let l = l.trim_start();
        l.starts_with("** Severe") || l.starts_with("**  Fatal")
    })
}

/// Runs EnergyPlus for `job` inside `workdir`.
pub fn run_energyplus(
    job: &SimulationJob,
    config: &EnergyPlusConfig,
    workdir: &Path,
    control: &RunControl,
) -> Result<EngineResult, EngineError> {
    let exe = resolve_executable(&config.executable)
        .ok_or_else(|| EngineError::ExecutableNotFound(config.executable.display().to_string()))?;
    job.validate()?;
    let zone_key = zone_name(&job.model).map_err(|e| EngineError::InvalidJob(e.to_string()))?;

    fs::create_dir_all(workdir)?;
    let workdir = workdir.canonicalize()?;
    let idf_path = workdir.join("in.idf");
    let epw_path = workdir.join("in.epw");
    let model = inject_output_requests(&job.model, &job.variables, job.surrogate.outdoor_co2);
    fs::write(&idf_path, model.serialize())?;
    fs::write(&epw_path, &job.epw_text)?;

    let args: Vec<String> = config
        .args
        .iter()
        .map(|a| {
            a.replace("{epw}", &epw_path.display().to_string())
                .replace("{workdir}", &workdir.display().to_string())
                .replace("{idf}", &idf_path.display().to_string())
        })
        .collect();
    let stdout = fs::File::create(workdir.join("stdout.log"))?;
    let stderr = fs::File::create(workdir.join("stderr.log"))?;
    let mut child = Command::new(&exe)
        .args(&args)
        .current_dir(&workdir)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr)
        .spawn()?;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if control.is_cancelled() {
            let _ = child.kill();
            let _ = child.wait();
            return Err(EngineError::Cancelled);
        }
        std::thread::sleep(POLL_INTERVAL);
    };

    let err_text = read_lossy(&workdir.join("eplusout.err"));
    let log = format!(
        "$ {} {}\n{}{}{}",
        exe.display(),
        args.join(" "),
        read_lossy(&workdir.join("stdout.log")),
        read_lossy(&workdir.join("stderr.log")),
        err_text
    );
    if !status.success() || has_severe_errors(&err_text) {
        return Err(EngineError::ProcessFailed { log });
    }
    let eso_path = workdir.join("eplusout.eso");
    if !eso_path.is_file() {
        return Err(EngineError::EsoMissing);
    }
    let eso_text = read_lossy(&eso_path);
    let eso = parse_eso(&eso_text)?;
    let outdoor = slice_resample(&job.weather, &job.run_period, job.step_minutes)?;
    let result_table = to_result_table(
        &eso,
        &job.variables,
        Some(&zone_key),
        &job.occupancy,
        &outdoor,
        &job.run_period,
    )?;
    control.set_progress(1.0);
    Ok(EngineResult {
        eso_text,
        result_table,
        log,
    })
}

/// EnergyPlus adapter; each run gets a fresh directory below `work_root`.
#[derive(Debug, Clone)]
pub struct EnergyPlusEngine {
    pub config: EnergyPlusConfig,
    pub work_root: PathBuf,
}

impl Engine for EnergyPlusEngine {
    fn kind(&self) -> EngineKind {
        EngineKind::EnergyPlus
    }

    fn run(&self, job: &SimulationJob, control: &RunControl) -> Result<EngineResult, EngineError> {
        resolve_executable(&self.config.executable)
            .ok_or_else(|| EngineError::ExecutableNotFound(self.config.executable.display().to_string()))?;
        let workdir = self.work_root.join(format!("run-{}", uuid::Uuid::new_v4().simple()));
        run_energyplus(job, &self.config, &workdir, control)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injects_missing_requests_once() {
        let model = IdfDocument::parse(
            "Version,23.1;\nOutput:Variable,*,Zone Mean Air Temperature,Hourly;\nZone,Room;",
        )
        .unwrap();
        let out = inject_output_requests(&model, &VariableMap::default(), 400.0);
        assert_eq!(out.objects_of("Output:Variable").count(), 5);
        assert_eq!(out.first_of("ZoneAirContaminantBalance").unwrap().fields, vec!["Yes", OUTDOOR_CO2_SCHEDULE]);
        assert_eq!(
            out.objects_of("Schedule:Constant").next().unwrap().fields,
            vec![OUTDOOR_CO2_SCHEDULE, ANY_LIMITS, "400"]
        );
        let again = inject_output_requests(&out, &VariableMap::default(), 400.0);
        assert_eq!(again, out);
    }

    #[test]
    fn existing_balance_schedule_is_kept() {
        let model = IdfDocument::parse("ZoneAirContaminantBalance,No,MyCO2;").unwrap();
        let out = inject_output_requests(&model, &VariableMap::default(), 400.0);
        assert_eq!(out.first_of("ZoneAirContaminantBalance").unwrap().fields, vec!["Yes", "MyCO2"]);
        assert_eq!(out.objects_of("Schedule:Constant").count(), 0);
    }

    #[test]
    fn severe_detection() {
        assert!(has_severe_errors("   ** Severe  ** bad thing\n"));
        assert!(has_severe_errors("   **  Fatal  ** stop\n"));
        assert!(!has_severe_errors("   ** Warning ** meh\n"));
    }

    #[test]
    fn missing_executable_resolution() {
        assert!(resolve_executable(Path::new("/definitely/not/here/energyplus")).is_none());
        assert!(resolve_executable(Path::new("roomsim-no-such-program-xyz")).is_none());
        assert!(resolve_executable(Path::new("sh")).is_some());
    }
}
