mod common;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use roomsim::engine::energyplus::{default_args, run_energyplus, OUTDOOR_CO2_SCHEDULE};
use roomsim::engine::surrogate::run_surrogate;
use roomsim::engine::{EngineError, EngineKind, EnergyPlusConfig, RunControl, SimulationJob, SurrogateParams};
use roomsim::idf::IdfDocument;
use roomsim::orchestrator::{build_job, InputKind, MemoryStore, Orchestrator, OrchestratorConfig, RawInputs, Status};

fn job() -> SimulationJob {
    build_job(
        RawInputs {
            idf: REFERENCE_IDF.as_bytes(),
            weather: mild_epw().as_bytes(),
            occupancy: occupancy_csv("2023-05-01", 7, 10).as_bytes(),
        },
        &one_day_parameters(),
    )
    .unwrap()
}

/// A stand-in executable: `sh <script> -w <epw> -d <workdir> <idf>`.
fn fake(dir: &Path, name: &str, body: &str) -> EnergyPlusConfig {
    let script = dir.join(name);
    std::fs::write(&script, format!("set -e\nworkdir=\"$4\"\n{body}\n")).unwrap();
    let mut args = vec![script.display().to_string()];
    args.extend(default_args());
    EnergyPlusConfig {
        executable: PathBuf::from("sh"),
        args,
    }
}

fn successful(dir: &Path, job: &SimulationJob) -> EnergyPlusConfig {
    let eso = dir.join("canned.eso");
    std::fs::write(&eso, run_surrogate(job, &SurrogateParams::default()).unwrap().eso_text).unwrap();
    fake(
        dir,
        "ok.sh",
        &format!(
            "test -f \"$workdir/in.idf\"\ntest -f \"$2\"\ncp '{}' \"$workdir/eplusout.eso\"\necho '   ************* EnergyPlus Completed Successfully.' > \"$workdir/eplusout.err\"",
            eso.display()
        ),
    )
}

#[test]
fn successful_run_reads_all_five_variables() {
    let dir = tempfile::tempdir().unwrap();
    let job = job();
    let config = successful(dir.path(), &job);
    let workdir = dir.path().join("run");
    let result = run_energyplus(&job, &config, &workdir, &RunControl::new()).unwrap();
    assert_eq!(result.result_table.len(), 144);
    let expected = run_surrogate(&job, &SurrogateParams::default()).unwrap().result_table;
    assert_eq!(result.result_table, expected);

    let model = IdfDocument::parse(&std::fs::read_to_string(workdir.join("in.idf")).unwrap()).unwrap();
    let requested: Vec<String> = model
        .objects_of("Output:Variable")
        .map(|o| o.field(1).unwrap().to_ascii_lowercase())
        .collect();
    for v in [
        "zone mean air temperature",
        "zone air co2 concentration",
        "zone air relative humidity",
        "site outdoor air drybulb temperature",
        "site outdoor air barometric pressure",
    ] {
        assert!(requested.iter().any(|r| r == v), "{v} not requested: {requested:?}");
    }
    let balance = model.first_of("ZoneAirContaminantBalance").unwrap();
    assert!(balance.field(0).unwrap().eq_ignore_ascii_case("Yes"));
    assert_eq!(balance.field(1), Some(OUTDOOR_CO2_SCHEDULE));
    assert!(workdir.join("in.epw").is_file());
}

#[test]
fn severe_errors_fail_the_run_with_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let config = fake(
        dir.path(),
        "severe.sh",
        "printf '   ** Severe  ** Bad surface\\n' > \"$workdir/eplusout.err\"\ntouch \"$workdir/eplusout.eso\"",
    );
    let err = run_energyplus(&job(), &config, &dir.path().join("run"), &RunControl::new()).unwrap_err();
    match err {
        EngineError::ProcessFailed { log } => assert!(log.contains("Bad surface"), "{log}"),
        other => panic!("{other}"),
    }

    let config = fake(dir.path(), "exit.sh", "echo boom >&2\nexit 3");
    let err = run_energyplus(&job(), &config, &dir.path().join("run2"), &RunControl::new()).unwrap_err();
    assert!(matches!(err, EngineError::ProcessFailed { ref log } if log.contains("boom")), "{err}");
}

#[test]
fn missing_eso_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = fake(dir.path(), "noeso.sh", "true");
    let err = run_energyplus(&job(), &config, &dir.path().join("run"), &RunControl::new()).unwrap_err();
    assert_eq!(err, EngineError::EsoMissing);
}

#[test]
fn missing_executable_is_reported_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let config = EnergyPlusConfig::new(dir.path().join("no-such-energyplus"));
    let workdir = dir.path().join("run");
    let err = run_energyplus(&job(), &config, &workdir, &RunControl::new()).unwrap_err();
    assert!(matches!(err, EngineError::ExecutableNotFound(_)));
    assert!(!workdir.exists());
}

#[test]
fn cancellation_kills_the_process() {
    let dir = tempfile::tempdir().unwrap();
    let config = fake(dir.path(), "slow.sh", "exec sleep 30");
    let control = Arc::new(RunControl::new());
    let canceller = {
        let control = control.clone();
        std::thread::spawn(move || {
            std::thread::sleep(Duration::from_millis(200));
            control.cancel();
        })
    };
    let began = Instant::now();
    let err = run_energyplus(&job(), &config, &dir.path().join("run"), &control).unwrap_err();
    canceller.join().unwrap();
    assert_eq!(err, EngineError::Cancelled);
    assert!(began.elapsed() < Duration::from_secs(10));
}

#[test]
fn orchestrator_runs_the_configured_executable() {
    let dir = tempfile::tempdir().unwrap();
    let energyplus = successful(dir.path(), &job());
    let config = OrchestratorConfig {
        workers: 1,
        energyplus: Some(energyplus),
        work_root: Some(dir.path().join("work")),
    };
    let o = Orchestrator::new(Arc::new(MemoryStore::new()), config).unwrap();
    assert!(o.engines().contains(&EngineKind::EnergyPlus));
    let id = o.create_simulation().unwrap().id;
    o.upload_input(&id, InputKind::Idf, REFERENCE_IDF.as_bytes()).unwrap();
    o.upload_input(&id, InputKind::Weather, mild_epw().as_bytes()).unwrap();
    o.upload_input(&id, InputKind::Occupancy, occupancy_csv("2023-05-01", 7, 10).as_bytes()).unwrap();
    let mut params = one_day_parameters();
    params.engine = EngineKind::EnergyPlus;
    o.configure(&id, &params).unwrap();
    o.start(&id).unwrap();
    let record = o.wait(&id, Duration::from_secs(30)).unwrap();
    assert_eq!(record.status, Status::Done, "{:?}", record.error);
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("work")).unwrap().collect();
    assert_eq!(runs.len(), 1);
}
