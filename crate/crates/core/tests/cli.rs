mod common;

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use common::*;
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_roomsim");

struct Inputs {
    dir: tempfile::TempDir,
}

impl Inputs {
    fn new() -> Inputs {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("room.idf"), REFERENCE_IDF).unwrap();
        std::fs::write(dir.path().join("weather.epw"), mild_epw()).unwrap();
        std::fs::write(dir.path().join("occupancy.csv"), occupancy_csv("2023-05-01", 7, 10)).unwrap();
        Inputs { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run_args(&self, out: &Path) -> Vec<String> {
        vec![
            "--idf".into(),
            self.path("room.idf").display().to_string(),
            "--epw".into(),
            self.path("weather.epw").display().to_string(),
            "--occupancy".into(),
            self.path("occupancy.csv").display().to_string(),
            "--begin".into(),
            "2023-05-02".into(),
            "--end".into(),
            "2023-05-02".into(),
            "--step".into(),
            "10".into(),
            "--out-dir".into(),
            out.display().to_string(),
        ]
    }
}

fn roomsim(args: &[String]) -> Output {
    Command::new(BIN).args(args).env_remove("ROOMSIM_EPLUS_EXE").output().unwrap()
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn help_and_usage_errors() {
    let out = roomsim(&strings(&["--help"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
    assert_eq!(roomsim(&[]).status.code(), Some(2));
    assert_eq!(roomsim(&strings(&["simulate", "--width", "abc"])).status.code(), Some(2));
    assert_eq!(roomsim(&strings(&["frobnicate"])).status.code(), Some(2));
}

#[test]
fn simulate_writes_both_result_files() {
    let inputs = Inputs::new();
    let out = inputs.path("out");
    let mut args = vec!["simulate".to_string()];
    args.extend(inputs.run_args(&out));
    args.extend(strings(&["--width", "4", "--depth", "5", "--height", "3", "--ach", "0.5"]));
    let result = roomsim(&args);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let csv = std::fs::read_to_string(out.join("result.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 144);
    assert!(std::fs::read_to_string(out.join("result.eso")).unwrap().contains("End of Data"));
}

#[test]
fn runtime_failures_exit_with_one() {
    let inputs = Inputs::new();
    let out = inputs.path("out");
    let mut args = vec!["simulate".to_string()];
    args.extend(inputs.run_args(&out));
    args.extend(strings(&["--width", "0", "--depth", "5", "--height", "3"]));
    let result = roomsim(&args);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("error"));

    let mut args = vec!["simulate".to_string()];
    args.extend(inputs.run_args(&out));
    args[2] = inputs.path("missing.idf").display().to_string();
    args.extend(strings(&["--width", "4", "--depth", "5", "--height", "3"]));
    assert_eq!(roomsim(&args).status.code(), Some(1));

    let mut args = vec!["simulate".to_string()];
    args.extend(inputs.run_args(&out));
    args.extend(strings(&["--width", "4", "--depth", "5", "--height", "3", "--engine", "energyplus"]));
    assert_eq!(roomsim(&args).status.code(), Some(1));
}

#[test]
fn series_writes_one_directory_per_combination() {
    let inputs = Inputs::new();
    let out = inputs.path("sweep");
    let mut args = vec!["series".to_string()];
    args.extend(inputs.run_args(&out));
    args.extend(strings(&[
        "--height", "3", "--depth", "5", "--ach", "0.5", "--widths", "3", "6", "--orientations", "0", "--orientations", "-90", "--widths", "3",
    ]));
    let result = roomsim(&args);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let mut dirs: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    dirs.sort();
    assert_eq!(dirs.len(), 4, "{dirs:?}");
    for d in &dirs {
        assert!(out.join(d).join("result.csv").is_file());
        assert!(out.join(d).join("result.eso").is_file());
    }
}

struct ServeProcess {
    child: Child,
    addr: String,
    _data: tempfile::TempDir,
}

impl ServeProcess {
    fn start() -> ServeProcess {
        let data = tempfile::tempdir().unwrap();
        let mut child = Command::new(BIN)
            .args(["serve", "--listen", "127.0.0.1:0", "--data-root"])
            .arg(data.path())
            .env_remove("ROOMSIM_EPLUS_EXE")
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        let addr = line.trim().strip_prefix("listening on ").expect(&line).to_string();
        ServeProcess { child, addr, _data: data }
    }

    fn interrupt(mut self) -> Option<i32> {
        unsafe {
            libc::kill(self.child.id() as libc::pid_t, libc::SIGINT);
        }
        let deadline = Instant::now() + Duration::from_secs(10);
        loop {
            if let Some(status) = self.child.try_wait().unwrap() {
                return status.code();
            }
            if Instant::now() > deadline {
                let _ = self.child.kill();
                return None;
            }
            std::thread::sleep(Duration::from_millis(20));
        }
    }
}

fn block_on<F: std::future::Future>(f: F) -> F::Output {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap().block_on(f)
}

async fn rest_run(base: &str, inputs: &Inputs) -> (Vec<u8>, Vec<u8>) {
    let client = reqwest::Client::new();
    let record: Value = client.post(format!("{base}/simulations")).send().await.unwrap().json().await.unwrap();
    let id = record["id"].as_str().unwrap();
    for (kind, file) in [("idf", "room.idf"), ("weather", "weather.epw"), ("occupancy", "occupancy.csv")] {
        let resp = client
            .put(format!("{base}/simulations/{id}/input/{kind}"))
            .body(std::fs::read(inputs.path(file)).unwrap())
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status().as_u16(), 204);
    }
    let mut params = parameters_json("2023-05-02", "2023-05-02");
    params["room"] = json!({ "width": 4.0, "depth": 5.0, "height": 3.0, "orientation": 0.0, "infiltration_ach": 0.5 });
    let resp = client.post(format!("{base}/simulations/{id}/parameters")).json(&params).send().await.unwrap();
    assert_eq!(resp.status().as_u16(), 200);
    client.post(format!("{base}/simulations/{id}/run")).send().await.unwrap();
    loop {
        let status: Value = client.get(format!("{base}/simulations/{id}/status")).send().await.unwrap().json().await.unwrap();
        if status["status"] == "done" {
            break;
        }
        assert_ne!(status["status"], "failed", "{status}");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    let mut out = Vec::new();
    for kind in ["csv", "eso"] {
        let resp = client.get(format!("{base}/simulations/{id}/results/{kind}")).send().await.unwrap();
        out.push(resp.bytes().await.unwrap().to_vec());
    }
    (out.remove(0), out.remove(0))
}

#[test]
fn serve_answers_and_matches_cli_output() {
    let server = ServeProcess::start();
    let base = server.addr.clone();
    let inputs = Inputs::new();

    let list: Value = block_on(async {
        reqwest::get(format!("{base}/simulations")).await.unwrap().json().await.unwrap()
    });
    assert_eq!(list, json!([]));

    let (csv, eso) = block_on(rest_run(&base, &inputs));
    let out = inputs.path("cli");
    let mut args = vec!["simulate".to_string()];
    args.extend(inputs.run_args(&out));
    args.extend(strings(&["--width", "4", "--depth", "5", "--height", "3", "--ach", "0.5"]));
    assert_eq!(roomsim(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(out.join("result.csv")).unwrap(), csv);
    assert_eq!(std::fs::read(out.join("result.eso")).unwrap(), eso);

    assert_eq!(server.interrupt(), Some(0));
}

#[test]
fn serve_on_an_occupied_port_exits_with_one() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let data = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["serve", "--listen", &addr, "--data-root"])
        .arg(data.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot listen"));
}
