//! C ABI for the roomsim library.
//!
//! Every function returns a [`RoomsimStatus`]. On failure the message is
//! available from [`roomsim_last_error`] on the same thread. Strings handed
//! out by the library are released with [`roomsim_string_free`]; handles are
//! released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;
use std::time::Duration;

use roomsim::engine::EnergyPlusConfig;
use roomsim::idf::IdfDocument;
use roomsim::orchestrator::{
    InputKind, MemoryStore, Orchestrator, OrchestratorConfig, OrchestratorError, Parameters, ResultKind, Status,
};
use roomsim::room::{pack_windows, WindowTemplate};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomsimStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    NotFound = 4,
    Conflict = 5,
    Validation = 6,
    Io = 7,
    Timeout = 8,
    SimulationFailed = 9,
    Internal = 10,
}

/// Parsed IDF document.
pub struct RoomsimIdf(IdfDocument);

/// Simulation orchestrator with its worker pool.
pub struct RoomsimOrchestrator(Orchestrator);

struct Failure {
    status: RoomsimStatus,
    message: String,
}

impl Failure {
    fn new(status: RoomsimStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<OrchestratorError> for Failure {
    fn from(e: OrchestratorError) -> Self {
        let status = match &e {
            OrchestratorError::NotFound(_) | OrchestratorError::SeriesNotFound(_) => RoomsimStatus::NotFound,
            OrchestratorError::CurrentlyRunning(_)
            | OrchestratorError::AlreadyRunning(_)
            | OrchestratorError::NotFinished(_)
            | OrchestratorError::Finished(_)
            | OrchestratorError::SourceNotFinished(_) => RoomsimStatus::Conflict,
            OrchestratorError::InvalidInput { .. } => RoomsimStatus::ParseError,
            OrchestratorError::NotConfigured(_)
            | OrchestratorError::ValidationFailed(_)
            | OrchestratorError::EmptyAxis(_) => RoomsimStatus::Validation,
            OrchestratorError::Store(_) => RoomsimStatus::Io,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RoomsimStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(Failure::new(RoomsimStatus::Internal, format!("internal error: {message}")))
    });
    match outcome {
        Ok(()) => RoomsimStatus::Ok,
        Err(failure) => {
            set_last_error(&failure.message);
            failure.status
        }
    }
}

unsafe fn c_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::new(RoomsimStatus::NullArgument, format!("`{name}` is NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure::new(RoomsimStatus::InvalidUtf8, format!("`{name}` is not UTF-8: {e}")))
}

unsafe fn optional_c_str<'a>(ptr: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if ptr.is_null() {
        Ok(None)
    } else {
        c_str(ptr, name).map(Some)
    }
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    ptr.as_ref()
        .ok_or_else(|| Failure::new(RoomsimStatus::NullArgument, format!("`{name}` is NULL")))
}

unsafe fn out_slot<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut()
        .ok_or_else(|| Failure::new(RoomsimStatus::NullArgument, format!("`{name}` is NULL")))
}

fn to_c_string(value: impl Into<Vec<u8>>) -> Result<*mut c_char, Failure> {
    CString::new(value)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(RoomsimStatus::Internal, "output contains a NUL byte"))
}

fn parse_params(json: &str) -> Result<Parameters, Failure> {
    serde_json::from_str(json).map_err(|e| Failure::new(RoomsimStatus::ParseError, format!("invalid parameters: {e}")))
}

fn input_kind(name: &str) -> Result<InputKind, Failure> {
    name.parse().map_err(|e: String| Failure::new(RoomsimStatus::NotFound, e))
}

fn result_kind(name: &str) -> Result<ResultKind, Failure> {
    name.parse().map_err(|e: String| Failure::new(RoomsimStatus::NotFound, e))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn roomsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn roomsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn roomsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses IDF text into a new document handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_idf_parse(text: *const c_char, out: *mut *mut RoomsimIdf) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        *out = ptr::null_mut();
        let source = c_str(text, "text")?;
        let doc = IdfDocument::parse(source).map_err(|e| Failure::new(RoomsimStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(RoomsimIdf(doc)));
        Ok(())
    })
}

/// Serializes a document; free the result with `roomsim_string_free`.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_idf_serialize(doc: *const RoomsimIdf, out: *mut *mut c_char) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        *out = ptr::null_mut();
        *out = to_c_string(handle(doc, "doc")?.0.serialize())?;
        Ok(())
    })
}

/// Number of objects in a document.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_idf_object_count(doc: *const RoomsimIdf, out: *mut usize) -> RoomsimStatus {
    guard(|| {
        *out_slot(out, "out")? = handle(doc, "doc")?.0.len();
        Ok(())
    })
}

/// Releases a document handle. NULL is ignored.
///
/// # Safety
/// `doc` must be NULL or a handle from `roomsim_idf_parse` that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn roomsim_idf_free(doc: *mut RoomsimIdf) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Packs equal windows onto a wall. Writes the window count to
/// `out_count` and up to `capacity` left-edge offsets to `offsets`, which
/// may be NULL when `capacity` is 0.
///
/// # Safety
/// `out_count` must be writable; `offsets` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn roomsim_pack_windows(
    wall_width: f64,
    window_width: f64,
    margin: f64,
    gap: f64,
    out_count: *mut usize,
    offsets: *mut f64,
    capacity: usize,
) -> RoomsimStatus {
    guard(|| {
        let count = out_slot(out_count, "out_count")?;
        if [wall_width, window_width, margin, gap].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Failure::new(RoomsimStatus::Validation, "dimensions must be finite and >= 0"));
        }
        if offsets.is_null() && capacity > 0 {
            return Err(Failure::new(RoomsimStatus::NullArgument, "`offsets` is NULL"));
        }
        let template = WindowTemplate {
            width: window_width,
            height: 0.0,
            sill_height: 0.0,
        };
        let layout = pack_windows(wall_width, template, margin, gap);
        *count = layout.window_count;
        for (i, x) in layout.x_offsets.iter().take(capacity).enumerate() {
            *offsets.add(i) = *x;
        }
        Ok(())
    })
}

fn simulate_in_memory(idf: &str, epw: &str, occupancy: &str, params: &Parameters) -> Result<(String, String), Failure> {
    let o = Orchestrator::new(Arc::new(MemoryStore::new()), OrchestratorConfig::default())?;
    let id = o.create_simulation()?.id;
    o.upload_input(&id, InputKind::Idf, idf.as_bytes())?;
    o.upload_input(&id, InputKind::Weather, epw.as_bytes())?;
    o.upload_input(&id, InputKind::Occupancy, occupancy.as_bytes())?;
    o.configure(&id, params)?;
    o.start(&id)?;
    let record = o.wait(&id, Duration::MAX)?;
    if record.status != Status::Done {
        return Err(Failure::new(
            RoomsimStatus::SimulationFailed,
            record.error.unwrap_or_else(|| format!("simulation ended as {}", record.status)),
        ));
    }
    let csv = o.result_artifact(&id, ResultKind::Csv)?;
    let eso = o.result_artifact(&id, ResultKind::Eso)?;
    let utf8 = |b: Vec<u8>| String::from_utf8(b).map_err(|e| Failure::new(RoomsimStatus::Internal, e.to_string()));
    Ok((utf8(csv)?, utf8(eso)?))
}

/// Runs one surrogate simulation synchronously. `params_json` uses the
/// REST parameter schema. Either output pointer may be NULL.
///
/// # Safety
/// All input strings must be NUL-terminated; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_simulate(
    idf: *const c_char,
    epw: *const c_char,
    occupancy: *const c_char,
    params_json: *const c_char,
    out_csv: *mut *mut c_char,
    out_eso: *mut *mut c_char,
) -> RoomsimStatus {
    guard(|| {
        for slot in [out_csv, out_eso] {
            if let Some(slot) = slot.as_mut() {
                *slot = ptr::null_mut();
            }
        }
        let params = parse_params(c_str(params_json, "params_json")?)?;
        let (csv, eso) = simulate_in_memory(
            c_str(idf, "idf")?,
            c_str(epw, "epw")?,
            c_str(occupancy, "occupancy")?,
            &params,
        )?;
        let csv = to_c_string(csv)?;
        let eso = match to_c_string(eso) {
            Ok(eso) => eso,
            Err(e) => {
                roomsim_string_free(csv);
                return Err(e);
            }
        };
        match out_csv.as_mut() {
            Some(slot) => *slot = csv,
            None => roomsim_string_free(csv),
        }
        match out_eso.as_mut() {
            Some(slot) => *slot = eso,
            None => roomsim_string_free(eso),
        }
        Ok(())
    })
}

/// Opens a file-backed orchestrator. `energyplus_exe` may be NULL to use
/// only the surrogate engine; `workers` of 0 selects the default.
///
/// # Safety
/// `data_root` must be NUL-terminated; `energyplus_exe` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_open(
    data_root: *const c_char,
    energyplus_exe: *const c_char,
    workers: usize,
    out: *mut *mut RoomsimOrchestrator,
) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        *out = ptr::null_mut();
        let root = PathBuf::from(c_str(data_root, "data_root")?);
        let config = OrchestratorConfig {
            workers,
            energyplus: optional_c_str(energyplus_exe, "energyplus_exe")?.map(EnergyPlusConfig::new),
            work_root: Some(root.join("_work")),
        };
        let orchestrator = Orchestrator::open(root, config)?;
        *out = Box::into_raw(Box::new(RoomsimOrchestrator(orchestrator)));
        Ok(())
    })
}

/// Creates a record and writes its id (free with `roomsim_string_free`).
///
/// # Safety
/// `handle_ptr` must be a live handle; `out_id` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_create(
    handle_ptr: *const RoomsimOrchestrator,
    out_id: *mut *mut c_char,
) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out_id, "out_id")?;
        *out = ptr::null_mut();
        let record = handle(handle_ptr, "orchestrator")?.0.create_simulation()?;
        *out = to_c_string(record.id)?;
        Ok(())
    })
}

/// Uploads an input of kind `idf`, `weather` or `occupancy`.
///
/// # Safety
/// `handle_ptr` must be live; strings NUL-terminated; `data` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_upload(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
    kind: *const c_char,
    data: *const u8,
    len: usize,
) -> RoomsimStatus {
    guard(|| {
        let o = &handle(handle_ptr, "orchestrator")?.0;
        let kind = input_kind(c_str(kind, "kind")?)?;
        if data.is_null() && len > 0 {
            return Err(Failure::new(RoomsimStatus::NullArgument, "`data` is NULL"));
        }
        let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(data, len) };
        o.upload_input(c_str(id, "id")?, kind, bytes)?;
        Ok(())
    })
}

/// Validates and stores parameters given as JSON.
///
/// # Safety
/// `handle_ptr` must be live; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_configure(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
    params_json: *const c_char,
) -> RoomsimStatus {
    guard(|| {
        let o = &handle(handle_ptr, "orchestrator")?.0;
        let params = parse_params(c_str(params_json, "params_json")?)?;
        o.configure(c_str(id, "id")?, &params)?;
        Ok(())
    })
}

/// Queues a configured record for execution.
///
/// # Safety
/// `handle_ptr` must be live; `id` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_start(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
) -> RoomsimStatus {
    guard(|| {
        handle(handle_ptr, "orchestrator")?.0.start(c_str(id, "id")?)?;
        Ok(())
    })
}

/// Waits up to `timeout_ms` for a run to finish. Returns `Timeout` when it
/// is still running, `SimulationFailed` when it failed.
///
/// # Safety
/// `handle_ptr` must be live; `id` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_wait(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
    timeout_ms: u64,
) -> RoomsimStatus {
    guard(|| {
        let record = handle(handle_ptr, "orchestrator")?
            .0
            .wait(c_str(id, "id")?, Duration::from_millis(timeout_ms))?;
        match record.status {
            Status::Running => Err(Failure::new(RoomsimStatus::Timeout, "simulation is still running")),
            Status::Failed => Err(Failure::new(
                RoomsimStatus::SimulationFailed,
                record.error.unwrap_or_else(|| "simulation failed".into()),
            )),
            _ => Ok(()),
        }
    })
}

/// Writes the status view as JSON (free with `roomsim_string_free`).
///
/// # Safety
/// `handle_ptr` must be live; `id` NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_status(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
    out_json: *mut *mut c_char,
) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out_json, "out_json")?;
        *out = ptr::null_mut();
        let view = handle(handle_ptr, "orchestrator")?.0.status(c_str(id, "id")?)?;
        let json = serde_json::to_string(&view).map_err(|e| Failure::new(RoomsimStatus::Internal, e.to_string()))?;
        *out = to_c_string(json)?;
        Ok(())
    })
}

/// Writes a result artifact of kind `csv` or `eso` (free with `roomsim_string_free`).
///
/// # Safety
/// `handle_ptr` must be live; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_result(
    handle_ptr: *const RoomsimOrchestrator,
    id: *const c_char,
    kind: *const c_char,
    out: *mut *mut c_char,
) -> RoomsimStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        *out = ptr::null_mut();
        let kind = result_kind(c_str(kind, "kind")?)?;
        let bytes = handle(handle_ptr, "orchestrator")?.0.result_artifact(c_str(id, "id")?, kind)?;
        *out = to_c_string(bytes)?;
        Ok(())
    })
}

/// Releases an orchestrator, waiting for queued runs to finish. NULL is ignored.
///
/// # Safety
/// `handle_ptr` must be NULL or a handle from `roomsim_orchestrator_open` that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn roomsim_orchestrator_free(handle_ptr: *mut RoomsimOrchestrator) {
    if !handle_ptr.is_null() {
        drop(Box::from_raw(handle_ptr));
    }
}
