use std::ffi::{c_char, CStr, CString};
use std::ptr;

use roomsim_ffi::*;

const REFERENCE_IDF: &str = include_str!("../../core/tests/data/reference_room.idf");

fn epw_2023() -> String {
    let mut out = String::from(
        "LOCATION,Testville,BY,DEU,SYN,000000,48.13,11.70,1.0,520.0\nDESIGN CONDITIONS,0\nTYPICAL/EXTREME PERIODS,0\nGROUND TEMPERATURES,0\nHOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\nCOMMENTS 1,synthetic\nCOMMENTS 2,\nDATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31\n",
    );
    let days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    for (m, n) in days.iter().enumerate() {
        for d in 1..=*n {
            for h in 1..=24 {
                out.push_str(&format!(
                    "2023,{},{d},{h},60,?9?9?9?9E0?9?9?9?9?9?9?9?9?9?9?9?9?9?9?9*9*9?9?9?9,{:.1},5.0,50,95000,0,0,300,0,0,0,0,0,0,0,180,2.0,5,5,20.0,77777,9,999999999,0,0.1,0,88,0.2,0.0,1.0\n",
                    m + 1,
                    10.0 + (h as f64) / 4.0
                ));
            }
        }
    }
    out
}

fn occupancy() -> String {
    let mut out = String::from("timestamp,occupancy,window\n");
    for day in 1..=3 {
        for k in 0..144 {
            let (h, m) = (k / 6, (k % 6) * 10);
            let occ = u32::from((8..17).contains(&h)) * 2;
            out.push_str(&format!("2023-05-{day:02}T{h:02}:{m:02},{occ},0\n"));
        }
    }
    out
}

const PARAMS: &str = r#"{"room":{"width":4.0,"depth":5.0,"height":3.0,"orientation":0.0,"infiltration_ach":0.5},"run_period":{"begin":"2023-05-02","end":"2023-05-02"},"step":10}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    roomsim_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(roomsim_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(roomsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn idf_round_trip_through_handles() {
    unsafe {
        let mut doc = ptr::null_mut();
        assert_eq!(roomsim_idf_parse(c(REFERENCE_IDF).as_ptr(), &mut doc), RoomsimStatus::Ok);
        let mut count = 0usize;
        assert_eq!(roomsim_idf_object_count(doc, &mut count), RoomsimStatus::Ok);
        assert!(count > 10);
        let mut text = ptr::null_mut();
        assert_eq!(roomsim_idf_serialize(doc, &mut text), RoomsimStatus::Ok);
        let text = take(text);
        roomsim_idf_free(doc);

        let mut again = ptr::null_mut();
        assert_eq!(roomsim_idf_parse(c(&text).as_ptr(), &mut again), RoomsimStatus::Ok);
        let mut text2 = ptr::null_mut();
        assert_eq!(roomsim_idf_serialize(again, &mut text2), RoomsimStatus::Ok);
        assert_eq!(take(text2), text);
        roomsim_idf_free(again);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut doc = ptr::null_mut();
        assert_eq!(roomsim_idf_parse(c("Zone, Office").as_ptr(), &mut doc), RoomsimStatus::ParseError);
        assert!(doc.is_null());
        assert!(last_error().contains("not terminated"), "{}", last_error());
        assert_eq!(roomsim_idf_parse(ptr::null(), &mut doc), RoomsimStatus::NullArgument);
        assert!(last_error().contains("text"));
        assert_eq!(roomsim_idf_parse(c("Version,1;").as_ptr(), ptr::null_mut()), RoomsimStatus::NullArgument);
        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(roomsim_idf_parse(invalid.as_ptr().cast(), &mut doc), RoomsimStatus::InvalidUtf8);
        roomsim_idf_free(ptr::null_mut());
        roomsim_string_free(ptr::null_mut());
    }
}

#[test]
fn window_packing() {
    unsafe {
        let mut count = 0usize;
        let mut offsets = [0.0f64; 8];
        let status = roomsim_pack_windows(6.0, 1.5, 0.5, 0.5, &mut count, offsets.as_mut_ptr(), offsets.len());
        assert_eq!(status, RoomsimStatus::Ok);
        assert_eq!(count, 2);
        assert!((offsets[0] - 1.25).abs() < 1e-12 && (offsets[1] - 3.25).abs() < 1e-12);
        assert_eq!(roomsim_pack_windows(2.0, 1.5, 0.5, 0.5, &mut count, ptr::null_mut(), 0), RoomsimStatus::Ok);
        assert_eq!(count, 0);
        assert_eq!(roomsim_pack_windows(-1.0, 1.5, 0.5, 0.5, &mut count, ptr::null_mut(), 0), RoomsimStatus::Validation);
    }
}

#[test]
fn one_shot_simulation() {
    unsafe {
        let (mut csv, mut eso) = (ptr::null_mut(), ptr::null_mut());
        let status = roomsim_simulate(
            c(REFERENCE_IDF).as_ptr(),
            c(&epw_2023()).as_ptr(),
            c(&occupancy()).as_ptr(),
            c(PARAMS).as_ptr(),
            &mut csv,
            &mut eso,
        );
        assert_eq!(status, RoomsimStatus::Ok, "{}", last_error());
        assert_eq!(take(csv).lines().count(), 145);
        assert!(take(eso).contains("End of Data"));

        let bad = PARAMS.replace("\"width\":4.0", "\"width\":-4.0");
        let status = roomsim_simulate(
            c(REFERENCE_IDF).as_ptr(),
            c(&epw_2023()).as_ptr(),
            c(&occupancy()).as_ptr(),
            c(&bad).as_ptr(),
            &mut csv,
            ptr::null_mut(),
        );
        assert_eq!(status, RoomsimStatus::Validation);
        assert!(csv.is_null());
    }
}

#[test]
fn orchestrator_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut o = ptr::null_mut();
        let root = c(dir.path().to_str().unwrap());
        assert_eq!(roomsim_orchestrator_open(root.as_ptr(), ptr::null(), 1, &mut o), RoomsimStatus::Ok);
        let mut id = ptr::null_mut();
        assert_eq!(roomsim_orchestrator_create(o, &mut id), RoomsimStatus::Ok);
        let id = c(&take(id));

        assert_eq!(roomsim_orchestrator_start(o, id.as_ptr()), RoomsimStatus::Validation);
        for (kind, data) in [("idf", REFERENCE_IDF.to_string()), ("weather", epw_2023()), ("occupancy", occupancy())] {
            let status = roomsim_orchestrator_upload(o, id.as_ptr(), c(kind).as_ptr(), data.as_ptr(), data.len());
            assert_eq!(status, RoomsimStatus::Ok, "{kind}: {}", last_error());
        }
        let status = roomsim_orchestrator_upload(o, id.as_ptr(), c("pdf").as_ptr(), ptr::null(), 0);
        assert_eq!(status, RoomsimStatus::NotFound);
        assert_eq!(roomsim_orchestrator_configure(o, id.as_ptr(), c("{").as_ptr()), RoomsimStatus::ParseError);
        assert_eq!(roomsim_orchestrator_configure(o, id.as_ptr(), c(PARAMS).as_ptr()), RoomsimStatus::Ok);
        assert_eq!(roomsim_orchestrator_start(o, id.as_ptr()), RoomsimStatus::Ok);
        assert_eq!(roomsim_orchestrator_wait(o, id.as_ptr(), 30_000), RoomsimStatus::Ok, "{}", last_error());

        let mut json = ptr::null_mut();
        assert_eq!(roomsim_orchestrator_status(o, id.as_ptr(), &mut json), RoomsimStatus::Ok);
        let status: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(status["status"], "done");

        let mut csv = ptr::null_mut();
        assert_eq!(roomsim_orchestrator_result(o, id.as_ptr(), c("csv").as_ptr(), &mut csv), RoomsimStatus::Ok);
        assert_eq!(take(csv).lines().count(), 145);
        let missing = c("missing");
        assert_eq!(roomsim_orchestrator_result(o, missing.as_ptr(), c("csv").as_ptr(), &mut csv), RoomsimStatus::NotFound);
        let data = REFERENCE_IDF;
        let status = roomsim_orchestrator_upload(o, id.as_ptr(), c("idf").as_ptr(), data.as_ptr(), data.len());
        assert_eq!(status, RoomsimStatus::Conflict);
        roomsim_orchestrator_free(o);
    }
    assert!(dir.path().read_dir().unwrap().count() >= 1);
}
