use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use twisted_ep_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    tep_string_free(p);
    s
}

const TUPLE: &str = r#"{
    "vertices": ["v"],
    "edges": [{"id": "e0", "src": "v", "rng": "v"}, {"id": "e1", "src": "v", "rng": "v"}]
}"#;

#[test]
fn tuple_lifecycle() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tep_tuple_from_json(c(TUPLE).as_ptr(), c("F3").as_ptr(), &mut t), TepStatus::Ok);
        let mut valid = false;
        assert_eq!(tep_tuple_validate(t, 0, 10, &mut valid), TepStatus::Ok);
        assert!(valid);
        let mut out = ptr::null_mut();
        assert_eq!(tep_tuple_to_json(t, &mut out), TepStatus::Ok);
        assert!(take(out).contains("\"F3\""));

        // q_v = v − e0 e0* − e1 e1* vanishes in the quotient.
        let q = r#"[{"alpha": ["v"], "g": "1", "beta": ["v"], "coeff": "1"},
                    {"alpha": ["e0"], "g": "1", "beta": ["e0"], "coeff": "-1"},
                    {"alpha": ["e1"], "g": "1", "beta": ["e1"], "coeff": "-1"}]"#;
        assert_eq!(tep_nf(t, c(q).as_ptr(), 0, &mut out), TepStatus::Ok);
        assert_eq!(take(out), "[]");

        let e0 = r#"[{"alpha": ["e0"], "g": "1", "beta": ["v"], "coeff": "2"}]"#;
        let e0s = r#"[{"alpha": ["v"], "g": "1", "beta": ["e0"], "coeff": "1"}]"#;
        assert_eq!(tep_mul(t, c(e0s).as_ptr(), c(e0).as_ptr(), &mut out), TepStatus::Ok);
        assert_eq!(take(out), r#"[{"alpha":["v"],"g":"1","beta":["v"],"coeff":"2 mod 3"}]"#);
        tep_tuple_free(t);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tep_tuple_from_json(ptr::null(), ptr::null(), &mut t), TepStatus::NullPointer);
        assert_eq!(tep_tuple_from_json(c("{}").as_ptr(), ptr::null(), &mut t), TepStatus::Schema);
        let msg = CStr::from_ptr(tep_last_error()).to_str().unwrap();
        assert!(msg.contains("vertices"), "{msg}");
        assert_eq!(tep_tuple_from_json(c(TUPLE).as_ptr(), c("F4").as_ptr(), &mut t), TepStatus::Schema);
        let bad = r#"{"A": [[1]], "B": [[1]], "C": [["1/2"]]}"#;
        let mut k = ptr::null_mut();
        assert_eq!(tep_katsura_from_json(c(bad).as_ptr(), ptr::null(), &mut k), TepStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(tep_katsura_ktheory(k, &mut out), TepStatus::Encoding);
        tep_katsura_free(k);
        tep_tuple_free(ptr::null_mut());
        tep_string_free(ptr::null_mut());
    }
}

#[test]
fn katsura_handles() {
    unsafe {
        let mut k = ptr::null_mut();
        let spec = r#"{"A": [[2]], "B": [[1]]}"#;
        assert_eq!(tep_katsura_from_json(c(spec).as_ptr(), c("F2").as_ptr(), &mut k), TepStatus::Ok);
        let mut kspi = false;
        assert_eq!(tep_katsura_is_kspi(k, &mut kspi), TepStatus::Ok);
        assert!(kspi);
        let mut out = ptr::null_mut();
        assert_eq!(tep_katsura_ktheory(k, &mut out), TepStatus::Ok);
        assert_eq!(take(out), r#"{"KH0":"0","KH1":"Z"}"#);
        let mut t = ptr::null_mut();
        assert_eq!(tep_katsura_build_tuple(k, &mut t), TepStatus::Ok);
        tep_tuple_free(t);
        tep_katsura_free(k);
    }
}

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(String::from)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = cc() else { return };
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/twisted_ep.h");
    assert!(header.exists());
    for lang in ["c", "c++"] {
        let status = Command::new(&cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "header does not compile as {lang}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let Some(cc) = cc() else { return };
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // The test binary lives in <target>/<profile>/deps.
    let exe_dir = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = [exe_dir.join("../libtwisted_ep_ffi.a"), exe_dir.join("libtwisted_ep_ffi.a")].into_iter().find(|p| p.exists());
    let Some(lib) = lib else {
        eprintln!("static library not found next to the test binary; skipping link check");
        return;
    };
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("tep_smoke");
    let status = Command::new(&cc)
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "linking the smoke test failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke test exited with {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Z/2"));
}
