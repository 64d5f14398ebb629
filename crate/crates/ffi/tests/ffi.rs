use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cavity_memory_ffi::*;

const C10_JSON: &str =
    r#"{"lambda_L": 3.1622776601683795, "lambda_R": 3.1622776601683795, "kappa": 2.0, "gamma": 1.0, "kappa_p": 0.2}"#;

fn model(json: &str) -> *mut CqmModel {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { cqm_model_from_json(json.as_ptr(), &mut out) };
    assert_eq!(status, CqmStatus::Ok, "{}", last_error());
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = cqm_last_error_message();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

fn c(re: f64, im: f64) -> CqmComplex {
    CqmComplex { re, im }
}

#[test]
fn metrics_match_known_value() {
    let m = model(C10_JSON);
    let mut out = CqmMetrics::default();
    let h = 0.5f64.sqrt();
    assert_eq!(unsafe { cqm_metrics(m, c(h, 0.0), c(h, 0.0), &mut out) }, CqmStatus::Ok);
    assert!((out.f_qm - 0.997_401_865_017_776_3).abs() < 1e-12);
    assert!((out.cooperativity - 10.0).abs() < 1e-12);
    assert!((out.p_qm_conditional - out.p_qm * out.p_qm).abs() < 1e-15);
    unsafe { cqm_model_free(m) };
}

#[test]
fn scattering_identities_hold() {
    let m = model(C10_JSON);
    let mut s = CqmScattering::default();
    assert_eq!(unsafe { cqm_scattering(m, -0.7, &mut s) }, CqmStatus::Ok);
    let z = |c: CqmComplex| cavity_memory::C64::new(c.re, c.im);
    let det = z(s.t_ll) * z(s.t_rr) - z(s.t_lr) * z(s.t_rl);
    assert!((det - z(s.phase_factor)).norm() < 1e-12);
    assert_eq!(s.k, -0.7);
    assert_eq!(unsafe { cqm_scattering(m, f64::NAN, &mut s) }, CqmStatus::InvalidParams);
    unsafe { cqm_model_free(m) };
}

#[test]
fn oracle_agrees_with_closed_forms_under_tabulated_efficiency() {
    let m = model(C10_JSON);
    let k = [-0.5, 0.5];
    let eta = [0.6, 0.9];
    assert_eq!(unsafe { cqm_model_set_eta_table(m, k.as_ptr(), eta.as_ptr(), 2) }, CqmStatus::Ok);
    let mut out = CqmOracle::default();
    assert_eq!(unsafe { cqm_oracle(m, c(0.3f64.sqrt(), 0.0), c(0.0, 0.7f64.sqrt()), &mut out) }, CqmStatus::Ok);
    assert!(out.fidelity > 0.9 && out.p_qm > 0.0);
    // F_qm is read at |L⟩ and differs under a tabulated efficiency; the
    // remaining quantities agree.
    let mut closed = CqmMetrics::default();
    assert_eq!(unsafe { cqm_metrics(m, c(0.3f64.sqrt(), 0.0), c(0.0, 0.7f64.sqrt()), &mut closed) }, CqmStatus::Ok);
    assert!((out.p_qm - closed.p_qm).abs() < 1e-10);
    assert!((out.fidelity - closed.f_storage_retrieval).abs() < 1e-10);

    assert_eq!(unsafe { cqm_model_set_eta(m, 0.8) }, CqmStatus::Ok);
    assert_eq!(unsafe { cqm_oracle(m, c(1.0, 0.0), c(0.0, 0.0), &mut out) }, CqmStatus::Ok);
    assert!(out.max_closed_form_delta < 1e-10);
    unsafe { cqm_model_free(m) };
}

#[test]
fn errors_are_reported_by_status_and_message() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cqm_model_from_json(ptr::null(), &mut out) }, CqmStatus::NullPointer);
    assert!(out.is_null());

    let bad_json = CString::new("{not json").unwrap();
    assert_eq!(unsafe { cqm_model_from_json(bad_json.as_ptr(), &mut out) }, CqmStatus::InvalidJson);
    assert!(!last_error().is_empty());

    let bad_utf8 = CString::new(vec![0xff, 0xfe]).unwrap();
    assert_eq!(unsafe { cqm_model_from_json(bad_utf8.as_ptr(), &mut out) }, CqmStatus::InvalidUtf8);

    let uncoupled = CString::new(r#"{"lambda_L": 0, "lambda_R": 0, "kappa": 2, "gamma": 1, "kappa_p": 0.2}"#).unwrap();
    assert_eq!(unsafe { cqm_model_from_json(uncoupled.as_ptr(), &mut out) }, CqmStatus::InvalidParams);
    assert!(last_error().contains("both zero"), "{}", last_error());

    let m = model(C10_JSON);
    let mut metrics = CqmMetrics::default();
    assert_eq!(unsafe { cqm_metrics(m, c(1.0, 0.0), c(1.0, 0.0), &mut metrics) }, CqmStatus::InvalidParams);
    assert_eq!(unsafe { cqm_metrics(m, c(1.0, 0.0), c(0.0, 0.0), ptr::null_mut()) }, CqmStatus::NullPointer);
    assert_eq!(unsafe { cqm_model_set_eta(m, 0.0) }, CqmStatus::InvalidParams);
    assert_eq!(unsafe { cqm_model_set_quadrature(m, 1, 64) }, CqmStatus::Quadrature);
    assert_eq!(unsafe { cqm_model_set_eta_table(m, ptr::null(), ptr::null(), 0) }, CqmStatus::NullPointer);
    assert_eq!(unsafe { cqm_metrics(ptr::null(), c(1.0, 0.0), c(0.0, 0.0), &mut metrics) }, CqmStatus::NullPointer);
    unsafe { cqm_model_free(m) };
    unsafe { cqm_model_free(ptr::null_mut()) };
}

#[test]
fn retrieval_without_left_coupling_is_zero_probability() {
    let m = model(r#"{"lambda_L": 0, "lambda_R": 3, "kappa": 2, "gamma": 1, "kappa_p": 0.2}"#);
    let mut out = CqmOracle::default();
    let h = 0.5f64.sqrt();
    assert_eq!(unsafe { cqm_oracle(m, c(h, 0.0), c(h, 0.0), &mut out) }, CqmStatus::ZeroProbability);
    unsafe { cqm_model_free(m) };
}

#[test]
fn quadrature_setting_changes_node_count_only_slightly() {
    let m = model(C10_JSON);
    let mut a = CqmMetrics::default();
    let mut b = CqmMetrics::default();
    unsafe {
        assert_eq!(cqm_metrics(m, c(1.0, 0.0), c(0.0, 0.0), &mut a), CqmStatus::Ok);
        assert_eq!(cqm_model_set_quadrature(m, 128, 512), CqmStatus::Ok);
        assert_eq!(cqm_metrics(m, c(1.0, 0.0), c(0.0, 0.0), &mut b), CqmStatus::Ok);
        cqm_model_free(m);
    }
    assert!((a.f_qm - b.f_qm).abs() < 1e-12);
}

#[test]
fn static_strings() {
    let v = unsafe { CStr::from_ptr(cqm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    for status in [CqmStatus::Ok, CqmStatus::Panic, CqmStatus::ZeroProbability] {
        assert!(!unsafe { CStr::from_ptr(cqm_status_message(status)) }.to_bytes().is_empty());
    }
}

#[test]
fn errors_are_thread_local() {
    let bad = CString::new("[]").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cqm_model_from_json(bad.as_ptr(), &mut out) }, CqmStatus::InvalidJson);
    let other = std::thread::spawn(|| cqm_last_error_message().is_null()).join().unwrap();
    assert!(other);
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cavity_memory.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "cqm_model_from_json",
        "cqm_model_free",
        "cqm_model_set_eta",
        "cqm_model_set_eta_table",
        "cqm_model_set_quadrature",
        "cqm_scattering",
        "cqm_metrics",
        "cqm_oracle",
        "cqm_last_error_message",
        "cqm_status_message",
        "cqm_version",
        "typedef struct CqmModel CqmModel",
        "CQM_STATUS_ZERO_PROBABILITY = 6",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    // Test binaries live in <target>/<profile>/deps; the static library sits
    // one level up.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libcavity_memory_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());

    let tmp = std::env::temp_dir().join(format!("cqm-smoke-{}", std::process::id()));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&tmp)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "compiling smoke.c failed");
    let out = Command::new(&tmp).output().unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("c smoke ok"));
}
