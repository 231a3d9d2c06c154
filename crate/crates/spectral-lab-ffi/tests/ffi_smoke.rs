//! Exercises the C ABI through its exported functions: handle lifecycle,
//! status codes, JSON round trips and the error-message channel.

use std::ffi::{CStr, CString};
use std::ptr;

use spectral_lab_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let out = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { slab_string_free(p) };
    out
}

const NILPOTENT_3: &str =
    r#"{"n":3,"re":[[0,0,0],[0,0,1],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;

#[test]
fn matrix_lifecycle_and_sigma() {
    let json = cstr(NILPOTENT_3);
    let mut m: *mut SlabMatrix = ptr::null_mut();
    assert_eq!(
        unsafe { slab_matrix_from_json(json.as_ptr(), &mut m) },
        SlabStatus::Ok
    );
    assert_eq!(unsafe { slab_matrix_dim(m) }, 3);

    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(unsafe { slab_sigma_json(m, &mut out) }, SlabStatus::Ok);
    let text = take_string(out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["re"][0], 0.0);

    let mut cyclic = -1i32;
    assert_eq!(unsafe { slab_is_cyclic(m, 1e-7, &mut cyclic) }, SlabStatus::Ok);
    assert_eq!(cyclic, 0);

    unsafe { slab_matrix_free(m) };
    unsafe { slab_matrix_free(ptr::null_mut()) };
}

#[test]
fn invalid_json_reports_error() {
    let json = cstr("{\"n\": 2}");
    let mut m: *mut SlabMatrix = ptr::null_mut();
    assert_eq!(
        unsafe { slab_matrix_from_json(json.as_ptr(), &mut m) },
        SlabStatus::InvalidInput
    );
    let msg = unsafe { CStr::from_ptr(slab_last_error_message()) };
    assert!(msg.to_str().unwrap().contains("matrix JSON"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = 0f64;
    assert_eq!(
        unsafe { slab_bharali_lower(ptr::null(), ptr::null(), 1e-7, &mut out) },
        SlabStatus::NullPointer
    );
    assert_eq!(
        unsafe { slab_matrix_from_json(ptr::null(), ptr::null_mut()) },
        SlabStatus::NullPointer
    );
}

#[test]
fn bharali_through_the_abi() {
    let a_json = cstr(NILPOTENT_3);
    // diag(eps, j eps, j^2 eps) with eps = 0.1.
    let s = 3f64.sqrt() / 2.0;
    let b_text = format!(
        r#"{{"n":3,"re":[[0.1,0,0],[0,-0.05,0],[0,0,-0.05]],"im":[[0,0,0],[0,{a},0],[0,0,{b}]]}}"#,
        a = 0.1 * s,
        b = -0.1 * s
    );
    let b_json = cstr(&b_text);
    let mut a: *mut SlabMatrix = ptr::null_mut();
    let mut b: *mut SlabMatrix = ptr::null_mut();
    unsafe {
        assert_eq!(slab_matrix_from_json(a_json.as_ptr(), &mut a), SlabStatus::Ok);
        assert_eq!(slab_matrix_from_json(b_json.as_ptr(), &mut b), SlabStatus::Ok);
    }
    let mut value = 0f64;
    assert_eq!(
        unsafe { slab_bharali_lower(a, b, 1e-7, &mut value) },
        SlabStatus::Ok
    );
    assert!((value - 0.01).abs() < 1e-10, "got {value}");
    unsafe {
        slab_matrix_free(a);
        slab_matrix_free(b);
    }
}

#[test]
fn det_identity_through_the_abi() {
    let j = [2usize];
    let mut residual = -1.0;
    let mut sign = 0.0;
    assert_eq!(
        unsafe { slab_det_identity(3, j.as_ptr(), 1, 0.01, &mut residual, &mut sign) },
        SlabStatus::Ok
    );
    assert!(residual <= 1e-13);
    assert!(sign == 1.0 || sign == -1.0);

    // Invalid spec: J exhausts the superdiagonal.
    let j_bad = [2usize, 3];
    assert_eq!(
        unsafe { slab_det_identity(3, j_bad.as_ptr(), 2, 0.01, &mut residual, &mut sign) },
        SlabStatus::InvalidInput
    );
}

#[test]
fn ball_radius_and_point_round_trip() {
    let mut r = 0.0;
    assert_eq!(unsafe { slab_ball_radius(1, 64, 42, &mut r) }, SlabStatus::Ok);
    assert!((r - 0.9).abs() < 1e-12);

    let p_json = cstr(r#"{"n":3,"re":[0,0,0.001],"im":[0,0,0]}"#);
    let mut p: *mut SlabPoint = ptr::null_mut();
    assert_eq!(
        unsafe { slab_point_from_json(p_json.as_ptr(), &mut p) },
        SlabStatus::Ok
    );
    let origin = cstr(r#"{"n":3,"re":[0,0,0],"im":[0,0,0]}"#);
    let mut o: *mut SlabPoint = ptr::null_mut();
    assert_eq!(
        unsafe { slab_point_from_json(origin.as_ptr(), &mut o) },
        SlabStatus::Ok
    );
    let mut v = 0.0;
    assert_eq!(
        unsafe { slab_caratheodory_lb_g3(o, p, 256, &mut v) },
        SlabStatus::Ok
    );
    assert!((v - 0.001).abs() < 1e-8);
    unsafe {
        slab_point_free(p);
        slab_point_free(o);
    }
}

#[test]
fn example51_certificate_json() {
    let mut cfg = slab_config_default();
    cfg.restarts = 4;
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { slab_example51_json(0.1, &cfg, &mut out) },
        SlabStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["conclusion"], true);
    assert!((v["lower"]["value"].as_f64().unwrap() - 0.01).abs() < 1e-12);

    // eps outside the domain: InvalidInput, not a crash.
    let mut out2: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { slab_example51_json(0.5, &cfg, &mut out2) },
        SlabStatus::InvalidInput
    );
}

#[test]
fn header_exists_after_build() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/spectral_lab.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    assert!(text.contains("slab_status_t"));
    assert!(text.contains("slab_matrix_from_json"));
    assert!(text.contains("slab_string_free"));
}
