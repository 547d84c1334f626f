use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cech_ffi::*;
use serde_json::Value;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

unsafe fn take_json(p: *mut c_char) -> Value {
    assert!(!p.is_null());
    let v = serde_json::from_str(CStr::from_ptr(p).to_str().unwrap()).unwrap();
    cech_string_free(p);
    v
}

unsafe fn last_error() -> String {
    let p = cech_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

struct Loaded {
    cover: *mut CechCover,
    nerve: *mut CechNerve,
}

impl Loaded {
    unsafe fn new(cover_file: &str, max_dim: u32) -> Self {
        let mut cover = ptr::null_mut();
        assert_eq!(cech_cover_from_json(fixture(cover_file).as_ptr(), &mut cover), CechStatus::Ok);
        let mut nerve = ptr::null_mut();
        assert_eq!(cech_nerve_build(cover, max_dim, &mut nerve), CechStatus::Ok);
        Loaded { cover, nerve }
    }

    unsafe fn cochain(&self, file: &str) -> *mut CechCochain {
        let mut c = ptr::null_mut();
        assert_eq!(cech_cochain_from_json(self.nerve, fixture(file).as_ptr(), &mut c), CechStatus::Ok);
        c
    }
}

impl Drop for Loaded {
    fn drop(&mut self) {
        unsafe {
            cech_nerve_free(self.nerve);
            cech_cover_free(self.cover);
        }
    }
}

#[test]
fn cover_order_and_nerve_counts() {
    unsafe {
        let h = Loaded::new("brick_3x3.json", 2);
        let mut order = 0i64;
        assert_eq!(cech_cover_order(h.cover, &mut order), CechStatus::Ok);
        assert_eq!(order, 2);
        let circle = Loaded::new("circle_arcs.json", 2);
        let (mut v, mut e, mut t) = (0usize, 0usize, 0usize);
        assert_eq!(cech_nerve_counts(circle.nerve, &mut v, &mut e, &mut t), CechStatus::Ok);
        assert_eq!((v, e, t), (3, 3, 0));
        let mut out = ptr::null_mut();
        assert_eq!(cech_nerve_to_json(circle.nerve, &mut out), CechStatus::Ok);
        assert_eq!(take_json(out)["edges"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn solve_reports_obstruction_with_witness() {
    unsafe {
        let h = Loaded::new("circle_arcs.json", 2);
        let ones = h.cochain("cycle_ones_z.json");
        let mut out = ptr::null_mut();
        assert_eq!(cech_solve_coboundary(ones, CECH_CONVENTION_ABG, &mut out), CechStatus::Obstructed);
        assert_eq!(take_json(out)["holonomy"], 3);
        let exact = h.cochain("coboundary_z.json");
        assert_eq!(cech_solve_coboundary(exact, CECH_CONVENTION_GBA, &mut out), CechStatus::Ok);
        assert_eq!(take_json(out)["status"], "solved");
        assert_eq!(cech_solve_coboundary(exact, 7, &mut out), CechStatus::InputError);
        assert!(last_error().contains("convention"));
        cech_cochain_free(ones);
        cech_cochain_free(exact);
    }
}

#[test]
fn h1_and_lift() {
    unsafe {
        let h = Loaded::new("circle_arcs.json", 2);
        let mut out = ptr::null_mut();
        let z = CString::new("z").unwrap();
        assert_eq!(cech_h1(h.nerve, z.as_ptr(), &mut out), CechStatus::Ok);
        assert_eq!(take_json(out)["free_rank"], 1);

        let tri = Loaded::new("triangle.json", 2);
        let rho = tri.cochain("triangle_z2.json");
        let via = CString::new("z-to-zmod:2").unwrap();
        assert_eq!(cech_lift(rho, via.as_ptr(), &mut out), CechStatus::Ok);
        assert_eq!(take_json(out)["status"], "CorrectedStrict");
        cech_cochain_free(rho);

        let rp2 = Loaded::new("rp2.json", 2);
        let gen = rp2.cochain("rp2_generator_z2.json");
        assert_eq!(cech_lift(gen, via.as_ptr(), &mut out), CechStatus::Obstructed);
        assert_eq!(take_json(out)["status"], "Obstructed");
        let gl = CString::new("gl-det:2").unwrap();
        assert_eq!(cech_lift(gen, gl.as_ptr(), &mut out), CechStatus::InputError);
        cech_cochain_free(gen);
    }
}

#[test]
fn errors_and_null_pointers() {
    unsafe {
        let mut cover = ptr::null_mut();
        assert_eq!(cech_cover_from_json(fixture("malformed.json").as_ptr(), &mut cover), CechStatus::InputError);
        assert!(cover.is_null());
        assert!(last_error().contains("unknown point index"));
        assert_eq!(cech_cover_from_json(ptr::null(), &mut cover), CechStatus::NullPointer);
        let mut order = 0;
        assert_eq!(cech_cover_order(ptr::null(), &mut order), CechStatus::NullPointer);
        let h = Loaded::new("disjoint_pair.json", 2);
        assert_eq!(cech_cover_order(h.cover, &mut order), CechStatus::Ok);
        assert!(cech_last_error().is_null());
        let mut nerve = ptr::null_mut();
        assert_eq!(cech_nerve_build(h.cover, 5, &mut nerve), CechStatus::InputError);
        let r = CString::new("quaternion").unwrap();
        let mut out = ptr::null_mut();
        let circle = Loaded::new("circle_arcs.json", 2);
        assert_eq!(cech_h1(circle.nerve, r.as_ptr(), &mut out), CechStatus::InputError);
        cech_string_free(ptr::null_mut());
        cech_cover_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cech.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cech_last_error", "cech_solve_coboundary", "cech_lift", "CECH_STATUS_OBSTRUCTED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output()
        else {
            eprintln!("{compiler} not available; skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
