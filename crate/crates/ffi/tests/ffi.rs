use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use symsem_ffi::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = symsem_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn analyze(name: &str) -> *mut SymsemModel {
    let doc = c(&std::fs::read_to_string(fixture(name)).unwrap());
    let mut model = ptr::null_mut();
    let status = unsafe { symsem_analyze_json(doc.as_ptr(), ptr::null(), &mut model) };
    assert_eq!(status, SymsemStatus::Ok);
    assert!(!model.is_null());
    model
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { symsem_string_free(p) };
    s
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(symsem_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn analyze_query_stats_round_trip() {
    let model = analyze("bench_people.json");

    let mut out = ptr::null_mut();
    let q = c("non_symmetrical_objects(X).");
    assert_eq!(
        unsafe { symsem_query(model, q.as_ptr(), &mut out) },
        SymsemStatus::Ok
    );
    assert!(symsem_last_error().is_null());
    assert_eq!(take_string(out), "X = [person_c]\n% 1 solution\n");

    let mut stats = SymsemStats::default();
    assert_eq!(
        unsafe { symsem_stats(model, SymsemScope::Objects as u32, &mut stats) },
        SymsemStatus::Ok
    );
    assert_eq!((stats.num_elements, stats.num_symmetric), (4, 3));
    assert_eq!(stats.relative_symmetry, 0.75);
    assert_eq!(stats.has_mean_divergence, 1);

    assert_eq!(
        unsafe { symsem_stats(model, 7, &mut stats) },
        SymsemStatus::InvalidArgument
    );
    assert!(last_error().contains("scope 7"));

    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { symsem_model_to_json(model, &mut json) },
        SymsemStatus::Ok
    );
    let json = c(&take_string(json));
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { symsem_model_from_json(json.as_ptr(), &mut back) },
        SymsemStatus::Ok
    );
    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { symsem_model_to_json(back, &mut again) },
        SymsemStatus::Ok
    );
    assert_eq!(take_string(again).as_bytes(), json.as_bytes());

    unsafe {
        symsem_model_free(back);
        symsem_model_free(model);
    }
}

#[test]
fn empty_scope_has_no_means() {
    let model = analyze("empty.json");
    let mut stats = SymsemStats::default();
    assert_eq!(
        unsafe { symsem_stats(model, SymsemScope::Patches as u32, &mut stats) },
        SymsemStatus::Ok
    );
    assert_eq!(stats, SymsemStats::default());
    unsafe { symsem_model_free(model) };
}

#[test]
fn error_codes() {
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { symsem_analyze_json(ptr::null(), ptr::null(), &mut model) },
        SymsemStatus::NullArgument
    );
    assert!(model.is_null());

    let garbled = c("{\"image_id\": ");
    assert_eq!(
        unsafe { symsem_analyze_json(garbled.as_ptr(), ptr::null(), &mut model) },
        SymsemStatus::Parse
    );

    let invalid = c(&std::fs::read_to_string(fixture("invalid/invalid_bbox.json")).unwrap());
    assert_eq!(
        unsafe { symsem_analyze_json(invalid.as_ptr(), ptr::null(), &mut model) },
        SymsemStatus::Invalid
    );
    assert!(last_error().contains("bbox"));
    let mut n = 0u64;
    assert_eq!(
        unsafe { symsem_validate_json(invalid.as_ptr(), &mut n) },
        SymsemStatus::Invalid
    );
    assert_eq!(n, 1);

    let doc = c(&std::fs::read_to_string(fixture("perfect.json")).unwrap());
    assert_eq!(
        unsafe { symsem_validate_json(doc.as_ptr(), &mut n) },
        SymsemStatus::Ok
    );
    assert_eq!(n, 0);
    let bad_cfg = c("divergence_threshold = \"high\"");
    assert_eq!(
        unsafe { symsem_analyze_json(doc.as_ptr(), bad_cfg.as_ptr(), &mut model) },
        SymsemStatus::Config
    );
    assert!(last_error().contains("divergence_threshold"));

    let model = analyze("perfect.json");
    let mut out = ptr::null_mut();
    let q = c("symmetrical_element(");
    assert_eq!(
        unsafe { symsem_query(model, q.as_ptr(), &mut out) },
        SymsemStatus::Query
    );
    assert!(out.is_null());
    assert!(
        last_error().ends_with("symmetrical_element(\n                   ^"),
        "{}",
        last_error()
    );
    let bytes = [0xffu8, 0];
    assert_eq!(
        unsafe { symsem_query(model, bytes.as_ptr().cast(), &mut out) },
        SymsemStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { symsem_query(ptr::null(), q.as_ptr(), &mut out) },
        SymsemStatus::NullArgument
    );
    unsafe {
        symsem_model_free(model);
        symsem_model_free(ptr::null_mut());
        symsem_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/symsem.h"))
            .unwrap();
    for name in [
        "typedef struct SymsemModel SymsemModel;",
        "symsem_analyze_json(",
        "symsem_validate_json(",
        "symsem_query(",
        "symsem_stats(",
        "symsem_model_free(",
        "symsem_string_free(",
        "symsem_last_error(void)",
        "SYMSEM_STATUS_INVALID_ARGUMENT = 10",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    let lib = target.join(profile).join("libsymsem_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe)
        .arg(fixture("bench_people.json"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "NP=2 NSP=2 rel=1.000\nX = [person_c]\n% 1 solution\nerror: reported\n"
    );
}
