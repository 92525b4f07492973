use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bmcarpet_ffi::*;

const E1_JSON: &str = r#"{"m": 2, "n": 3, "digits": [[0, 0], [0, 1], [1, 0]]}"#;

struct Owned(*mut BmcCarpet);

impl Drop for Owned {
    fn drop(&mut self) {
        unsafe { bmc_carpet_free(self.0) };
    }
}

fn l_shape() -> Owned {
    let json = CString::new(E1_JSON).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { bmc_carpet_from_json(json.as_ptr(), &mut h) }, BmcStatus::Ok);
    assert!(!h.is_null());
    Owned(h)
}

fn last_error() -> String {
    let p = bmc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn dims_through_handle() {
    let c = l_shape();
    let mut d = BmcDims::default();
    assert_eq!(unsafe { bmc_dims(c.0, &mut d) }, BmcStatus::Ok);
    assert!((d.hausdorff - 1.349684).abs() < 1e-6);
    assert!((d.box_dim - 1.369070).abs() < 1e-6);
    assert!((d.gap - (d.box_dim - d.hausdorff)).abs() < 1e-15);
    assert_eq!((d.n_maps, d.n_cols, d.uniform_fibres), (3, 2, false));
    assert!(bmc_last_error_message().is_null());
}

#[test]
fn digits_constructor_matches_json() {
    let (cols, rows) = ([0i64, 0, 1], [0i64, 1, 0]);
    let mut h = ptr::null_mut();
    let st = unsafe { bmc_carpet_from_digits(2, 3, cols.as_ptr(), rows.as_ptr(), 3, &mut h) };
    assert_eq!(st, BmcStatus::Ok);
    let h = Owned(h);
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(bmc_upper_bound(h.0, 0.8, &mut a), BmcStatus::Ok);
        assert_eq!(bmc_upper_bound(l_shape().0, 0.8, &mut b), BmcStatus::Ok);
    }
    assert_eq!(a, b);
}

#[test]
fn error_codes_and_messages() {
    let mut h = ptr::null_mut();
    let bad = CString::new(r#"{"m": 3, "n": 2, "digits": [[0, 0]]}"#).unwrap();
    assert_eq!(unsafe { bmc_carpet_from_json(bad.as_ptr(), &mut h) }, BmcStatus::InvalidSpec);
    assert!(h.is_null());
    assert!(last_error().contains("strictly greater"));

    let malformed = CString::new("{not json").unwrap();
    assert_eq!(unsafe { bmc_carpet_from_json(malformed.as_ptr(), &mut h) }, BmcStatus::InvalidSpec);

    let c = l_shape();
    let mut v = 0.0;
    assert_eq!(unsafe { bmc_rate(c.0, 0.2, &mut v, ptr::null_mut()) }, BmcStatus::Domain);
    assert!(last_error().contains("domain"));
    assert_eq!(unsafe { bmc_delta0(c.0, 0.5, &mut v) }, BmcStatus::Domain);
    assert_eq!(unsafe { bmc_rate(ptr::null(), 0.4, &mut v, ptr::null_mut()) }, BmcStatus::NullPointer);
    assert_eq!(unsafe { bmc_rate(c.0, 0.4, ptr::null_mut(), ptr::null_mut()) }, BmcStatus::NullPointer);

    let theta = CString::new("0.5").unwrap();
    let mut rep = BmcOracleReport::default();
    let st = unsafe { bmc_oracle(c.0, 64, theta.as_ptr(), ptr::null(), ptr::null(), &mut rep) };
    assert_eq!(st, BmcStatus::Regime);

    let uni = CString::new(r#"{"m": 2, "n": 3, "digits": [[0, 0], [1, 2]]}"#).unwrap();
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { bmc_carpet_from_json(uni.as_ptr(), &mut u) }, BmcStatus::Ok);
    let u = Owned(u);
    assert_eq!(unsafe { bmc_delta0(u.0, 0.8, &mut v) }, BmcStatus::UniformFibres);
}

#[test]
fn bounds_and_rate() {
    let c = l_shape();
    let (mut v, mut l) = (0.0, 0.0);
    unsafe {
        assert_eq!(bmc_rate(c.0, 2f64.ln(), &mut v, &mut l), BmcStatus::Ok);
        assert!((v - 2f64.ln()).abs() < 1e-12 && l == f64::INFINITY);
        assert_eq!(bmc_delta0(c.0, 1.0, &mut v), BmcStatus::Ok);
        assert!((v - 0.00999).abs() < 5e-5);
        let mut slope = 0.0;
        assert_eq!(bmc_upper_slope_at_one(c.0, &mut slope), BmcStatus::Ok);
        assert!((slope - v / 3f64.ln()).abs() < 1e-15);
        let (mut two, mut three) = (0.0, 0.0);
        assert_eq!(bmc_upper_bound(c.0, 0.8, &mut two), BmcStatus::Ok);
        assert_eq!(bmc_improved_upper(c.0, 0.8, &mut three), BmcStatus::Ok);
        assert!(three < two);
        let (mut psi, mut u, mut lin, mut ffk, mut env) = (0.0, -1.0, 0.0, 0.0, 0.0);
        assert_eq!(bmc_lower_thm(c.0, 0.8, &mut psi, &mut u), BmcStatus::Ok);
        assert!((0.0..=1.0).contains(&u));
        assert_eq!(bmc_lower_linear(c.0, 0.8, &mut lin), BmcStatus::Ok);
        assert_eq!(bmc_lower_ffk(c.0, 0.8, &mut ffk), BmcStatus::Ok);
        assert_eq!(bmc_lower_envelope(c.0, 0.8, &mut env), BmcStatus::Ok);
        assert_eq!(env, psi.max(lin).max(ffk));
        assert!(env <= two);
    }
    assert_eq!(bmc_level_l(2, 3, 10), 6);
    assert_eq!(bmc_level_l(4, 16, 7), 3);
    assert_eq!(bmc_abi_version(), BMC_ABI_VERSION);
}

#[test]
fn oracle_and_curve() {
    let c = l_shape();
    let theta = CString::new("3/4").unwrap();
    let mut rep = BmcOracleReport::default();
    let st = unsafe { bmc_oracle(c.0, 256, theta.as_ptr(), ptr::null(), ptr::null(), &mut rep) };
    assert_eq!(st, BmcStatus::Ok);
    assert_eq!((rep.k, rep.k2), (256, 341));
    assert!((rep.bad_exponent - rep.asymptotic_bad_exponent).abs() < 0.02);
    let delta0 = 0.05;
    let s = 1.3;
    let st = unsafe { bmc_oracle(c.0, 64, theta.as_ptr(), &s, &delta0, &mut rep) };
    assert_eq!(st, BmcStatus::Ok);
    assert_eq!((rep.s, rep.delta0), (1.3, 0.05));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bmc_curve_csv(c.0, 10, false, &mut out) }, BmcStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { bmc_string_free(out) };
    assert!(text.starts_with("theta,upper2,upper3,"));
    assert_eq!(text.lines().count(), 11);
    unsafe { bmc_string_free(ptr::null_mut()) };
    unsafe { bmc_carpet_free(ptr::null_mut()) };
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_and_c_program_runs() {
    if !have_cc() {
        eprintln!("no C compiler on PATH; skipping C smoke test");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libbmcarpet_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("bmcarpet_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C smoke program failed to compile");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
