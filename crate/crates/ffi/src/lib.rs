//! C ABI over `bmcarpet`.
//!
//! A carpet is held behind an opaque `BmcCarpet` handle created by one of the
//! constructors and released with `bmc_carpet_free`. Every fallible call
//! returns a `BmcStatus`; on failure `bmc_last_error_message` describes the
//! most recent error on the calling thread. Strings returned by the library
//! are released with `bmc_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bmcarpet::carpet::has_uniform_fibres;
use bmcarpet::curve::{curve, to_csv_string};
use bmcarpet::lower::{lower_envelope, lower_ffk, lower_linear_box, lower_thm};
use bmcarpet::oracle::{level_l, oracle_report, Theta};
use bmcarpet::upper::{improved_upper, solve_delta0, upper_bound, upper_slope_at_one, GridSpec};
use bmcarpet::{Carpet, CarpetSpec, DimPair, Error, RateFunction};

pub const BMC_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpec = 2,
    Io = 3,
    Domain = 4,
    Regime = 5,
    UniformFibres = 6,
    InvalidArgument = 7,
    SearchFailed = 8,
    Internal = 9,
}

impl From<&Error> for BmcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::Json(_) => BmcStatus::InvalidSpec,
            Error::Io(_) => BmcStatus::Io,
            Error::Domain { .. } | Error::ThetaOutOfRange { .. } | Error::UOutOfRange(_) => BmcStatus::Domain,
            Error::Regime(_) | Error::RegimeMismatch { .. } => BmcStatus::Regime,
            Error::UniformFibres => BmcStatus::UniformFibres,
            Error::SearchFailed(_) => BmcStatus::SearchFailed,
            _ => BmcStatus::InvalidArgument,
        }
    }
}

/// Opaque carpet handle.
pub struct BmcCarpet {
    rate: RateFunction,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmcDims {
    pub hausdorff: f64,
    pub box_dim: f64,
    pub gap: f64,
    /// `log m / log n`
    pub r: f64,
    /// `log(N/M)`
    pub c: f64,
    pub mean_log_n: f64,
    pub n_maps: usize,
    pub n_cols: usize,
    pub uniform_fibres: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmcOracleReport {
    pub k: u64,
    pub level_k: u64,
    pub k2: u64,
    pub level_k2: u64,
    pub window: u64,
    pub delta0: f64,
    pub s: f64,
    pub log10_bad_windows: f64,
    pub log10_good_count: f64,
    pub log10_bad_count: f64,
    pub log10_total_count: f64,
    pub log10_cost_bad: f64,
    pub log10_cost_good: f64,
    pub log10_cost_total: f64,
    pub bad_exponent: f64,
    pub asymptotic_bad_exponent: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> BmcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BmcStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            BmcStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            BmcStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            BmcStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic".into());
            BmcStatus::Internal
        }
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn handle<'a>(p: *const BmcCarpet) -> Result<&'a BmcCarpet, Failure> {
    p.as_ref().ok_or(Failure::Null("carpet"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

fn boxed(carpet: Carpet) -> *mut BmcCarpet {
    Box::into_raw(Box::new(BmcCarpet { rate: RateFunction::new(&carpet) }))
}

#[no_mangle]
pub extern "C" fn bmc_abi_version() -> u32 {
    BMC_ABI_VERSION
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn bmc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON spec `{"m": .., "n": .., "digits": [[col, row], ..]}`.
#[no_mangle]
pub unsafe extern "C" fn bmc_carpet_from_json(json: *const c_char, out: *mut *mut BmcCarpet) -> BmcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let text = c_str(json, "json")?;
        *out = boxed(Carpet::new(CarpetSpec::from_json(text)?)?);
        Ok(())
    })
}

/// Builds a carpet from `len` zero-based `(cols[i], rows[i])` digits.
#[no_mangle]
pub unsafe extern "C" fn bmc_carpet_from_digits(
    m: i64,
    n: i64,
    cols: *const i64,
    rows: *const i64,
    len: usize,
    out: *mut *mut BmcCarpet,
) -> BmcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let digits = if len == 0 {
            Vec::new()
        } else {
            if cols.is_null() || rows.is_null() {
                return Err(Failure::Null("digits"));
            }
            let cols = std::slice::from_raw_parts(cols, len);
            let rows = std::slice::from_raw_parts(rows, len);
            cols.iter().copied().zip(rows.iter().copied()).collect()
        };
        *out = boxed(Carpet::new(CarpetSpec::new(m, n, digits))?);
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bmc_carpet_free(carpet: *mut BmcCarpet) {
    if !carpet.is_null() {
        drop(Box::from_raw(carpet));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bmc_dims(carpet: *const BmcCarpet, out: *mut BmcDims) -> BmcStatus {
    guard(|| {
        let c = handle(carpet)?.rate.carpet();
        let out = out_ref(out, "out")?;
        let d = DimPair::of(c);
        *out = BmcDims {
            hausdorff: d.hausdorff,
            box_dim: d.box_dim,
            gap: d.gap(),
            r: c.r(),
            c: c.c(),
            mean_log_n: c.mean_log_n(),
            n_maps: c.n_maps(),
            n_cols: c.n_cols(),
            uniform_fibres: has_uniform_fibres(c),
        };
        Ok(())
    })
}

/// `I(x)` and the maximizing `λ` (`+∞` at `x = log N_max`). `lambda_star` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn bmc_rate(
    carpet: *const BmcCarpet,
    x: f64,
    value: *mut f64,
    lambda_star: *mut f64,
) -> BmcStatus {
    guard(|| {
        let e = handle(carpet)?.rate.eval(x)?;
        *out_ref(value, "value")? = e.value;
        if let Some(l) = lambda_star.as_mut() {
            *l = e.lambda_star;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bmc_delta0(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = solve_delta0(&handle(carpet)?.rate, theta)?.delta0;
        Ok(())
    })
}

/// Two-scale upper bound at `θ ∈ [0, 1]`.
#[no_mangle]
pub unsafe extern "C" fn bmc_upper_bound(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = upper_bound(&handle(carpet)?.rate, theta)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bmc_upper_slope_at_one(carpet: *const BmcCarpet, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = upper_slope_at_one(&handle(carpet)?.rate)?;
        Ok(())
    })
}

/// Three-scale upper bound at `θ ∈ [log_n m, 1)` with the default search grid.
#[no_mangle]
pub unsafe extern "C" fn bmc_improved_upper(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = improved_upper(&handle(carpet)?.rate, theta, &GridSpec::default())?.bound;
        Ok(())
    })
}

/// Measure-based lower bound; `u_star` (nullable) receives the best mixing weight.
#[no_mangle]
pub unsafe extern "C" fn bmc_lower_thm(
    carpet: *const BmcCarpet,
    theta: f64,
    out: *mut f64,
    u_star: *mut f64,
) -> BmcStatus {
    guard(|| {
        let e = lower_thm(handle(carpet)?.rate.carpet(), theta)?;
        *out_ref(out, "out")? = e.psi;
        if let Some(u) = u_star.as_mut() {
            *u = e.u;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bmc_lower_linear(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = lower_linear_box(handle(carpet)?.rate.carpet(), theta);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bmc_lower_ffk(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = lower_ffk(handle(carpet)?.rate.carpet(), theta);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bmc_lower_envelope(carpet: *const BmcCarpet, theta: f64, out: *mut f64) -> BmcStatus {
    guard(|| {
        *out_ref(out, "out")? = lower_envelope(handle(carpet)?.rate.carpet(), theta)?;
        Ok(())
    })
}

/// `L(k)`: the largest `ℓ` with `n^ℓ ≤ m^k`.
#[no_mangle]
pub extern "C" fn bmc_level_l(m: u64, n: u64, k: u64) -> u64 {
    level_l(m, n, k)
}

/// Oracle report at level `k`. `theta` is a string such as `"3/4"` or `"0.75"`;
/// `s` and `delta0` may be NULL to use their defaults.
#[no_mangle]
pub unsafe extern "C" fn bmc_oracle(
    carpet: *const BmcCarpet,
    k: u64,
    theta: *const c_char,
    s: *const f64,
    delta0: *const f64,
    out: *mut BmcOracleReport,
) -> BmcStatus {
    guard(|| {
        let rate = &handle(carpet)?.rate;
        let out = out_ref(out, "out")?;
        let theta: Theta = c_str(theta, "theta")?.parse()?;
        let r = oracle_report(rate, k, theta, s.as_ref().copied(), delta0.as_ref().copied())?;
        let (sc, c) = (r.counts.scales, &r.counts);
        *out = BmcOracleReport {
            k: sc.k,
            level_k: sc.level_k,
            k2: sc.k2,
            level_k2: sc.level_k2,
            window: sc.window,
            delta0: c.delta0,
            s: r.cost.s,
            log10_bad_windows: c.log10_bad_windows,
            log10_good_count: c.log10_good_count,
            log10_bad_count: c.log10_bad_count,
            log10_total_count: c.log10_total_count,
            log10_cost_bad: r.cost.log10_cost_bad,
            log10_cost_good: r.cost.log10_cost_good,
            log10_cost_total: r.cost.log10_cost_total,
            bad_exponent: r.bad_exponent,
            asymptotic_bad_exponent: r.asymptotic_bad_exponent,
        };
        Ok(())
    })
}

/// Curve CSV over a `grid`-point `θ` grid. Release `*out` with `bmc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn bmc_curve_csv(
    carpet: *const BmcCarpet,
    grid: usize,
    include_three_scale: bool,
    out: *mut *mut c_char,
) -> BmcStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let points = curve(&handle(carpet)?.rate, grid, include_three_scale)?;
        let text = to_csv_string(&points)?;
        *out = CString::new(text).expect("CSV has no NULs").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bmc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
