//! C interface to `ewcg-core`.
//!
//! A problem is loaded from a JSON spec into an opaque [`EwcgProblem`] handle.
//! Every fallible call returns an [`EwcgStatus`]; on failure the message is
//! available from [`ewcg_last_error_message`] on the same thread. Strings
//! returned through `out` parameters are owned by the caller and must be
//! released with [`ewcg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ewcg::commands::{self, DEFAULT_BLOCKS};
use ewcg::pipeline::Binning;
use ewcg::report::Format;
use ewcg::spec::ProblemSpec;
use ewcg::{Error, ErrorKind};

/// Status codes, equal to the exit codes of the `ewcg` binary.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwcgStatus {
    EWCG_OK = 0,
    /// Malformed spec, bad argument or null pointer.
    EWCG_ERR_INPUT = 2,
    /// No valid coloring exists, or decoding is ambiguous.
    EWCG_ERR_INFEASIBLE = 3,
    /// A configured budget was exceeded.
    EWCG_ERR_CAPACITY = 4,
    /// Internal error, including a caught panic.
    EWCG_ERR_INTERNAL = 5,
}

impl From<ErrorKind> for EwcgStatus {
    fn from(k: ErrorKind) -> Self {
        match k {
            ErrorKind::Input => EwcgStatus::EWCG_ERR_INPUT,
            ErrorKind::Infeasible => EwcgStatus::EWCG_ERR_INFEASIBLE,
            ErrorKind::Capacity => EwcgStatus::EWCG_ERR_CAPACITY,
            ErrorKind::Internal => EwcgStatus::EWCG_ERR_INTERNAL,
        }
    }
}

/// Opaque problem handle.
pub struct EwcgProblem {
    spec: ProblemSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: EwcgStatus, msg: impl Into<String>) -> EwcgStatus {
    set_error(msg.into());
    status
}

fn from_error(e: &Error) -> EwcgStatus {
    fail(e.kind().into(), e.to_string())
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), EwcgStatus>) -> EwcgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EwcgStatus::EWCG_OK,
        Ok(Err(s)) => s,
        Err(_) => fail(EwcgStatus::EWCG_ERR_INTERNAL, "panic inside ewcg"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, EwcgStatus> {
    if p.is_null() {
        return Err(fail(EwcgStatus::EWCG_ERR_INPUT, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            EwcgStatus::EWCG_ERR_INPUT,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn problem<'a>(p: *const EwcgProblem) -> Result<&'a EwcgProblem, EwcgStatus> {
    p.as_ref()
        .ok_or_else(|| fail(EwcgStatus::EWCG_ERR_INPUT, "problem handle is null"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), EwcgStatus> {
    let c = CString::new(s)
        .map_err(|_| fail(EwcgStatus::EWCG_ERR_INTERNAL, "output contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), EwcgStatus> {
    if out.is_null() {
        Err(fail(EwcgStatus::EWCG_ERR_INPUT, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn render<T: serde::Serialize>(
    command: &str,
    spec: &ProblemSpec,
    result: T,
) -> Result<String, EwcgStatus> {
    commands::envelope(command, Some(spec), result)
        .render(Format::Json)
        .map_err(|e| from_error(&e))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ewcg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ewcg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON problem spec into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_problem_from_json(
    json: *const c_char,
    out: *mut *mut EwcgProblem,
) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let text = read_str(json, "json")?;
        let spec = ProblemSpec::from_json(text).map_err(|e| from_error(&e))?;
        *out = Box::into_raw(Box::new(EwcgProblem { spec }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from [`ewcg_problem_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ewcg_problem_free(p: *mut EwcgProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Overrides the block length `n`, fold `b`, palette size `a` and seed.
/// Zero leaves `n` and `b` unchanged; `a == 0` picks the palette automatically.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ewcg_problem_set_params(
    p: *mut EwcgProblem,
    n: usize,
    b: usize,
    a: usize,
    seed: u64,
) -> EwcgStatus {
    guard(|| {
        let p = p
            .as_mut()
            .ok_or_else(|| fail(EwcgStatus::EWCG_ERR_INPUT, "problem handle is null"))?;
        let o = &mut p.spec.options;
        if n > 0 {
            o.n = n;
        }
        if b > 0 {
            o.b = b;
        }
        o.a = (a > 0).then_some(a);
        o.seed = seed;
        Ok(())
    })
}

/// Entropy in bits of the first source, `H(X1)`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_source_entropy(p: *const EwcgProblem, out: *mut f64) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let j = problem(p)?.spec.joint().map_err(|e| from_error(&e))?;
        *out = j.row_marginal().entropy();
        Ok(())
    })
}

/// Exact fractional chromatic number of the first characteristic graph
/// (at the configured power) as `numerator / denominator`.
///
/// # Safety
/// `p` must be a live handle; `num` and `den` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ewcg_fractional_chromatic(
    p: *const EwcgProblem,
    num: *mut i64,
    den: *mut i64,
) -> EwcgStatus {
    guard(|| {
        check_out(num)?;
        check_out(den)?;
        let r = commands::chif(&problem(p)?.spec).map_err(|e| from_error(&e))?;
        *num = r.numerator;
        *den = r.denominator;
        Ok(())
    })
}

/// Edge weights of both characteristic graphs as a JSON report.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_weights_json(
    p: *const EwcgProblem,
    out: *mut *mut c_char,
) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        let r = commands::weights(spec).map_err(|e| from_error(&e))?;
        write_string(out, render("weights", spec, r)?)
    })
}

/// Traditional and folded colorings as a JSON report.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_color_json(
    p: *const EwcgProblem,
    out: *mut *mut c_char,
) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        let r = commands::color(spec).map_err(|e| from_error(&e))?;
        write_string(out, render("color", spec, r)?)
    })
}

/// Rate region as a JSON report. When a budget stops the computation early
/// the partial report is still written to `*out` and the capacity status is
/// returned.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_rates_json(
    p: *const EwcgProblem,
    out: *mut *mut c_char,
) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        match commands::rates(spec) {
            Ok(r) => write_string(out, render("rates", spec, r)?),
            Err(Error::Incomplete { partial, source }) => {
                write_string(out, render("rates", spec, &partial)?)?;
                Err(from_error(&source))
            }
            Err(e) => Err(from_error(&e)),
        }
    })
}

/// Simulates `blocks` source blocks through the encoder and decoder
/// (0 uses the default count). `binning` is null or `"R1,R2,L"`.
///
/// # Safety
/// `p` must be a live handle, `binning` null or NUL-terminated, and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewcg_simulate_json(
    p: *const EwcgProblem,
    blocks: usize,
    binning: *const c_char,
    out: *mut *mut c_char,
) -> EwcgStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        let binning = if binning.is_null() {
            None
        } else {
            Some(
                read_str(binning, "binning")?
                    .parse::<Binning>()
                    .map_err(|e| from_error(&e))?,
            )
        };
        let blocks = if blocks == 0 { DEFAULT_BLOCKS } else { blocks };
        let r = commands::simulate(spec, blocks, binning).map_err(|e| from_error(&e))?;
        write_string(out, render("simulate", spec, r)?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ewcg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
