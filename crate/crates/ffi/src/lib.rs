//! C ABI over the `fuzzy-tcp` engine.
//!
//! Engines and datasets are opaque handles created by `ftcp_*_new*` /
//! `ftcp_*_load` and released with the matching `*_free`. Every fallible
//! call returns an [`FtcpStatus`]; on failure a description is available from
//! [`ftcp_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fuzzy_tcp::inference::{explain, Engine};
use fuzzy_tcp::tcp::{self, Dataset, ScheduleMode};
use fuzzy_tcp::{defaults, io, Error};
use libc::c_char;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtcpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    EmptyAggregate = 6,
    Cycle = 7,
    /// The output buffer is too small; the required length was written to
    /// the `written` out-parameter.
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtcpMode {
    RunOnce = 0,
    FreshChain = 1,
}

/// Opaque inference engine.
pub struct FtcpEngine(Engine);

/// Opaque validated test-case dataset.
pub struct FtcpDataset(Dataset);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|b| *b != 0);
    let text = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> FtcpStatus {
    match err {
        Error::Io { .. } => FtcpStatus::Io,
        Error::Parse { .. } => FtcpStatus::Parse,
        Error::EmptyAggregate => FtcpStatus::EmptyAggregate,
        Error::PrerequisiteCycle(_) => FtcpStatus::Cycle,
        Error::InvalidInput(_) | Error::InvalidResolution(_) | Error::MissingInput(_) => FtcpStatus::InvalidArgument,
        _ => FtcpStatus::Validation,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), FtcpStatus>) -> FtcpStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtcpStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            FtcpStatus::Panic
        }
    }
}

fn fail(err: Error) -> FtcpStatus {
    set_last_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> FtcpStatus {
    set_last_error(format!("{what} is null"));
    FtcpStatus::NullPointer
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, FtcpStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg<'a>(p: *const c_char, what: &str) -> Result<&'a Path, FtcpStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map(Path::new).map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        FtcpStatus::InvalidArgument
    })
}

fn mode_of(mode: FtcpMode) -> ScheduleMode {
    match mode {
        FtcpMode::RunOnce => ScheduleMode::RunOnce,
        FtcpMode::FreshChain => ScheduleMode::FreshChain,
    }
}

/// Copies `items` into `out`, or reports the required length.
unsafe fn fill<T: Copy>(items: &[T], out: *mut T, capacity: usize, written: *mut usize) -> Result<(), FtcpStatus> {
    if written.is_null() {
        return Err(null("written"));
    }
    *written = items.len();
    if items.len() > capacity {
        set_last_error(format!("buffer holds {capacity} entries, {} needed", items.len()));
        return Err(FtcpStatus::BufferTooSmall);
    }
    if !items.is_empty() {
        if out.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(items.as_ptr(), out, items.len());
    }
    Ok(())
}

/// Message for the most recent failure on this thread, or null when the
/// last call succeeded. Valid until the next `ftcp_*` call on this thread.
#[no_mangle]
pub extern "C" fn ftcp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ftcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Engine with the bundled partitions and rule base.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ftcp_engine_new_default(out: *mut *mut FtcpEngine) -> FtcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FtcpEngine(defaults::engine())));
        Ok(())
    })
}

/// Engine from a variables file and a rules file. `resolution` is the
/// number of centroid samples; pass 0 for the default.
///
/// # Safety
/// `variables` and `rules` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_engine_from_files(
    variables: *const c_char,
    rules: *const c_char,
    resolution: usize,
    out: *mut *mut FtcpEngine,
) -> FtcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let vars = io::load_variables(path_arg(variables, "variables")?).map_err(fail)?;
        let rules = io::load_rules(path_arg(rules, "rules")?).map_err(fail)?;
        let resolution = if resolution == 0 { fuzzy_tcp::inference::DEFAULT_RESOLUTION } else { resolution };
        let engine = Engine::new(vars, rules, resolution).map_err(fail)?;
        *out = Box::into_raw(Box::new(FtcpEngine(engine)));
        Ok(())
    })
}

/// # Safety
/// `engine` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ftcp_engine_free(engine: *mut FtcpEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Crisp priority for one (execution time, failure rate) pair.
///
/// # Safety
/// `engine` must be a live handle; `priority` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_engine_infer(
    engine: *const FtcpEngine,
    exec_time: f64,
    failure_rate: f64,
    priority: *mut f64,
) -> FtcpStatus {
    guard(|| {
        let engine = borrow(engine, "engine")?;
        if priority.is_null() {
            return Err(null("priority"));
        }
        *priority = engine
            .0
            .evaluate(&[(tcp::EXECUTION_TIME, exec_time), (tcp::FAILURE_RATE, failure_rate)])
            .map_err(fail)?;
        Ok(())
    })
}

/// Human-readable inference trace. Release the string with
/// [`ftcp_string_free`].
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_engine_explain(
    engine: *const FtcpEngine,
    exec_time: f64,
    failure_rate: f64,
    out: *mut *mut c_char,
) -> FtcpStatus {
    guard(|| {
        let engine = borrow(engine, "engine")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let trace = engine
            .0
            .infer(&[(tcp::EXECUTION_TIME, exec_time), (tcp::FAILURE_RATE, failure_rate)])
            .map_err(fail)?;
        let text = explain(&trace, engine.0.rules());
        *out = CString::new(text).expect("report has no nul bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ftcp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The bundled 20-case sample dataset.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_dataset_new_default(out: *mut *mut FtcpDataset) -> FtcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FtcpDataset(defaults::dataset())));
        Ok(())
    })
}

/// Loads a `.csv` or `.json` dataset.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_dataset_load(path: *const c_char, out: *mut *mut FtcpDataset) -> FtcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dataset = io::load_dataset_any(path_arg(path, "path")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(FtcpDataset(dataset)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ftcp_dataset_free(dataset: *mut FtcpDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of test cases, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ftcp_dataset_len(dataset: *const FtcpDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// Ranks the dataset. Writes test ids in rank order to `ids` and, when
/// `scores` is non-null, the matching final scores. Both buffers hold
/// `capacity` entries; `written` receives the number of tests.
///
/// # Safety
/// Handles must be live; `ids` and (if non-null) `scores` must have room for
/// `capacity` entries; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_prioritize(
    engine: *const FtcpEngine,
    dataset: *const FtcpDataset,
    ids: *mut u32,
    scores: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> FtcpStatus {
    guard(|| {
        let engine = borrow(engine, "engine")?;
        let dataset = borrow(dataset, "dataset")?;
        let ranked = tcp::prioritize(dataset.0.tests(), &engine.0).map_err(fail)?;
        let order: Vec<u32> = ranked.iter().map(|p| p.id).collect();
        fill(&order, ids, capacity, written)?;
        if !scores.is_null() {
            let finals: Vec<f64> = ranked.iter().map(|p| p.final_score).collect();
            fill(&finals, scores, capacity, written)?;
        }
        Ok(())
    })
}

/// Ranks the dataset and writes the test ids of the resulting execution
/// plan, including inserted prerequisite runs, to `steps`.
///
/// # Safety
/// Handles must be live; `steps` must have room for `capacity` entries;
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcp_schedule(
    engine: *const FtcpEngine,
    dataset: *const FtcpDataset,
    mode: FtcpMode,
    steps: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> FtcpStatus {
    guard(|| {
        let engine = borrow(engine, "engine")?;
        let dataset = borrow(dataset, "dataset")?;
        let ranked = tcp::prioritize(dataset.0.tests(), &engine.0).map_err(fail)?;
        let plan = tcp::schedule(&ranked, &dataset.0, mode_of(mode)).map_err(fail)?;
        fill(&plan.ids(), steps, capacity, written)
    })
}
