//! C interface. Every function returns an [`NsfStatus`]; on failure the
//! message is available from [`nsf_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nsframes::config::{AnalysisConfig, System};
use nsframes::family::translate_frame_bounds;
use nsframes::oracle::{discretized_frame_bounds, Grid};
use nsframes::report::{run, Command};
use nsframes::spectrum::{inner_product, PiecewiseSpectrum, Segment, C64};
use nsframes::systems::gabor_frame_bounds;
use nsframes::FrameError;

/// Result codes. Values from 10 on mirror the library error kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    UnknownCommand = 4,
    InvalidDilation = 10,
    InvalidSegment = 11,
    UnboundedFamily = 12,
    HypothesisViolation = 13,
    NotAFrame = 14,
    InvalidParams = 15,
    IllPosedOperator = 16,
    Coverage = 17,
    GridIncompatible = 18,
    QuadratureFailure = 19,
    NonMonotoneSweep = 20,
    Linalg = 21,
    Config = 22,
    Io = 23,
}

impl From<&FrameError> for NsfStatus {
    fn from(e: &FrameError) -> Self {
        match e {
            FrameError::InvalidDilation(_) => NsfStatus::InvalidDilation,
            FrameError::InvalidSegment { .. } => NsfStatus::InvalidSegment,
            FrameError::UnboundedFamily(_) => NsfStatus::UnboundedFamily,
            FrameError::HypothesisViolation(_) => NsfStatus::HypothesisViolation,
            FrameError::NotAFrame { .. } => NsfStatus::NotAFrame,
            FrameError::InvalidParams(_) => NsfStatus::InvalidParams,
            FrameError::IllPosedOperator(_) => NsfStatus::IllPosedOperator,
            FrameError::Coverage { .. } => NsfStatus::Coverage,
            FrameError::GridIncompatible(_) => NsfStatus::GridIncompatible,
            FrameError::QuadratureFailure { .. } => NsfStatus::QuadratureFailure,
            FrameError::NonMonotoneSweep(_) => NsfStatus::NonMonotoneSweep,
            FrameError::Linalg(_) => NsfStatus::Linalg,
            FrameError::Config(_) => NsfStatus::Config,
            FrameError::Io(_) => NsfStatus::Io,
        }
    }
}

/// Linear piece `intercept + slope·γ` on `(lo, hi]`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NsfSegment {
    pub lo: f64,
    pub hi: f64,
    pub intercept_re: f64,
    pub intercept_im: f64,
    pub slope_re: f64,
    pub slope_im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsfBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_tight: bool,
    pub is_parseval: bool,
}

/// Opaque piecewise-linear spectrum.
pub struct NsfSpectrum(PiecewiseSpectrum);

/// Opaque system built from a config.
pub struct NsfSystem(System);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (NsfStatus, String)>) -> NsfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NsfStatus::Panic
        }
    }
}

fn lib_err(e: FrameError) -> (NsfStatus, String) {
    (NsfStatus::from(&e), format!("{}: {e}", e.code()))
}

fn null(what: &str) -> (NsfStatus, String) {
    (NsfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (NsfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (NsfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn nsf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nsf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `segments` must point to `count` readable segments; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_spectrum_new(
    segments: *const NsfSegment,
    count: usize,
    time_shift: f64,
    out: *mut *mut NsfSpectrum,
) -> NsfStatus {
    guard(|| {
        if out.is_null() || (segments.is_null() && count > 0) {
            return Err(null("argument"));
        }
        let raw = if count == 0 { &[][..] } else { std::slice::from_raw_parts(segments, count) };
        let segs = raw
            .iter()
            .map(|s| {
                Segment::new(s.lo, s.hi, C64::new(s.intercept_re, s.intercept_im), C64::new(s.slope_re, s.slope_im))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(lib_err)?;
        let spec = PiecewiseSpectrum::new(segs, time_shift).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NsfSpectrum(spec)));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from [`nsf_spectrum_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nsf_spectrum_free(spec: *mut NsfSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Value at `gamma`, including the time-shift phase.
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_spectrum_eval(
    spec: *const NsfSpectrum,
    gamma: f64,
    re: *mut f64,
    im: *mut f64,
) -> NsfStatus {
    guard(|| {
        if spec.is_null() || re.is_null() || im.is_null() {
            return Err(null("argument"));
        }
        let v = (*spec).0.eval(gamma);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// `∫ f·conj(g)·e^{2πiδγ} dγ` in closed form.
///
/// # Safety
/// `f` and `g` must be live handles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_spectrum_inner_product(
    f: *const NsfSpectrum,
    g: *const NsfSpectrum,
    delta: f64,
    re: *mut f64,
    im: *mut f64,
) -> NsfStatus {
    guard(|| {
        if f.is_null() || g.is_null() || re.is_null() || im.is_null() {
            return Err(null("argument"));
        }
        let v = inner_product(&(*f).0, &(*g).0, delta);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Builds the system declared in a TOML config.
///
/// # Safety
/// `toml` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_system_from_config_toml(toml: *const c_char, out: *mut *mut NsfSystem) -> NsfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(toml, "toml")?;
        let cfg = AnalysisConfig::from_toml(text).map_err(lib_err)?;
        let sys = cfg.system.build().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NsfSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from [`nsf_system_from_config_toml`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nsf_system_free(sys: *mut NsfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Analytic frame bounds of a translate family or Gabor system.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_system_frame_bounds(sys: *const NsfSystem, out: *mut NsfBounds) -> NsfStatus {
    guard(|| {
        if sys.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let b = match &(*sys).0 {
            System::Gabor(p) => gabor_frame_bounds(p),
            other => other.family().and_then(|f| translate_frame_bounds(&f)),
        }
        .map_err(lib_err)?;
        *out = NsfBounds { lower: b.lower, upper: b.upper, is_tight: b.is_tight, is_parseval: b.is_parseval };
        Ok(())
    })
}

/// Extreme eigenvalues of the discretized frame operator on `n` cells of `(lo, hi]`.
///
/// # Safety
/// `sys` must be a live handle; `min_eig` and `max_eig` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_system_oracle_bounds(
    sys: *const NsfSystem,
    lo: f64,
    hi: f64,
    n: usize,
    min_eig: *mut f64,
    max_eig: *mut f64,
) -> NsfStatus {
    guard(|| {
        if sys.is_null() || min_eig.is_null() || max_eig.is_null() {
            return Err(null("argument"));
        }
        let fam = (*sys).0.family().map_err(lib_err)?;
        let o = discretized_frame_bounds(&fam, &Grid::new(lo, hi, n).map_err(lib_err)?).map_err(lib_err)?;
        *min_eig = o.min_eig;
        *max_eig = o.max_eig;
        Ok(())
    })
}

/// Runs a CLI command (`analyze`, `gabor`, `wavelet`, `dual`,
/// `finite-section`, `independence`) on a TOML config and returns the
/// report JSON, to be released with [`nsf_string_free`].
///
/// # Safety
/// `toml` and `command` must be nul-terminated strings; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsf_run_config(
    toml: *const c_char,
    command: *const c_char,
    out_json: *mut *mut c_char,
) -> NsfStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let text = read_str(toml, "toml")?;
        let cmd = match read_str(command, "command")? {
            "analyze" => Command::Analyze,
            "gabor" => Command::Gabor,
            "wavelet" => Command::Wavelet,
            "dual" => Command::Dual,
            "finite-section" => Command::FiniteSection,
            "independence" => Command::Independence,
            other => return Err((NsfStatus::UnknownCommand, format!("unknown command {other:?}"))),
        };
        let cfg = AnalysisConfig::from_toml(text).map_err(lib_err)?;
        let out = run(&cfg, cmd).map_err(lib_err)?;
        *out_json = CString::new(out.report.to_json()).expect("JSON has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nsf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
