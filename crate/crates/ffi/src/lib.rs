//! C ABI for `simplicial-spectra`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns an [`SsStatus`]; on failure the message is
//! kept per thread and read back with [`ss_last_error`].
//!
//! Array outputs follow one convention: the caller passes a buffer and its
//! capacity, the library always writes the required length to `len_out`,
//! and returns `SS_BUFFER_TOO_SMALL` without touching the buffer when it
//! does not fit. Pass a null buffer to query the length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use simplicial_spectra::complex::Complex;
use simplicial_spectra::decimation::{limit_quantile_cd, predicted_spectrum_adjacency, renormalize};
use simplicial_spectra::schreier::build_schreier;
use simplicial_spectra::spectral::{eigenvalues_int, l1_distance, ratio_f64, top_quantile, StepFunction};
use simplicial_spectra::subdivide::{iterate, Kind};
use simplicial_spectra::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsStatus {
    SsOk = 0,
    SsNullPointer = 1,
    SsInvalidArgument = 2,
    SsInvalidComplex = 3,
    SsUnsupported = 4,
    SsSingular = 5,
    SsBudget = 6,
    SsInvariant = 7,
    SsOverflow = 8,
    SsBufferTooSmall = 9,
    SsPanic = 10,
}

/// Subdivision kinds. `SS_EDGEWISE` takes the parameter `r`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsKind {
    SsCone = 0,
    SsBarycentric = 1,
    SsEdgewise = 2,
}

/// A simplicial complex.
pub struct SsComplex(Complex);

/// A quantile function on `[0, 1]`.
pub struct SsStepFunction(StepFunction);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::InvalidComplex(_) | Error::NotPure | Error::InvalidGluing(_) => SsStatus::SsInvalidComplex,
        Error::DimOutOfRange { .. } | Error::InvalidArgument(_) | Error::NotSymmetric(_) => SsStatus::SsInvalidArgument,
        Error::Unsupported(_) => SsStatus::SsUnsupported,
        Error::Singular(_) => SsStatus::SsSingular,
        Error::Budget { .. } => SsStatus::SsBudget,
        Error::Invariant(_) => SsStatus::SsInvariant,
        Error::Overflow => SsStatus::SsOverflow,
    }
}

struct Fail(SsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SsStatus::SsNullPointer, format!("{what} is null"))
}

/// Runs `f`, recording its error and containing panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SsStatus::SsOk
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SsStatus::SsPanic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Moves `value` into a new handle, checking `out` first so nothing leaks.
unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Copies `items` out through the buffer convention described at the top.
unsafe fn fill<T: Copy>(items: &[T], buf: *mut T, cap: usize, len_out: *mut usize) -> Result<(), Fail> {
    put(len_out, items.len(), "len_out")?;
    if buf.is_null() || cap < items.len() {
        if buf.is_null() && cap == 0 {
            return Ok(());
        }
        return Err(Fail(SsStatus::SsBufferTooSmall, format!("need {} entries, have {cap}", items.len())));
    }
    std::ptr::copy_nonoverlapping(items.as_ptr(), buf, items.len());
    Ok(())
}

fn kind_of(kind: SsKind, r: u32) -> Kind {
    match kind {
        SsKind::SsCone => Kind::Cone,
        SsKind::SsBarycentric => Kind::Barycentric,
        SsKind::SsEdgewise => Kind::Edgewise(r),
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`) and returns its full length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ss_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Builds a complex from `n_facets` facets of `facet_size` vertices each,
/// stored row by row in `vertices`.
///
/// # Safety
/// `vertices` must point to `n_facets * facet_size` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_new(
    vertices: *const u32,
    n_facets: usize,
    facet_size: usize,
    out: *mut *mut SsComplex,
) -> SsStatus {
    guard(|| {
        if vertices.is_null() {
            return Err(null("vertices"));
        }
        let total = n_facets.checked_mul(facet_size).ok_or(Error::Overflow)?;
        let flat = std::slice::from_raw_parts(vertices, total);
        let facets: Vec<&[u32]> = flat.chunks(facet_size.max(1)).collect();
        let k = Complex::from_facets(&facets)?;
        put_handle(out, SsComplex(k))
    })
}

/// Parses `{"facets": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_from_json(json: *const c_char, out: *mut *mut SsComplex) -> SsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(SsStatus::SsInvalidArgument, e.to_string()))?;
        let k = Complex::from_json(s)?;
        put_handle(out, SsComplex(k))
    })
}

/// # Safety
/// `c` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_free(c: *mut SsComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_dim(c: *const SsComplex, out: *mut usize) -> SsStatus {
    guard(|| put(out, get(c, "complex")?.0.dim(), "out"))
}

/// Face counts by dimension.
///
/// # Safety
/// `c` must be a live handle; see the buffer convention for the rest.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_f_vector(
    c: *const SsComplex,
    buf: *mut usize,
    cap: usize,
    len_out: *mut usize,
) -> SsStatus {
    guard(|| fill(&get(c, "complex")?.0.f_vector(), buf, cap, len_out))
}

/// Applies the subdivision `n` times.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_subdivide(
    c: *const SsComplex,
    kind: SsKind,
    r: u32,
    n: usize,
    out: *mut *mut SsComplex,
) -> SsStatus {
    guard(|| {
        let k = iterate(kind_of(kind, r), &get(c, "complex")?.0, n)?.pop().expect("level 0");
        put_handle(out, SsComplex(k))
    })
}

/// Quantile function of the top-dimensional Laplacian spectrum.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_complex_top_quantile(c: *const SsComplex, out: *mut *mut SsStepFunction) -> SsStatus {
    guard(|| {
        let f = top_quantile(&get(c, "complex")?.0)?;
        put_handle(out, SsStepFunction(f))
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_step_function_free(f: *mut SsStepFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of steps.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_step_function_len(f: *const SsStepFunction, out: *mut usize) -> SsStatus {
    guard(|| put(out, get(f, "step function")?.0.len(), "out"))
}

/// Step endpoints and values. All three buffers share `cap`; the length is
/// written to `len_out`.
///
/// # Safety
/// `f` must be a live handle; each buffer must be null or hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn ss_step_function_steps(
    f: *const SsStepFunction,
    left: *mut f64,
    right: *mut f64,
    value: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> SsStatus {
    guard(|| {
        let steps: Vec<(f64, f64, f64)> =
            get(f, "step function")?.0.steps().map(|(l, r, v)| (ratio_f64(l), ratio_f64(r), v)).collect();
        fill(&steps.iter().map(|s| s.0).collect::<Vec<_>>(), left, cap, len_out)?;
        fill(&steps.iter().map(|s| s.1).collect::<Vec<_>>(), right, cap, len_out)?;
        fill(&steps.iter().map(|s| s.2).collect::<Vec<_>>(), value, cap, len_out)
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_step_function_eval(f: *const SsStepFunction, x: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        if !(0.0..=1.0).contains(&x) {
            return Err(Fail(SsStatus::SsInvalidArgument, format!("x = {x} outside [0, 1]")));
        }
        put(out, get(f, "step function")?.0.eval(x), "out")
    })
}

/// L1 distance on `[0, 1]` with exact breakpoints.
///
/// # Safety
/// `f` and `g` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_l1_distance(f: *const SsStepFunction, g: *const SsStepFunction, out: *mut f64) -> SsStatus {
    guard(|| put(out, l1_distance(&get(f, "f")?.0, &get(g, "g")?.0)?, "out"))
}

/// Limit quantile function for cone subdivision of the d-simplex, truncated
/// at `depth` and rescaled to `[0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_limit_quantile_cd(d: usize, depth: usize, out: *mut *mut SsStepFunction) -> SsStatus {
    guard(|| {
        let q = limit_quantile_cd(d, depth)?;
        put_handle(out, SsStepFunction(q.normalized))
    })
}

/// Adjacency eigenvalues of the level-n Schreier graph, ascending.
///
/// # Safety
/// See the buffer convention.
#[no_mangle]
pub unsafe extern "C" fn ss_schreier_spectrum(
    d: usize,
    n: usize,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> SsStatus {
    guard(|| fill(&eigenvalues_int(&build_schreier(d, n)?.dense())?, buf, cap, len_out))
}

/// Predicted distinct adjacency eigenvalues with multiplicities. Both
/// buffers share `cap`.
///
/// # Safety
/// See the buffer convention.
#[no_mangle]
pub unsafe extern "C" fn ss_predicted_spectrum(
    d: usize,
    n: usize,
    values: *mut f64,
    multiplicities: *mut u64,
    cap: usize,
    len_out: *mut usize,
) -> SsStatus {
    guard(|| {
        let pred = predicted_spectrum_adjacency(d, n)?;
        let mult: Vec<u64> = pred
            .iter()
            .map(|p| u64::try_from(p.1).map_err(|_| Fail(SsStatus::SsOverflow, "multiplicity exceeds u64".into())))
            .collect::<Result<_, _>>()?;
        fill(&pred.iter().map(|p| p.0).collect::<Vec<_>>(), values, cap, len_out)?;
        fill(&mult, multiplicities, cap, len_out)
    })
}

/// One step of the two-parameter renormalization map.
///
/// # Safety
/// `mu_out` and `lambda_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_renormalize(
    d: usize,
    mu: f64,
    lambda: f64,
    mu_out: *mut f64,
    lambda_out: *mut f64,
) -> SsStatus {
    guard(|| {
        if mu_out.is_null() || lambda_out.is_null() {
            return Err(null("output"));
        }
        let (m, l) = renormalize(d, mu, lambda)?;
        put(mu_out, m, "mu_out")?;
        put(lambda_out, l, "lambda_out")
    })
}
