//! C ABI for the opalg toolkit.
//!
//! Objects cross the boundary as opaque handles created and destroyed by
//! the `*_new`/`*_free` pairs below; every fallible call returns an
//! [`OpalgStatus`] and writes its result through out-pointers. Matrix data
//! is passed as interleaved `re, im` doubles over the matrix-unit
//! coordinates (block-major, row-major within a block). Reports cross as
//! JSON strings allocated by the library and released with
//! [`opalg_string_free`]. A thread-local message for the most recent error
//! is available via [`opalg_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use opalg::certify::{replay_quant_chain, threshold_length, threshold_nuclear, threshold_vn, Interval};
use opalg::defect::{verify_defmult, DefectOptions};
use opalg::matcore::{polar, random, AlgElement, BlockAlgebra, CVec};
use opalg::opspace::{cb_norm, LinMap};
use opalg::perturb::{recover_isomorphism, RecoverOptions};
use opalg::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OpalgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    NotInvertible = 4,
    HypothesisNotMet = 5,
    NoConvergence = 6,
    SingularStep = 7,
    Structural = 8,
    Internal = 9,
}

/// Opaque handle: a block algebra `⊕ᵢ M_{nᵢ}`.
pub struct OpalgAlgebra(BlockAlgebra);

/// Opaque handle: an element of a block algebra.
pub struct OpalgElement(AlgElement);

/// Opaque handle: a linear map between block algebras.
pub struct OpalgLinMap(LinMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> OpalgStatus {
    match err {
        Error::ShapeMismatch(_) => OpalgStatus::ShapeMismatch,
        Error::NotInvertible(_) => OpalgStatus::NotInvertible,
        Error::HypothesisNotMet { .. } => OpalgStatus::HypothesisNotMet,
        Error::NoConvergence { .. } => OpalgStatus::NoConvergence,
        Error::SingularStep { .. } => OpalgStatus::SingularStep,
        Error::InvalidArgument(_) => OpalgStatus::InvalidArgument,
        Error::Structural(_) => OpalgStatus::Structural,
        Error::Stage { source, .. } => status_of(source),
        _ => OpalgStatus::Internal,
    }
}

fn fail(err: Error) -> OpalgStatus {
    let status = status_of(&err);
    set_last_error(&err.to_string());
    status
}

/// Run a fallible body, translating errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<OpalgStatus, Error>>(f: F) -> OpalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(err)) => fail(err),
        Err(_) => {
            set_last_error("internal panic caught at the FFI boundary");
            OpalgStatus::Internal
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> OpalgStatus {
    if out.is_null() {
        set_last_error("null out-pointer");
        return OpalgStatus::NullPointer;
    }
    unsafe { out.write(value) };
    OpalgStatus::Ok
}

fn coords_from_interleaved(re_im: &[f64]) -> CVec {
    CVec::from_fn(re_im.len() / 2, |i, _| {
        Complex64::new(re_im[2 * i], re_im[2 * i + 1])
    })
}

fn json_out(value: &impl serde::Serialize, out: *mut *mut c_char) -> Result<OpalgStatus, Error> {
    let s = serde_json::to_string_pretty(value)?;
    let c = CString::new(s).map_err(|_| Error::InvalidArgument("JSON contained NUL".into()))?;
    Ok(unsafe { write_out(out, c.into_raw()) })
}

/// Version string of the library; static storage, do not free.
#[no_mangle]
pub extern "C" fn opalg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread, or NULL; free with
/// `opalg_string_free`.
#[no_mangle]
pub extern "C" fn opalg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by an opalg function, not yet
/// freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn opalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

/// Create the block algebra with the given block sizes.
///
/// # Safety
/// `dims` must point to `len` readable `usize` values; `out` must be a valid
/// out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_algebra_new(
    dims: *const usize,
    len: usize,
    out: *mut *mut OpalgAlgebra,
) -> OpalgStatus {
    guarded(|| {
        if dims.is_null() {
            set_last_error("null dims pointer");
            return Ok(OpalgStatus::NullPointer);
        }
        let dims = unsafe { std::slice::from_raw_parts(dims, len) }.to_vec();
        let alg = BlockAlgebra::new(dims)?;
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgAlgebra(alg)))) })
    })
}

/// Coordinate dimension `Σᵢ nᵢ²`.
///
/// # Safety
/// `alg` must be a live handle from `opalg_algebra_new`.
#[no_mangle]
pub unsafe extern "C" fn opalg_algebra_coord_dim(
    alg: *const OpalgAlgebra,
    out: *mut usize,
) -> OpalgStatus {
    guarded(|| {
        let Some(alg) = (unsafe { alg.as_ref() }) else {
            set_last_error("null algebra handle");
            return Ok(OpalgStatus::NullPointer);
        };
        Ok(unsafe { write_out(out, alg.0.coord_dim()) })
    })
}

/// # Safety
/// `alg` must be a live handle, not freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn opalg_algebra_free(alg: *mut OpalgAlgebra) {
    if !alg.is_null() {
        drop(unsafe { Box::from_raw(alg) });
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Create an element from `2·coord_dim` interleaved `re, im` doubles.
///
/// # Safety
/// `re_im` must point to `len` readable doubles; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn opalg_element_new(
    alg: *const OpalgAlgebra,
    re_im: *const f64,
    len: usize,
    out: *mut *mut OpalgElement,
) -> OpalgStatus {
    guarded(|| {
        let Some(alg) = (unsafe { alg.as_ref() }) else {
            set_last_error("null algebra handle");
            return Ok(OpalgStatus::NullPointer);
        };
        if re_im.is_null() {
            set_last_error("null data pointer");
            return Ok(OpalgStatus::NullPointer);
        }
        if len != 2 * alg.0.coord_dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} interleaved doubles, got {len}",
                2 * alg.0.coord_dim()
            )));
        }
        let data = unsafe { std::slice::from_raw_parts(re_im, len) };
        let el = AlgElement::from_coords(&alg.0, &coords_from_interleaved(data))?;
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgElement(el)))) })
    })
}

/// Haar-random unitary, deterministic in the seed.
///
/// # Safety
/// Handles must be live; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_random_unitary(
    alg: *const OpalgAlgebra,
    seed: u64,
    out: *mut *mut OpalgElement,
) -> OpalgStatus {
    guarded(|| {
        let Some(alg) = (unsafe { alg.as_ref() }) else {
            set_last_error("null algebra handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let el = random::random_unitary_from_seed(&alg.0, seed);
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgElement(el)))) })
    })
}

/// Copy the element's coordinates out as interleaved `re, im` doubles.
///
/// # Safety
/// `buf` must point to `len` writable doubles; `el` must be live.
#[no_mangle]
pub unsafe extern "C" fn opalg_element_coords(
    el: *const OpalgElement,
    buf: *mut f64,
    len: usize,
) -> OpalgStatus {
    guarded(|| {
        let Some(el) = (unsafe { el.as_ref() }) else {
            set_last_error("null element handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let coords = el.0.to_coords();
        if buf.is_null() {
            set_last_error("null buffer");
            return Ok(OpalgStatus::NullPointer);
        }
        if len != 2 * coords.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected buffer of {} doubles, got {len}",
                2 * coords.len()
            )));
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(buf, len) };
        for (i, z) in coords.iter().enumerate() {
            slice[2 * i] = z.re;
            slice[2 * i + 1] = z.im;
        }
        Ok(OpalgStatus::Ok)
    })
}

/// Ambient operator norm.
///
/// # Safety
/// `el` must be live; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_element_op_norm(
    el: *const OpalgElement,
    out: *mut f64,
) -> OpalgStatus {
    guarded(|| {
        let Some(el) = (unsafe { el.as_ref() }) else {
            set_last_error("null element handle");
            return Ok(OpalgStatus::NullPointer);
        };
        Ok(unsafe { write_out(out, el.0.op_norm()) })
    })
}

/// Distance from an invertible element to the unitary group.
///
/// # Safety
/// `el` must be live; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_element_polar_distance(
    el: *const OpalgElement,
    out: *mut f64,
) -> OpalgStatus {
    guarded(|| {
        let Some(el) = (unsafe { el.as_ref() }) else {
            set_last_error("null element handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let p = polar(&el.0)?;
        Ok(unsafe { write_out(out, p.distance_to_unitary) })
    })
}

/// # Safety
/// `el` must be a live handle, not freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn opalg_element_free(el: *mut OpalgElement) {
    if !el.is_null() {
        drop(unsafe { Box::from_raw(el) });
    }
}

// ---------------------------------------------------------------------------
// Linear maps
// ---------------------------------------------------------------------------

/// Create a linear map from `2·(dim_cod·dim_dom)` interleaved doubles,
/// row-major over the matrix-unit coordinates.
///
/// # Safety
/// `re_im` must point to `len` readable doubles; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_new(
    domain: *const OpalgAlgebra,
    codomain: *const OpalgAlgebra,
    re_im: *const f64,
    len: usize,
    out: *mut *mut OpalgLinMap,
) -> OpalgStatus {
    guarded(|| {
        let (Some(dom), Some(cod)) = (unsafe { domain.as_ref() }, unsafe { codomain.as_ref() })
        else {
            set_last_error("null algebra handle");
            return Ok(OpalgStatus::NullPointer);
        };
        if re_im.is_null() {
            set_last_error("null data pointer");
            return Ok(OpalgStatus::NullPointer);
        }
        let (da, db) = (dom.0.coord_dim(), cod.0.coord_dim());
        if len != 2 * da * db {
            return Err(Error::ShapeMismatch(format!(
                "expected {} interleaved doubles, got {len}",
                2 * da * db
            )));
        }
        let data = unsafe { std::slice::from_raw_parts(re_im, len) };
        let matrix = opalg::matcore::CMat::from_fn(db, da, |r, c| {
            let i = r * da + c;
            Complex64::new(data[2 * i], data[2 * i + 1])
        });
        let map = LinMap::new(dom.0.clone(), cod.0.clone(), matrix)?;
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgLinMap(map)))) })
    })
}

/// The identity map on an algebra.
///
/// # Safety
/// `alg` must be live; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_identity(
    alg: *const OpalgAlgebra,
    out: *mut *mut OpalgLinMap,
) -> OpalgStatus {
    guarded(|| {
        let Some(alg) = (unsafe { alg.as_ref() }) else {
            set_last_error("null algebra handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let map = LinMap::identity(&alg.0);
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgLinMap(map)))) })
    })
}

/// Apply a map to an element; the result is a new element handle.
///
/// # Safety
/// Handles must be live; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_apply(
    map: *const OpalgLinMap,
    el: *const OpalgElement,
    out: *mut *mut OpalgElement,
) -> OpalgStatus {
    guarded(|| {
        let (Some(map), Some(el)) = (unsafe { map.as_ref() }, unsafe { el.as_ref() }) else {
            set_last_error("null handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let img = map.0.apply(&el.0)?;
        Ok(unsafe { write_out(out, Box::into_raw(Box::new(OpalgElement(img)))) })
    })
}

/// cb-norm estimate: writes the certified lower bound and the reported
/// value.
///
/// # Safety
/// `map` must be live; out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_cb_norm(
    map: *const OpalgLinMap,
    restarts: usize,
    seed: u64,
    lower: *mut f64,
    value: *mut f64,
) -> OpalgStatus {
    guarded(|| {
        let Some(map) = (unsafe { map.as_ref() }) else {
            set_last_error("null map handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let est = cb_norm(&map.0, restarts, seed)?;
        let s = unsafe { write_out(lower, est.lower) };
        if s != OpalgStatus::Ok {
            return Ok(s);
        }
        Ok(unsafe { write_out(value, est.value) })
    })
}

/// μ of a map (requires the cb-norm product below √2).
///
/// # Safety
/// `map` must be live; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_mu(
    map: *const OpalgLinMap,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> OpalgStatus {
    guarded(|| {
        let Some(map) = (unsafe { map.as_ref() }) else {
            set_last_error("null map handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let opts = DefectOptions {
            restarts,
            seed,
            ..Default::default()
        };
        let mu = opalg::defect::mu(&map.0, &opts)?;
        Ok(unsafe { write_out(out, mu) })
    })
}

/// Full defect report (norms, μ, both bounds, flags) as JSON.
///
/// # Safety
/// `map` must be live; `out_json` a valid out-pointer; free the string with
/// `opalg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn opalg_defect_report_json(
    map: *const OpalgLinMap,
    restarts: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> OpalgStatus {
    guarded(|| {
        let Some(map) = (unsafe { map.as_ref() }) else {
            set_last_error("null map handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let opts = DefectOptions {
            restarts,
            seed,
            ..Default::default()
        };
        let report = verify_defmult(&map.0, &opts)?;
        json_out(&report, out_json)
    })
}

/// Run the recovery pipeline; the report (residuals, trace, distances)
/// crosses as JSON.
///
/// # Safety
/// `map` must be live; `out_json` a valid out-pointer; free the string with
/// `opalg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn opalg_recover_report_json(
    map: *const OpalgLinMap,
    restarts: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> OpalgStatus {
    guarded(|| {
        let Some(map) = (unsafe { map.as_ref() }) else {
            set_last_error("null map handle");
            return Ok(OpalgStatus::NullPointer);
        };
        let opts = RecoverOptions {
            restarts,
            seed,
            ..Default::default()
        };
        let (_, report) = recover_isomorphism(&map.0, &opts)?;
        json_out(&report, out_json)
    })
}

/// # Safety
/// `map` must be a live handle, not freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn opalg_linmap_free(map: *mut OpalgLinMap) {
    if !map.is_null() {
        drop(unsafe { Box::from_raw(map) });
    }
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// Interval replay of the quantitative constant chain at δ, as JSON.
///
/// # Safety
/// `out_json` must be a valid out-pointer; free the string with
/// `opalg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn opalg_quant_chain_json(
    delta: f64,
    out_json: *mut *mut c_char,
) -> OpalgStatus {
    guarded(|| {
        if !delta.is_finite() {
            return Err(Error::InvalidArgument("delta must be finite".into()));
        }
        let report = replay_quant_chain(Interval::point(delta).widen_ulps(1));
        json_out(&report, out_json)
    })
}

/// The nuclear-stability threshold ledger as JSON.
///
/// # Safety
/// `out_json` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_threshold_nuclear_json(out_json: *mut *mut c_char) -> OpalgStatus {
    guarded(|| json_out(&threshold_nuclear(), out_json))
}

/// The von Neumann threshold ledger (including the flagged discrepancy) as
/// JSON.
///
/// # Safety
/// `out_json` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_threshold_vn_json(out_json: *mut *mut c_char) -> OpalgStatus {
    guarded(|| json_out(&threshold_vn(), out_json))
}

/// The length-stability gate at `(ℓ, K)` as JSON.
///
/// # Safety
/// `out_json` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn opalg_threshold_length_json(
    ell: u32,
    k: u32,
    out_json: *mut *mut c_char,
) -> OpalgStatus {
    guarded(|| {
        let report = threshold_length(ell, k)?;
        json_out(&report, out_json)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_and_element_round_trip() {
        unsafe {
            let dims = [2usize, 3];
            let mut alg: *mut OpalgAlgebra = std::ptr::null_mut();
            assert_eq!(opalg_algebra_new(dims.as_ptr(), 2, &mut alg), OpalgStatus::Ok);
            let mut d = 0usize;
            assert_eq!(opalg_algebra_coord_dim(alg, &mut d), OpalgStatus::Ok);
            assert_eq!(d, 13);

            let mut u: *mut OpalgElement = std::ptr::null_mut();
            assert_eq!(opalg_random_unitary(alg, 7, &mut u), OpalgStatus::Ok);
            let mut norm = 0.0;
            assert_eq!(opalg_element_op_norm(u, &mut norm), OpalgStatus::Ok);
            assert!((norm - 1.0).abs() < 1e-12);

            let mut dist = -1.0;
            assert_eq!(opalg_element_polar_distance(u, &mut dist), OpalgStatus::Ok);
            assert!(dist < 1e-9);

            let mut buf = vec![0.0f64; 2 * d];
            assert_eq!(opalg_element_coords(u, buf.as_mut_ptr(), buf.len()), OpalgStatus::Ok);
            let mut u2: *mut OpalgElement = std::ptr::null_mut();
            assert_eq!(opalg_element_new(alg, buf.as_ptr(), buf.len(), &mut u2), OpalgStatus::Ok);
            let mut norm2 = 0.0;
            assert_eq!(opalg_element_op_norm(u2, &mut norm2), OpalgStatus::Ok);
            assert_eq!(norm, norm2);

            opalg_element_free(u);
            opalg_element_free(u2);
            opalg_algebra_free(alg);
        }
    }

    #[test]
    fn error_paths_set_status_and_message() {
        unsafe {
            let dims = [2usize, 0];
            let mut alg: *mut OpalgAlgebra = std::ptr::null_mut();
            assert_eq!(
                opalg_algebra_new(dims.as_ptr(), 2, &mut alg),
                OpalgStatus::InvalidArgument
            );
            let msg = opalg_last_error_message();
            assert!(!msg.is_null());
            opalg_string_free(msg);

            // singular element has no polar distance
            let dims = [2usize];
            let mut alg: *mut OpalgAlgebra = std::ptr::null_mut();
            assert_eq!(opalg_algebra_new(dims.as_ptr(), 1, &mut alg), OpalgStatus::Ok);
            let zero = [0.0f64; 8];
            let mut el: *mut OpalgElement = std::ptr::null_mut();
            assert_eq!(opalg_element_new(alg, zero.as_ptr(), 8, &mut el), OpalgStatus::Ok);
            let mut dist = 0.0;
            assert_eq!(
                opalg_element_polar_distance(el, &mut dist),
                OpalgStatus::NotInvertible
            );
            opalg_element_free(el);
            opalg_algebra_free(alg);

            assert_eq!(opalg_element_op_norm(std::ptr::null(), &mut dist), OpalgStatus::NullPointer);
        }
    }

    #[test]
    fn cb_norm_of_identity_via_ffi() {
        unsafe {
            let dims = [2usize];
            let mut alg: *mut OpalgAlgebra = std::ptr::null_mut();
            assert_eq!(opalg_algebra_new(dims.as_ptr(), 1, &mut alg), OpalgStatus::Ok);
            let mut id: *mut OpalgLinMap = std::ptr::null_mut();
            assert_eq!(opalg_linmap_identity(alg, &mut id), OpalgStatus::Ok);
            let (mut lo, mut val) = (0.0, 0.0);
            assert_eq!(opalg_linmap_cb_norm(id, 4, 1, &mut lo, &mut val), OpalgStatus::Ok);
            assert!((val - 1.0).abs() < 1e-9);
            assert!(lo <= val);
            let mut mu = -1.0;
            assert_eq!(opalg_linmap_mu(id, 4, 1, &mut mu), OpalgStatus::Ok);
            assert!(mu.abs() < 1e-9);
            opalg_linmap_free(id);
            opalg_algebra_free(alg);
        }
    }

    #[test]
    fn chain_reports_cross_as_json() {
        unsafe {
            let mut s: *mut c_char = std::ptr::null_mut();
            assert_eq!(opalg_quant_chain_json(1e-8, &mut s), OpalgStatus::Ok);
            let text = std::ffi::CStr::from_ptr(s).to_str().unwrap().to_string();
            opalg_string_free(s);
            assert!(text.contains("mu-s"));
            assert!(text.contains("violated"));

            let mut s: *mut c_char = std::ptr::null_mut();
            assert_eq!(opalg_threshold_nuclear_json(&mut s), OpalgStatus::Ok);
            let text = std::ffi::CStr::from_ptr(s).to_str().unwrap().to_string();
            opalg_string_free(s);
            assert!(text.contains("nuclear-threshold"));

            let mut s: *mut c_char = std::ptr::null_mut();
            assert_eq!(opalg_threshold_length_json(0, 1, &mut s), OpalgStatus::InvalidArgument);
        }
    }
}
