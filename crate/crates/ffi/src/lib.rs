//! C ABI over `hurwitz_frobenius`.
//!
//! Every function returns an [`HfStatus`]; results go through out-pointers.
//! Coverings are opaque handles released with [`hf_covering_free`]. The message
//! of the last failure on the calling thread is available from
//! [`hf_last_error_message`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use hurwitz_frobenius::cauchy::DerivativeEngine;
use hurwitz_frobenius::frobenius::{flat_coordinates, Kind, StructureKind};
use hurwitz_frobenius::prepotential::{eval_f, eval_g, GVariant, PrepotentialPoint};
use hurwitz_frobenius::torus_cover::{covering_from_branch_points, BranchTriple, TorusCovering};
use hurwitz_frobenius::wdvv::wdvv_residual;
use hurwitz_frobenius::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precision = 3,
    Pole = 4,
    Degeneracy = 5,
    Conditioning = 6,
    Usage = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for HfComplex {
    fn from(z: C64) -> Self {
        HfComplex { re: z.re, im: z.im }
    }
}

impl From<HfComplex> for C64 {
    fn from(z: HfComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Structure selector: 0 holo-s, 1 double-s, 2 double-t, 3 double-combo.
pub type HfKind = u32;

/// Opaque covering handle.
pub struct HfCovering {
    cov: TorusCovering,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> HfStatus {
    match e {
        Error::Domain(_) => HfStatus::Domain,
        Error::Precision(_) => HfStatus::Precision,
        Error::Pole(_) => HfStatus::Pole,
        Error::Degeneracy(_) => HfStatus::Degeneracy,
        Error::Conditioning(_) => HfStatus::Conditioning,
        Error::Usage(_) => HfStatus::Usage,
    }
}

fn guard<F>(f: F) -> HfStatus
where
    F: FnOnce() -> Result<(), HfStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside the library".into());
            HfStatus::Panic
        }
    }
}

fn lift<T>(r: hurwitz_frobenius::Result<T>) -> Result<T, HfStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn structure(kind: HfKind, sigma: HfComplex) -> Result<StructureKind, HfStatus> {
    let k = match kind {
        0 => Kind::HoloS,
        1 => Kind::DoubleS,
        2 => Kind::DoubleT,
        3 => Kind::DoubleCombo,
        other => {
            set_error(format!("unknown kind {other}"));
            return Err(HfStatus::Usage);
        }
    };
    lift(StructureKind::new(k, sigma.into()))
}

fn non_null<T>(p: *const T) -> Result<(), HfStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        Err(HfStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// # Safety
/// `t` must point to `n` readable values.
unsafe fn point(t: *const HfComplex, n: usize) -> Result<Vec<C64>, HfStatus> {
    non_null(t)?;
    Ok(std::slice::from_raw_parts(t, n).iter().map(|z| C64::from(*z)).collect())
}

/// Build the covering for three branch points.
///
/// # Safety
/// `lambda` must point to 3 values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_covering_new(lambda: *const HfComplex, out: *mut *mut HfCovering) -> HfStatus {
    guard(|| {
        non_null(lambda)?;
        non_null(out)?;
        let l = std::slice::from_raw_parts(lambda, 3);
        let b = lift(BranchTriple::new([l[0].into(), l[1].into(), l[2].into()]))?;
        let cov = lift(covering_from_branch_points(&b))?;
        *out = Box::into_raw(Box::new(HfCovering { cov }));
        Ok(())
    })
}

/// Release a covering; null is ignored.
///
/// # Safety
/// `h` must come from [`hf_covering_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hf_covering_free(h: *mut HfCovering) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Modulus `mu = omega' / omega` and the half-period `omega`.
///
/// # Safety
/// `h` must be a live handle; `mu` and `omega` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_covering_periods(h: *const HfCovering, mu: *mut HfComplex, omega: *mut HfComplex) -> HfStatus {
    guard(|| {
        non_null(h)?;
        non_null(mu)?;
        non_null(omega)?;
        let cov = &(*h).cov;
        *mu = cov.mu.value().into();
        *omega = cov.omega.into();
        Ok(())
    })
}

/// Flat coordinates of the covering's real double; writes `dim` values (3 or 6) into `out`.
///
/// # Safety
/// `h` live; `out` has room for `cap` values; `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_flat_coordinates(
    h: *const HfCovering,
    kind: HfKind,
    sigma: HfComplex,
    out: *mut HfComplex,
    cap: usize,
    dim: *mut usize,
) -> HfStatus {
    guard(|| {
        non_null(h)?;
        non_null(out)?;
        non_null(dim)?;
        let k = structure(kind, sigma)?;
        let t = lift(flat_coordinates(&(*h).cov, &k))?.t;
        *dim = t.len();
        if cap < t.len() {
            set_error(format!("output buffer holds {cap}, need {}", t.len()));
            return Err(HfStatus::BufferTooSmall);
        }
        for (k, v) in t.iter().enumerate() {
            *out.add(k) = (*v).into();
        }
        Ok(())
    })
}

/// Prepotential at `n` flat coordinates.
///
/// # Safety
/// `t` points to `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_eval_f(kind: HfKind, sigma: HfComplex, t: *const HfComplex, n: usize, out: *mut HfComplex) -> HfStatus {
    guard(|| {
        non_null(out)?;
        let k = structure(kind, sigma)?;
        let t = point(t, n)?;
        *out = lift(eval_f(&k, &t))?.into();
        Ok(())
    })
}

/// G-function; `three_quarter_exponent != 0` selects `t6^{-3/4}` for double-t.
///
/// # Safety
/// `t` points to `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_eval_g(
    kind: HfKind,
    sigma: HfComplex,
    t: *const HfComplex,
    n: usize,
    three_quarter_exponent: i32,
    out: *mut HfComplex,
) -> HfStatus {
    guard(|| {
        non_null(out)?;
        let k = structure(kind, sigma)?;
        let t = point(t, n)?;
        let v = if three_quarter_exponent != 0 { GVariant::ThreeQuarterPower } else { GVariant::HalfPower };
        *out = lift(eval_g(&k, &t, v))?.into();
        Ok(())
    })
}

/// WDVV residual at a point with the default derivative engine.
///
/// # Safety
/// `t` points to `n` values; `residual` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_wdvv_residual(
    kind: HfKind,
    sigma: HfComplex,
    t: *const HfComplex,
    n: usize,
    residual: *mut f64,
) -> HfStatus {
    guard(|| {
        non_null(residual)?;
        let k = structure(kind, sigma)?;
        let p = PrepotentialPoint::new(point(t, n)?);
        let rep = lift(wdvv_residual(&k, &p, &DerivativeEngine::default()))?;
        *residual = rep.residuals.get("wdvv").copied().unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Copy the last error message of this thread, NUL-terminated and truncated to `len`.
/// Returns the full message length in bytes.
///
/// # Safety
/// `buf` has room for `len` bytes (may be null when `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn hf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
