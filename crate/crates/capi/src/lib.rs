//! C ABI for the biharmonic reflection library.
//!
//! Handles are opaque heap pointers created and freed by this library; every
//! fallible call returns a [`BrStatus`] and writes results through out
//! pointers. The header is generated by cbindgen at build time into
//! `include/biharmonic_reflect.h`.

use biharmonic_reflect::curve::BivariatePoly;
use biharmonic_reflect::goursat::{AnalyticTerm, TermKind};
use biharmonic_reflect::{
    reflection, BiharmonicField, BoundaryCase, Curve, Error, Point, QuadratureSpec, C,
};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    BrOk = 0,
    BrErrNullPointer = 1,
    BrErrInvalidArgument = 2,
    BrErrNonConvergence = 3,
    BrErrOutsideValidity = 4,
    BrErrDerivativeSingular = 5,
    BrErrDomainViolation = 6,
    BrErrNotOnCurve = 7,
    BrErrUnsupported = 8,
    BrErrSingularArgument = 9,
    BrErrNotConverged = 10,
    BrErrQuadratureFailure = 11,
    BrErrBranchCutCrossing = 12,
    BrErrInternal = 13,
}

/// Boundary-condition pairs: I `u=∂ₙu=0`, II `u=Δu=0`, III `u=∂ₙΔu=0`,
/// IV `∂ₙu=Δu=0`, V `∂ₙu=∂ₙΔu=0`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrBoundaryCase {
    BrCaseI = 1,
    BrCaseII = 2,
    BrCaseIII = 3,
    BrCaseIV = 4,
    BrCaseV = 5,
}

impl From<BrBoundaryCase> for BoundaryCase {
    fn from(c: BrBoundaryCase) -> BoundaryCase {
        match c {
            BrBoundaryCase::BrCaseI => BoundaryCase::I,
            BrBoundaryCase::BrCaseII => BoundaryCase::II,
            BrBoundaryCase::BrCaseIII => BoundaryCase::III,
            BrBoundaryCase::BrCaseIV => BoundaryCase::IV,
            BrBoundaryCase::BrCaseV => BoundaryCase::V,
        }
    }
}

fn status_of(e: &Error) -> BrStatus {
    match e {
        Error::NonConvergence(_) => BrStatus::BrErrNonConvergence,
        Error::OutsideValidity(_) => BrStatus::BrErrOutsideValidity,
        Error::DerivativeSingular => BrStatus::BrErrDerivativeSingular,
        Error::DomainViolation(_) => BrStatus::BrErrDomainViolation,
        Error::NotOnCurve => BrStatus::BrErrNotOnCurve,
        Error::Unsupported(_) => BrStatus::BrErrUnsupported,
        Error::SingularArgument => BrStatus::BrErrSingularArgument,
        Error::NotConverged { .. } => BrStatus::BrErrNotConverged,
        Error::QuadratureFailure(_) => BrStatus::BrErrQuadratureFailure,
        Error::BranchCutCrossing => BrStatus::BrErrBranchCutCrossing,
        Error::EmptyNullSpace | Error::Config(_) => BrStatus::BrErrInvalidArgument,
        Error::Internal(_) | Error::Io(_) => BrStatus::BrErrInternal,
    }
}

/// An analytic curve handle.
pub struct BrCurve {
    inner: Curve,
}

/// A biharmonic field handle.
pub struct BrField {
    inner: BiharmonicField,
}

/// Continuation output: the continued value and its decomposition.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BrContinuation {
    pub value: f64,
    pub point_term: f64,
    pub correction: f64,
    pub quadrature_error_estimate: f64,
    pub truncation_k_used: usize,
}

fn guard<F: FnOnce() -> BrStatus>(f: F) -> BrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => BrStatus::BrErrInternal,
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn br_curve_new_line(out: *mut *mut BrCurve) -> BrStatus {
    if out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    *out = Box::into_raw(Box::new(BrCurve {
        inner: Curve::LineY0,
    }));
    BrStatus::BrOk
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn br_curve_new_circle(radius: f64, out: *mut *mut BrCurve) -> BrStatus {
    if out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    match Curve::circle(radius) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(BrCurve { inner: c }));
            BrStatus::BrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Implicit algebraic curve `Σ coeffs[t]·x^powers[2t]·y^powers[2t+1] = 0`
/// with a reference point on the curve.
///
/// # Safety
/// `powers` must hold `2·n_terms` entries, `coeffs` must hold `n_terms`,
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn br_curve_new_implicit(
    powers: *const u32,
    coeffs: *const f64,
    n_terms: usize,
    ref_x: f64,
    ref_y: f64,
    out: *mut *mut BrCurve,
) -> BrStatus {
    if powers.is_null() || coeffs.is_null() || out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    let powers = std::slice::from_raw_parts(powers, 2 * n_terms);
    let coeffs = std::slice::from_raw_parts(coeffs, n_terms);
    let terms: Vec<(u32, u32, f64)> = (0..n_terms)
        .map(|t| (powers[2 * t], powers[2 * t + 1], coeffs[t]))
        .collect();
    match Curve::implicit(BivariatePoly::new(terms), Point::new(ref_x, ref_y)) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(BrCurve { inner: c }));
            BrStatus::BrOk
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `curve` must be a pointer from a `br_curve_new_*` call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_curve_free(curve: *mut BrCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Reflects `(x, y)` across the curve; writes the image point.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_curve_reflect(
    curve: *const BrCurve,
    x: f64,
    y: f64,
    out_x: *mut f64,
    out_y: *mut f64,
) -> BrStatus {
    if curve.is_null() || out_x.is_null() || out_y.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    guard(|| match (*curve).inner.reflect_point(Point::new(x, y)) {
        Ok(r) => {
            *out_x = r.image.x;
            *out_y = r.image.y;
            BrStatus::BrOk
        }
        Err(e) => status_of(&e),
    })
}

/// `order`-th derivative of the Schwarz function at `z = re + i·im`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_curve_schwarz(
    curve: *const BrCurve,
    re: f64,
    im: f64,
    order: u32,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BrStatus {
    if curve.is_null() || out_re.is_null() || out_im.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    guard(
        || match (*curve).inner.schwarz(C::new(re, im), order as usize) {
            Ok(v) => {
                *out_re = v.re;
                *out_im = v.im;
                BrStatus::BrOk
            }
            Err(e) => status_of(&e),
        },
    )
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn br_field_new(out: *mut *mut BrField) -> BrStatus {
    if out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    *out = Box::into_raw(Box::new(BrField {
        inner: BiharmonicField::zero(),
    }));
    BrStatus::BrOk
}

/// Appends a dictionary term. `slot_phi`: nonzero for the φ slot. `kind`:
/// 0 = power `zⁿ`, 1 = `log z`, 2 = `z·log z` (`n` ignored for 1 and 2).
///
/// # Safety
/// `field` must be a live pointer from `br_field_new`.
#[no_mangle]
pub unsafe extern "C" fn br_field_add_term(
    field: *mut BrField,
    slot_phi: i32,
    kind: i32,
    n: i32,
    coeff_re: f64,
    coeff_im: f64,
) -> BrStatus {
    if field.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    let kind = match kind {
        0 => TermKind::Power(n),
        1 => TermKind::Log,
        2 => TermKind::ZLog,
        _ => return BrStatus::BrErrInvalidArgument,
    };
    let term = AnalyticTerm {
        kind,
        coeff: C::new(coeff_re, coeff_im),
    };
    if slot_phi != 0 {
        (*field).inner.phi.push(term);
    } else {
        (*field).inner.psi.push(term);
    }
    BrStatus::BrOk
}

/// # Safety
/// `field` must be a pointer from `br_field_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_field_free(field: *mut BrField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `∂^{dx+dy} u / ∂x^{dx}∂y^{dy}` at `(x, y)`, `dx + dy ≤ 3`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_field_eval(
    field: *const BrField,
    x: f64,
    y: f64,
    dx: u32,
    dy: u32,
    out: *mut f64,
) -> BrStatus {
    if field.is_null() || out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    if dx + dy > 3 {
        return BrStatus::BrErrInvalidArgument;
    }
    guard(|| match (*field).inner.eval(Point::new(x, y), dx, dy) {
        Ok(v) => {
            *out = v;
            BrStatus::BrOk
        }
        Err(e) => status_of(&e),
    })
}

/// Continues the field across the curve at `(x, y)` under the given boundary
/// case (case I uses the clamped point formula, II–V the general formula
/// with a series kernel of `k_max` terms).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn br_continue(
    curve: *const BrCurve,
    case: BrBoundaryCase,
    field: *const BrField,
    x: f64,
    y: f64,
    k_max: usize,
    out: *mut BrContinuation,
) -> BrStatus {
    if curve.is_null() || field.is_null() || out.is_null() {
        return BrStatus::BrErrNullPointer;
    }
    guard(|| {
        let curve = &(*curve).inner;
        let u = &(*field).inner;
        let p = Point::new(x, y);
        let quad = QuadratureSpec::default();
        let case: BoundaryCase = case.into();
        let result = match case {
            BoundaryCase::I => reflection::continue_clamped_general(u, curve, p),
            _ => reflection::continue_general(u, curve, case, p, &quad, k_max),
        };
        match result {
            Ok(r) => {
                *out = BrContinuation {
                    value: r.value,
                    point_term: r.point_term,
                    correction: r.correction,
                    quadrature_error_estimate: r.quadrature_error_estimate,
                    truncation_k_used: r.truncation_k_used,
                };
                BrStatus::BrOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn br_status_message(status: BrStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        BrStatus::BrOk => b"ok\0",
        BrStatus::BrErrNullPointer => b"null pointer argument\0",
        BrStatus::BrErrInvalidArgument => b"invalid argument\0",
        BrStatus::BrErrNonConvergence => b"newton iteration did not converge\0",
        BrStatus::BrErrOutsideValidity => b"point outside the validity neighborhood\0",
        BrStatus::BrErrDerivativeSingular => b"schwarz derivative singular\0",
        BrStatus::BrErrDomainViolation => b"field evaluated at a singular point or branch cut\0",
        BrStatus::BrErrNotOnCurve => b"point does not lie on the curve\0",
        BrStatus::BrErrUnsupported => b"unsupported operation\0",
        BrStatus::BrErrSingularArgument => b"singular special-function argument\0",
        BrStatus::BrErrNotConverged => b"kernel series did not converge\0",
        BrStatus::BrErrQuadratureFailure => b"quadrature failure\0",
        BrStatus::BrErrBranchCutCrossing => b"path crosses a branch cut\0",
        BrStatus::BrErrInternal => b"internal error\0",
    };
    s.as_ptr() as *const c_char
}
