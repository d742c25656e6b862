//! C ABI for `coset-moments`.
//!
//! Every function returns a [`CmStatus`]; results go through out-pointers.
//! On failure the message is available from [`cm_last_error_message`] on the
//! same thread. Handles are opaque and released with their `_free` function.
//! Strings returned through `char **` belong to the caller and are released
//! with [`cm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use coset_moments::characters::{DirichletCharacter, UnitGroup};
use coset_moments::lvalue::VTable;
use coset_moments::modarith::{jacobi, mod_inv, parse_int_expr, quad_gauss_closed, FactoredModulus};
use coset_moments::moments::{aprime_phase, Method, ModulusContext};
use coset_moments::postnikov::compute_postnikov;
use coset_moments::report::theorem_report;
use coset_moments::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EvenModulus = 3,
    NotInvertible = 4,
    NotPrimitive = 5,
    RegimeViolation = 6,
    ModulusTooLarge = 7,
    VerificationFailed = 8,
    NumericalFailure = 9,
    Io = 10,
    Panic = 11,
}

/// L-value route.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmMethod {
    Hurwitz = 0,
    Afe = 1,
}

impl From<CmMethod> for Method {
    fn from(m: CmMethod) -> Self {
        match m {
            CmMethod::Hurwitz => Method::Hurwitz,
            CmMethod::Afe => Method::Afe,
        }
    }
}

/// A Dirichlet character.
pub struct CmCharacter(DirichletCharacter);

/// Per-modulus state for L-values: unit group, V table, Hurwitz and AFE caches.
pub struct CmContext(ModulusContext);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CmStatus {
    match e {
        Error::EvenModulus(_) => CmStatus::EvenModulus,
        Error::NotInvertible { .. } | Error::BNotCoprime { .. } => CmStatus::NotInvertible,
        Error::NotPrimitive(_) | Error::NotPrimitiveEven | Error::PrincipalCharacter => CmStatus::NotPrimitive,
        Error::RegimeViolation(_) | Error::RegimeUnsupported(_) => CmStatus::RegimeViolation,
        Error::ModulusTooLarge { .. } => CmStatus::ModulusTooLarge,
        Error::VerificationFailed { .. } => CmStatus::VerificationFailed,
        Error::QuadratureNotConverged(_) | Error::PoleInput => CmStatus::NumericalFailure,
        Error::Io(_) | Error::Json(_) => CmStatus::Io,
        _ => CmStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for `cm_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (CmStatus, String)>) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CmStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (CmStatus, String)>;
}

impl<T> IntoFfi<T> for coset_moments::Result<T> {
    fn ffi(self) -> Result<T, (CmStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(name: &str) -> (CmStatus, String) {
    (CmStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (CmStatus, String)> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, (CmStatus, String)> {
    out(p, "out")
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, (CmStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CmStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CmStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn into_c_string(s: String) -> Result<*mut c_char, (CmStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (CmStatus::InvalidArgument, "string contains NUL".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Jacobi symbol `(b/r)` for odd positive `r`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_jacobi(b: i64, r: u64, out: *mut i32) -> CmStatus {
    guard(|| {
        let out = out_ptr(out)?;
        if r == 0 || r % 2 == 0 {
            return Err((CmStatus::InvalidArgument, format!("Jacobi symbol needs odd r > 0, got {r}")));
        }
        *out = jacobi(b, r);
        Ok(())
    })
}

/// Inverse of `a` modulo `m` in `[0, m)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_mod_inv(a: i64, m: u64, out: *mut u64) -> CmStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = mod_inv(a, m).ffi()?;
        Ok(())
    })
}

/// `Σ_{u mod r} e_r(a·u + b·u²)` for odd `r` and `gcd(b, r) = 1`.
///
/// # Safety
/// `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cm_quad_gauss(a: i64, b: i64, r: u64, re: *mut f64, im: *mut f64) -> CmStatus {
    guard(|| {
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let z = quad_gauss_closed(a, b, r).ffi()?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Character mod `q` with exponent vector `exps[0..n]`, one entry per prime-power
/// component in increasing prime order.
///
/// # Safety
/// `exps` must point to `n` values and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_character_new(q: u64, exps: *const u64, n: usize, out: *mut *mut CmCharacter) -> CmStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let exps = if n == 0 { &[][..] } else { std::slice::from_raw_parts(arg(exps, "exps")?, n) };
        let group = UnitGroup::for_modulus(q).ffi()?;
        let chi = DirichletCharacter::new(group, exps).ffi()?;
        *out = Box::into_raw(Box::new(CmCharacter(chi)));
        Ok(())
    })
}

/// Releases a character. Null is ignored.
///
/// # Safety
/// `chi` must come from `cm_character_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cm_character_free(chi: *mut CmCharacter) {
    if !chi.is_null() {
        drop(Box::from_raw(chi));
    }
}

/// `χ(m)`; zero when `gcd(m, q) > 1`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cm_character_eval(chi: *const CmCharacter, m: i64, re: *mut f64, im: *mut f64) -> CmStatus {
    guard(|| {
        let chi = arg(chi, "chi")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let z = chi.0.eval(m);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Conductor, primitivity and parity of a character.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cm_character_info(
    chi: *const CmCharacter,
    conductor: *mut u64,
    is_primitive: *mut bool,
    is_even: *mut bool,
) -> CmStatus {
    guard(|| {
        let chi = &arg(chi, "chi")?.0;
        let (conductor, is_primitive, is_even) =
            (out(conductor, "conductor")?, out(is_primitive, "is_primitive")?, out(is_even, "is_even")?);
        *conductor = chi.conductor();
        *is_primitive = chi.is_primitive();
        *is_even = chi.is_even();
        Ok(())
    })
}

/// Certified Postnikov data of a primitive character for `d`. `has_b` tells
/// whether `b` is defined (`d | q/d`).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cm_postnikov(
    chi: *const CmCharacter,
    d: u64,
    a: *mut i64,
    b: *mut i64,
    has_b: *mut bool,
) -> CmStatus {
    guard(|| {
        let chi = &arg(chi, "chi")?.0;
        let (a, b, has_b) = (out(a, "a")?, out(b, "b")?, out(has_b, "has_b")?);
        let data = compute_postnikov(chi, d).ffi()?;
        *a = data.a_psi;
        *has_b = data.b_psi.is_some();
        *b = data.b_psi.unwrap_or(0);
        Ok(())
    })
}

/// Context for L-values mod `q`; building it tabulates the cutoff function.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_context_new(q: u64, out: *mut *mut CmContext) -> CmStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let qf = FactoredModulus::new(q).ffi()?;
        let vt = Arc::new(VTable::new().ffi()?);
        let ctx = ModulusContext::new(&qf, vt).ffi()?;
        *out = Box::into_raw(Box::new(CmContext(ctx)));
        Ok(())
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must come from `cm_context_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cm_context_free(ctx: *mut CmContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// `|L(1/2, χ)|²` for a non-principal character of the context's modulus.
/// The AFE route needs `χ` primitive and even.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cm_l_abs_sq(
    ctx: *const CmContext,
    chi: *const CmCharacter,
    method: CmMethod,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let (ctx, chi) = (&arg(ctx, "ctx")?.0, &arg(chi, "chi")?.0);
        let out = self::out(out, "out")?;
        *out = ctx.l_abs_sq(chi, method.into()).ffi()?;
        Ok(())
    })
}

/// Moment report for `(q, d)` and `ψ` as a JSON object.
///
/// # Safety
/// All pointers must be valid; free `*json` with `cm_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cm_moment_report_json(
    ctx: *const CmContext,
    psi: *const CmCharacter,
    d: u64,
    method: CmMethod,
    json: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let (ctx, psi) = (&arg(ctx, "ctx")?.0, &arg(psi, "psi")?.0);
        let json = out(json, "json")?;
        let df = FactoredModulus::new(d).ffi()?;
        let report = theorem_report(ctx, psi, &df, method.into(), false).ffi()?;
        let text = serde_json::to_string(&report).map_err(|e| (CmStatus::Io, e.to_string()))?;
        *json = into_c_string(text)?;
        Ok(())
    })
}

/// Exact `A′` phase data as JSON. `q`, `d` accept `7^239`-style factored forms and
/// `a` an expression such as `1+2*7^116`.
///
/// # Safety
/// All pointers must be valid; free `*json` with `cm_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cm_aprime_phase_json(
    q: *const c_char,
    d: *const c_char,
    a: *const c_char,
    json: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let json = out(json, "json")?;
        let qf = FactoredModulus::parse(c_str(q, "q")?).ffi()?;
        let df = FactoredModulus::parse(c_str(d, "d")?).ffi()?;
        let a = parse_int_expr(c_str(a, "a")?).ffi()?;
        let phase = aprime_phase(&qf, &df, &a).ffi()?;
        let text = serde_json::to_string(&phase).map_err(|e| (CmStatus::Io, e.to_string()))?;
        *json = into_c_string(text)?;
        Ok(())
    })
}
