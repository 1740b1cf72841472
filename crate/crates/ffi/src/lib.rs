//! C ABI over the macrolab core.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`MacrolabStatus`]; on failure a description is available from
//! [`macrolab_last_error_message`] on the same thread. Panics are caught at
//! the boundary and reported as [`MacrolabStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use macrolab::entropy::{relative_entropy, von_neumann, Nats};
use macrolab::hypotest::{np_optimal_test, prob_eps_tensor};
use macrolab::kg::{epsilon_choices, KgProjector};
use macrolab::maxent::{fit_maxent, CanonicalState, FitOptions, ObservableSet};
use macrolab::operator::{DensityMatrix, HermitianOperator, DEFAULT_DIM_CAP};
use macrolab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MacrolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    InvalidState = 5,
    Infeasible = 6,
    NotConverged = 7,
    IllConditioned = 8,
    DimensionCap = 9,
    Json = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

impl From<&Error> for MacrolabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotHermitian { .. } => MacrolabStatus::NotHermitian,
            Error::NotSquare { .. } | Error::DimensionMismatch { .. } => MacrolabStatus::DimensionMismatch,
            Error::InvalidState(_) | Error::InvalidTestOperator { .. } | Error::LogDomain { .. } => {
                MacrolabStatus::InvalidState
            }
            Error::DimensionCap { .. } => MacrolabStatus::DimensionCap,
            Error::Infeasible { .. } => MacrolabStatus::Infeasible,
            Error::NotConverged { .. } => MacrolabStatus::NotConverged,
            Error::IllConditioned { .. } | Error::DegenerateObservables { .. } => MacrolabStatus::IllConditioned,
            Error::Json(_) => MacrolabStatus::Json,
            _ => MacrolabStatus::InvalidArgument,
        }
    }
}

/// Hermitian operator handle; density matrices are operators validated on use.
pub struct MacrolabOperator {
    inner: HermitianOperator,
}

pub struct MacrolabObservables {
    inner: ObservableSet,
}

pub struct MacrolabCanonical {
    inner: CanonicalState,
}

pub struct MacrolabKg {
    inner: KgProjector,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MacrolabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(MacrolabStatus::from(&e), e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(MacrolabStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> FfiResult) -> MacrolabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MacrolabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            MacrolabStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(null("string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_string)
        .map_err(|e| Failure(MacrolabStatus::InvalidUtf8, e.to_string()))
}

fn density(op: &MacrolabOperator) -> Result<DensityMatrix, Failure> {
    Ok(DensityMatrix::new(op.inner.clone())?)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn macrolab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by the library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library.
#[no_mangle]
pub unsafe extern "C" fn macrolab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an operator from row-major real and imaginary parts of length `dim*dim`.
///
/// # Safety
/// `re` and `im` must point to `dim*dim` doubles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_from_parts(
    dim: usize,
    re: *const f64,
    im: *const f64,
    result: *mut *mut MacrolabOperator,
) -> MacrolabStatus {
    guard(|| {
        let result = out(result, "result")?;
        let n = dim.checked_mul(dim).ok_or_else(|| Failure(MacrolabStatus::InvalidArgument, "dim overflow".into()))?;
        let op = HermitianOperator::from_parts(dim, slice(re, n, "re")?, slice(im, n, "im")?)?;
        *result = boxed(MacrolabOperator { inner: op });
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_from_json(
    json: *const c_char,
    result: *mut *mut MacrolabOperator,
) -> MacrolabStatus {
    guard(|| {
        let result = out(result, "result")?;
        let op = HermitianOperator::from_json(&string(json)?)?;
        *result = boxed(MacrolabOperator { inner: op });
        Ok(())
    })
}

/// Writes a newly allocated JSON document; release it with [`macrolab_string_free`].
///
/// # Safety
/// `op` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_to_json(
    op: *const MacrolabOperator,
    result: *mut *mut c_char,
) -> MacrolabStatus {
    guard(|| {
        let op = deref(op, "op")?;
        let result = out(result, "result")?;
        let doc = op.inner.to_json()?;
        *result = CString::new(doc).expect("JSON has no nul").into_raw();
        Ok(())
    })
}

/// Copies the row-major parts into caller buffers of length `dim*dim`.
///
/// # Safety
/// `re` and `im` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_copy_parts(
    op: *const MacrolabOperator,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> MacrolabStatus {
    guard(|| {
        let op = deref(op, "op")?;
        let d = op.inner.dim();
        if len != d * d {
            return Err(Failure(
                MacrolabStatus::DimensionMismatch,
                format!("buffer length {len}, need {}", d * d),
            ));
        }
        if re.is_null() || im.is_null() {
            return Err(null("buffer"));
        }
        let m = op.inner.matrix();
        for i in 0..d {
            for j in 0..d {
                *re.add(i * d + j) = m[(i, j)].re;
                *im.add(i * d + j) = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// Dimension of the operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_dim(op: *const MacrolabOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.dim())
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn macrolab_operator_free(op: *mut MacrolabOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Von Neumann entropy in nats; the operator must be a density matrix.
///
/// # Safety
/// `state` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_von_neumann(state: *const MacrolabOperator, result: *mut f64) -> MacrolabStatus {
    guard(|| {
        let rho = density(deref(state, "state")?)?;
        *out(result, "result")? = von_neumann(&rho);
        Ok(())
    })
}

/// `S(ρ‖σ)` in nats. When the supports are incompatible `*infinite` is set to
/// 1 and `*result` to 0.
///
/// # Safety
/// Handles must be live; `result` and `infinite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_relative_entropy(
    rho: *const MacrolabOperator,
    sigma: *const MacrolabOperator,
    result: *mut f64,
    infinite: *mut i32,
) -> MacrolabStatus {
    guard(|| {
        let r = density(deref(rho, "rho")?)?;
        let s = density(deref(sigma, "sigma")?)?;
        if r.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: r.dim(),
                actual: s.dim(),
            }
            .into());
        }
        let (value, inf) = match relative_entropy(&r, &s) {
            Nats::Finite(v) => (v, 0),
            Nats::Infinite => (0.0, 1),
        };
        *out(result, "result")? = value;
        *out(infinite, "infinite")? = inf;
        Ok(())
    })
}

/// Optimal test `min tr(σΓ)` subject to `tr(ρΓ) ≥ ε`. `gamma_op` may be null
/// when the test operator is not needed.
///
/// # Safety
/// Handles must be live; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_np_test(
    rho: *const MacrolabOperator,
    sigma: *const MacrolabOperator,
    epsilon: f64,
    prob: *mut f64,
    power: *mut f64,
    gamma_op: *mut *mut MacrolabOperator,
) -> MacrolabStatus {
    guard(|| {
        let r = density(deref(rho, "rho")?)?;
        let s = density(deref(sigma, "sigma")?)?;
        let res = np_optimal_test(&r, &s, epsilon)?;
        *out(prob, "prob")? = res.prob;
        if let Some(p) = power.as_mut() {
            *p = res.power;
        }
        if let Some(g) = gamma_op.as_mut() {
            *g = boxed(MacrolabOperator {
                inner: res.gamma_op.into_operator(),
            });
        }
        Ok(())
    })
}

/// `prob_ε(ρ^{⊗N} | σ^{⊗N})` under the default dimension cap.
///
/// # Safety
/// Handles must be live; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_prob_eps_tensor(
    rho: *const MacrolabOperator,
    sigma: *const MacrolabOperator,
    epsilon: f64,
    n: usize,
    result: *mut f64,
) -> MacrolabStatus {
    guard(|| {
        let r = density(deref(rho, "rho")?)?;
        let s = density(deref(sigma, "sigma")?)?;
        *out(result, "result")? = prob_eps_tensor(&r, &s, epsilon, n, DEFAULT_DIM_CAP)?;
        Ok(())
    })
}

/// Observable set from `count` operator handles of dimension `dim`; the
/// handles are copied and stay owned by the caller.
///
/// # Safety
/// `members` must point to `count` live handles.
#[no_mangle]
pub unsafe extern "C" fn macrolab_observables_new(
    dim: usize,
    members: *const *const MacrolabOperator,
    count: usize,
    result: *mut *mut MacrolabObservables,
) -> MacrolabStatus {
    guard(|| {
        let result = out(result, "result")?;
        let ptrs: &[*const MacrolabOperator] = if count == 0 {
            &[]
        } else if members.is_null() {
            return Err(null("members"));
        } else {
            std::slice::from_raw_parts(members, count)
        };
        let ops = ptrs
            .iter()
            .map(|&p| deref(p, "member").map(|o| o.inner.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        *result = boxed(MacrolabObservables {
            inner: ObservableSet::new(dim, ops)?,
        });
        Ok(())
    })
}

/// # Safety
/// `obs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn macrolab_observables_free(obs: *mut MacrolabObservables) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Fits the MaxEnt state with `tr(G_a μ) = target[a]`.
///
/// # Safety
/// `target` must hold `len` doubles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_fit_maxent(
    obs: *const MacrolabObservables,
    target: *const f64,
    len: usize,
    result: *mut *mut MacrolabCanonical,
) -> MacrolabStatus {
    guard(|| {
        let obs = deref(obs, "obs")?;
        let result = out(result, "result")?;
        let state = fit_maxent(&obs.inner, slice(target, len, "target")?, FitOptions::default())?;
        *result = boxed(MacrolabCanonical { inner: state });
        Ok(())
    })
}

/// Number of observables, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_len(state: *const MacrolabCanonical) -> usize {
    state.as_ref().map_or(0, |s| s.inner.lambda().len())
}

unsafe fn copy_vec(src: &[f64], dst: *mut f64, len: usize) -> FfiResult {
    if len != src.len() {
        return Err(Failure(
            MacrolabStatus::DimensionMismatch,
            format!("buffer length {len}, need {}", src.len()),
        ));
    }
    if len > 0 {
        if dst.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), dst, len);
    }
    Ok(())
}

/// Copies `λ` into a buffer of length [`macrolab_canonical_len`].
///
/// # Safety
/// `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_lambda(
    state: *const MacrolabCanonical,
    buf: *mut f64,
    len: usize,
) -> MacrolabStatus {
    guard(|| copy_vec(deref(state, "state")?.inner.lambda(), buf, len))
}

/// Copies the fitted expectations `f` into a buffer of length [`macrolab_canonical_len`].
///
/// # Safety
/// `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_f(
    state: *const MacrolabCanonical,
    buf: *mut f64,
    len: usize,
) -> MacrolabStatus {
    guard(|| copy_vec(deref(state, "state")?.inner.f(), buf, len))
}

/// # Safety
/// `state` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_log_z(
    state: *const MacrolabCanonical,
    result: *mut f64,
) -> MacrolabStatus {
    guard(|| {
        *out(result, "result")? = deref(state, "state")?.inner.log_z();
        Ok(())
    })
}

/// New operator handle holding `μ`.
///
/// # Safety
/// `state` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_mu(
    state: *const MacrolabCanonical,
    result: *mut *mut MacrolabOperator,
) -> MacrolabStatus {
    guard(|| {
        let s = deref(state, "state")?;
        *out(result, "result")? = boxed(MacrolabOperator {
            inner: s.inner.mu().as_operator().clone(),
        });
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn macrolab_canonical_free(state: *mut MacrolabCanonical) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Kawasaki–Gunton projector at expectations `f`.
///
/// # Safety
/// `f` must hold `len` doubles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_kg_build(
    obs: *const MacrolabObservables,
    f: *const f64,
    len: usize,
    result: *mut *mut MacrolabKg,
) -> MacrolabStatus {
    guard(|| {
        let obs = deref(obs, "obs")?;
        let result = out(result, "result")?;
        let kg = KgProjector::build(&obs.inner, slice(f, len, "f")?)?;
        *result = boxed(MacrolabKg { inner: kg });
        Ok(())
    })
}

/// `γ_N` of a state against the projector.
///
/// # Safety
/// Handles must be live; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_kg_gamma(
    kg: *const MacrolabKg,
    rho: *const MacrolabOperator,
    n: usize,
    result: *mut f64,
) -> MacrolabStatus {
    guard(|| {
        let kg = deref(kg, "kg")?;
        let r = density(deref(rho, "rho")?)?;
        *out(result, "result")? = kg.inner.gamma_n(&r, n, DEFAULT_DIM_CAP)?;
        Ok(())
    })
}

/// `PΓ` on `N` copies, as a new operator handle.
///
/// # Safety
/// Handles must be live; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_kg_apply_observable(
    kg: *const MacrolabKg,
    gamma: *const MacrolabOperator,
    n: usize,
    result: *mut *mut MacrolabOperator,
) -> MacrolabStatus {
    guard(|| {
        let kg = deref(kg, "kg")?;
        let g = deref(gamma, "gamma")?;
        let p = kg.inner.apply_observable(&g.inner, n, DEFAULT_DIM_CAP)?;
        *out(result, "result")? = boxed(MacrolabOperator { inner: p });
        Ok(())
    })
}

/// # Safety
/// `kg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn macrolab_kg_free(kg: *mut MacrolabKg) {
    if !kg.is_null() {
        drop(Box::from_raw(kg));
    }
}

/// `(ε, ε′) = ((1 − γ)/2, (1 + γ)/2)` for `0 ≤ γ < 1`.
///
/// # Safety
/// `epsilon` and `epsilon_prime` must be writable.
#[no_mangle]
pub unsafe extern "C" fn macrolab_epsilon_choices(
    gamma: f64,
    epsilon: *mut f64,
    epsilon_prime: *mut f64,
) -> MacrolabStatus {
    guard(|| {
        let (e, ep) = epsilon_choices(gamma)?;
        *out(epsilon, "epsilon")? = e;
        *out(epsilon_prime, "epsilon_prime")? = ep;
        Ok(())
    })
}
