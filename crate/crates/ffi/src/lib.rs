//! C ABI over the `qdiscord` engine.
//!
//! States are opaque `QdState` handles created by `qd_state_prepare` or
//! `qd_state_from_matrix` and released with `qd_state_free`. Every fallible
//! function returns a `QdStatus`; on failure `qd_last_error_message` describes
//! the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdiscord::channels::{amplitude_damping, correlated_dephasing, on_qubit, prepare, RotationAxis, StateSpec};
use qdiscord::correlations::{concurrence, correlation_matrix, correlation_rank, discord, mutual_information, tangle};
use qdiscord::densop::{fidelity, Complex64, Op2, Op4, QubitState, Side, TwoQubitState};
use qdiscord::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAState = 3,
    UnsupportedStateClass = 4,
    InternalInconsistency = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque one- or two-qubit density operator.
pub enum QdState {
    Qubit(QubitState),
    TwoQubit(TwoQubitState),
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> QdStatus {
    match err {
        Error::InvalidArgument(_) => QdStatus::InvalidArgument,
        Error::NotAState(_) => QdStatus::NotAState,
        Error::UnsupportedStateClass(_) => QdStatus::UnsupportedStateClass,
        Error::InternalInconsistency(_) => QdStatus::InternalInconsistency,
        Error::Parse(_) => QdStatus::Parse,
        Error::Io(_) => QdStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer: {name}"));
            QdStatus::NullPointer
        }
        Ok(Err(Failure::Engine(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside qdiscord".to_string());
            QdStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(p: *const QdState, name: &'static str) -> FfiResult<&'a QdState> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn two_qubit<'a>(p: *const QdState, name: &'static str) -> FfiResult<&'a TwoQubitState> {
    match state_ref(p, name)? {
        QdState::TwoQubit(rho) => Ok(rho),
        QdState::Qubit(_) => Err(Error::InvalidArgument(format!("{name} must be a two-qubit state")).into()),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &'static str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

fn side_from(side: u32) -> FfiResult<Side> {
    match side {
        0 => Ok(Side::A),
        1 => Ok(Side::B),
        _ => Err(Error::InvalidArgument(format!("side must be 0 (A) or 1 (B), got {side}")).into()),
    }
}

fn boxed(state: QdState) -> *mut QdState {
    Box::into_raw(Box::new(state))
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Prepares a named scenario state (`rho1`, `rho2`, `plus_plus`, `werner`,
/// `werner_input`, `bell_phi_plus`). `p` is used only by the Werner states.
///
/// # Safety
/// `id` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qd_state_prepare(id: *const c_char, p: f64, out: *mut *mut QdState) -> QdStatus {
    guard(|| {
        if id.is_null() {
            return Err(Failure::Null("id"));
        }
        let id = CStr::from_ptr(id)
            .to_str()
            .map_err(|_| Error::InvalidArgument("id is not UTF-8".into()))?;
        let spec = StateSpec::parse(id, Some(p))?;
        let rho = prepare(&spec)?;
        write_out(out, boxed(QdState::TwoQubit(rho)), "out")
    })
}

/// Builds a state from `dim * dim` row-major real and imaginary parts.
/// `dim` must be 2 or 4.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qd_state_from_matrix(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QdState,
) -> QdStatus {
    guard(|| {
        if re.is_null() {
            return Err(Failure::Null("re"));
        }
        if im.is_null() {
            return Err(Failure::Null("im"));
        }
        let entry = |k: usize| Complex64::new(*re.add(k), *im.add(k));
        let state = match dim {
            2 => QdState::Qubit(QubitState::new(Op2::from_fn(|i, j| entry(2 * i + j)))?),
            4 => QdState::TwoQubit(TwoQubitState::new(Op4::from_fn(|i, j| entry(4 * i + j)))?),
            _ => return Err(Error::InvalidArgument(format!("dimension must be 2 or 4, got {dim}")).into()),
        };
        write_out(out, boxed(state), "out")
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `state` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qd_state_free(state: *mut QdState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Hilbert-space dimension of the handle (2 or 4), or 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_state_dim(state: *const QdState) -> usize {
    match state.as_ref() {
        Some(QdState::Qubit(_)) => 2,
        Some(QdState::TwoQubit(_)) => 4,
        None => 0,
    }
}

/// Copies the matrix into `dim * dim` row-major real and imaginary buffers.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must each hold `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qd_state_matrix(state: *const QdState, re: *mut f64, im: *mut f64) -> QdStatus {
    guard(|| {
        let pairs = match state_ref(state, "state")? {
            QdState::Qubit(rho) => rho.to_pairs(),
            QdState::TwoQubit(rho) => rho.to_pairs(),
        };
        if re.is_null() {
            return Err(Failure::Null("re"));
        }
        if im.is_null() {
            return Err(Failure::Null("im"));
        }
        for (k, [r, i]) in pairs.into_iter().enumerate() {
            re.add(k).write(r);
            im.add(k).write(i);
        }
        Ok(())
    })
}

/// Amplitude damping with decay probability `p`. For two-qubit states it acts
/// on `side` (0 = A, 1 = B); for single qubits `side` is ignored.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_apply_amplitude_damping(
    state: *const QdState,
    p: f64,
    side: u32,
    out: *mut *mut QdState,
) -> QdStatus {
    guard(|| {
        let channel = amplitude_damping(p)?;
        let result = match state_ref(state, "state")? {
            QdState::Qubit(rho) => QdState::Qubit(channel.apply(rho)),
            QdState::TwoQubit(rho) => QdState::TwoQubit(on_qubit(&channel, side_from(side)?).apply(rho)),
        };
        write_out(out, boxed(result), "out")
    })
}

/// Complete correlated dephasing about the unit axis `(nx, ny, nz)`.
///
/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_apply_correlated_dephasing(
    state: *const QdState,
    nx: f64,
    ny: f64,
    nz: f64,
    out: *mut *mut QdState,
) -> QdStatus {
    guard(|| {
        let rho = two_qubit(state, "state")?;
        let axis = RotationAxis::new(nx, ny, nz)?;
        let result = correlated_dephasing(&axis).apply(rho);
        write_out(out, boxed(QdState::TwoQubit(result)), "out")
    })
}

/// Discord in bits with projective measurements on `side` (0 = A, 1 = B).
///
/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_discord(state: *const QdState, side: u32, out: *mut f64) -> QdStatus {
    guard(|| {
        let rho = two_qubit(state, "state")?;
        let value = discord(rho, side_from(side)?)?.value;
        write_out(out, value, "out")
    })
}

/// Mutual information in bits.
///
/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_mutual_information(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| write_out(out, mutual_information(two_qubit(state, "state")?)?, "out"))
}

/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_concurrence(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| write_out(out, concurrence(two_qubit(state, "state")?)?, "out"))
}

/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_tangle(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| write_out(out, tangle(two_qubit(state, "state")?)?, "out"))
}

/// Writes the four correlation-matrix singular values, descending.
///
/// # Safety
/// `state` must be a live two-qubit handle and `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn qd_singular_values(state: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| {
        let values = correlation_matrix(two_qubit(state, "state")?).singular_values;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        for (k, v) in values.into_iter().enumerate() {
            out.add(k).write(v);
        }
        Ok(())
    })
}

/// Correlation rank at relative `tolerance` in (0, 0.5).
///
/// # Safety
/// `state` must be a live two-qubit handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_correlation_rank(state: *const QdState, tolerance: f64, out: *mut u32) -> QdStatus {
    guard(|| {
        let rank = correlation_rank(two_qubit(state, "state")?, tolerance)?.rank;
        write_out(out, rank as u32, "out")
    })
}

/// Squared Uhlmann fidelity; both handles must have the same dimension.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qd_fidelity(a: *const QdState, b: *const QdState, out: *mut f64) -> QdStatus {
    guard(|| {
        let value = match (state_ref(a, "a")?, state_ref(b, "b")?) {
            (QdState::Qubit(x), QdState::Qubit(y)) => fidelity(x, y)?,
            (QdState::TwoQubit(x), QdState::TwoQubit(y)) => fidelity(x, y)?,
            _ => return Err(Error::InvalidArgument("fidelity of states with different dimensions".into()).into()),
        };
        write_out(out, value, "out")
    })
}
