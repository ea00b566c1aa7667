//! C ABI for `cavqed`.
//!
//! Every fallible function returns a [`CavqedStatus`] and writes its result
//! through an out-pointer. Handles are opaque and owned by the caller, who
//! releases them with the matching `*_free`. On failure a description is
//! available from [`cavqed_last_error_message`] on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use cavqed::analytic::{
    closed_form_concurrence_tk, closed_form_fmax, epr_state, gamma_max, rho_exact,
    InteractionTimeIndex,
};
use cavqed::metrics::{
    average_teleport_fidelity, bell_fit, bell_signal, concurrence, epr_fidelity,
    joint_probabilities, max_teleport_fidelity,
};
use cavqed::model::{two_atom_projector, SystemParams};
use cavqed::oracle::{integrate_effective, IntegratorConfig, Trajectory};
use cavqed::qmat::{ComplexMatrix, DensityMatrix, C64};
use cavqed::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavqedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidState = 3,
    NoConvergence = 4,
    NumericalFailure = 5,
    BufferTooSmall = 6,
    OutOfRange = 7,
    Panic = 99,
}

/// System parameters λ, δ, γ.
pub struct CavqedParams(SystemParams);

/// Two-atom density matrix.
pub struct CavqedState(DensityMatrix);

/// Sampled solution of the effective master equation.
pub struct CavqedTrajectory(Trajectory);

/// Joint detection probabilities.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CavqedJointProbs {
    pub eg: f64,
    pub ge: f64,
    pub gg: f64,
    pub ee: f64,
}

/// Basis indices of the two-atom space.
pub const CAVQED_EE: usize = 0;
pub const CAVQED_EG: usize = 1;
pub const CAVQED_GE: usize = 2;
pub const CAVQED_GG: usize = 3;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> CavqedStatus {
    match err {
        Error::InvalidParams(_) | Error::NegativeTime(_) | Error::StepTooLarge { .. } => {
            CavqedStatus::InvalidParams
        }
        Error::NotHermitian { .. }
        | Error::InvalidState(_)
        | Error::BadLayout { .. }
        | Error::DimMismatch { .. } => CavqedStatus::InvalidState,
        Error::NoConvergence { .. } => CavqedStatus::NoConvergence,
        Error::TruncationLeak { .. } | Error::NonRealSpectrum(_) => CavqedStatus::NumericalFailure,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CavqedStatus, String)>) -> CavqedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CavqedStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CavqedStatus::Panic
        }
    }
}

type FfiResult<T> = Result<T, (CavqedStatus, String)>;

fn lib<T>(r: cavqed::Result<T>) -> FfiResult<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CavqedStatus, String) {
    (CavqedStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cavqed_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message of the last failure on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cavqed_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_params_new(
    lambda: f64,
    delta: f64,
    gamma: f64,
    out: *mut *mut CavqedParams,
) -> CavqedStatus {
    guard(|| write_handle(out, CavqedParams(lib(SystemParams::new(lambda, delta, gamma))?)))
}

/// Parameters with λ = δ = Ω, so that λ²/δ = Ω.
#[no_mangle]
pub unsafe extern "C" fn cavqed_params_from_effective(
    omega: f64,
    gamma: f64,
    out: *mut *mut CavqedParams,
) -> CavqedStatus {
    guard(|| write_handle(out, CavqedParams(lib(SystemParams::from_effective(omega, gamma))?)))
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_params_free(p: *mut CavqedParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Effective coupling Ω = λ²/δ.
#[no_mangle]
pub unsafe extern "C" fn cavqed_params_omega(p: *const CavqedParams, out: *mut f64) -> CavqedStatus {
    guard(|| write(out, deref(p, "params")?.0.omega_eff(), "out"))
}

/// Closed-form state at time t, starting from |eg⟩.
#[no_mangle]
pub unsafe extern "C" fn cavqed_state_exact(
    t: f64,
    p: *const CavqedParams,
    out: *mut *mut CavqedState,
) -> CavqedStatus {
    guard(|| {
        let p = deref(p, "params")?;
        write_handle(out, CavqedState(lib(rho_exact(t, &p.0))?.rho))
    })
}

/// (|eg⟩ − i|ge⟩)/√2
#[no_mangle]
pub unsafe extern "C" fn cavqed_state_epr(out: *mut *mut CavqedState) -> CavqedStatus {
    guard(|| write_handle(out, CavqedState(epr_state())))
}

/// Basis projector |i⟩⟨i|, i one of the `CAVQED_*` indices.
#[no_mangle]
pub unsafe extern "C" fn cavqed_state_basis(index: usize, out: *mut *mut CavqedState) -> CavqedStatus {
    guard(|| {
        if index > 3 {
            return Err((CavqedStatus::OutOfRange, format!("basis index {index} > 3")));
        }
        write_handle(out, CavqedState(lib(DensityMatrix::two_qubit(two_atom_projector(index)))?))
    })
}

/// State from 16 row-major entries given as separate real and imaginary
/// arrays. Rejected unless Hermitian, unit-trace and positive.
#[no_mangle]
pub unsafe extern "C" fn cavqed_state_from_entries(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CavqedState,
) -> CavqedStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("entries"));
        }
        if len != 16 {
            return Err((CavqedStatus::InvalidState, format!("expected 16 entries, got {len}")));
        }
        let (re, im) = (slice::from_raw_parts(re, len), slice::from_raw_parts(im, len));
        let data = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let m = ComplexMatrix::from_row_major(data);
        write_handle(out, CavqedState(lib(DensityMatrix::two_qubit(m))?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_state_free(s: *mut CavqedState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the 16 row-major entries into `re` and `im`, each of length ≥ 16.
#[no_mangle]
pub unsafe extern "C" fn cavqed_state_entries(
    s: *const CavqedState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let data = s.0.matrix().as_slice();
        if len < data.len() {
            return Err((
                CavqedStatus::BufferTooSmall,
                format!("need {} entries, got {len}", data.len()),
            ));
        }
        let (re, im) = (slice::from_raw_parts_mut(re, len), slice::from_raw_parts_mut(im, len));
        for (i, z) in data.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// Wootters concurrence.
#[no_mangle]
pub unsafe extern "C" fn cavqed_concurrence(s: *const CavqedState, out: *mut f64) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        write(out, lib(concurrence(&s.0))?, "out")
    })
}

/// ½(1 + ⅓Σ singular values of the correlation matrix).
#[no_mangle]
pub unsafe extern "C" fn cavqed_max_teleport_fidelity(s: *const CavqedState, out: *mut f64) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        write(out, max_teleport_fidelity(&s.0), "out")
    })
}

/// ⟨ψ_EPR|ρ|ψ_EPR⟩
#[no_mangle]
pub unsafe extern "C" fn cavqed_epr_fidelity(s: *const CavqedState, out: *mut f64) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        write(out, epr_fidelity(&s.0), "out")
    })
}

/// Standard teleportation protocol fidelity averaged over the six Pauli
/// eigenstates.
#[no_mangle]
pub unsafe extern "C" fn cavqed_average_teleport_fidelity(s: *const CavqedState, out: *mut f64) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        write(out, average_teleport_fidelity(&s.0), "out")
    })
}

/// Tr ρ²
#[no_mangle]
pub unsafe extern "C" fn cavqed_purity(s: *const CavqedState, out: *mut f64) -> CavqedStatus {
    guard(|| {
        let s = deref(s, "state")?;
        write(out, s.0.purity(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_joint_probabilities(
    s: *const CavqedState,
    out: *mut CavqedJointProbs,
) -> CavqedStatus {
    guard(|| {
        let p = joint_probabilities(&deref(s, "state")?.0);
        write(out, CavqedJointProbs { eg: p.eg, ge: p.ge, gg: p.gg, ee: p.ee }, "out")
    })
}

/// β(φ) = ⟨σ₁ˣ(cos φ σ₂ˣ + sin φ σ₂ʸ)⟩
#[no_mangle]
pub unsafe extern "C" fn cavqed_bell_signal(s: *const CavqedState, phi: f64, out: *mut f64) -> CavqedStatus {
    guard(|| write(out, bell_signal(&deref(s, "state")?.0, phi), "out"))
}

/// Amplitude and phase offset of β(φ) = A·cos(φ + φ₀).
#[no_mangle]
pub unsafe extern "C" fn cavqed_bell_fit(
    s: *const CavqedState,
    amplitude: *mut f64,
    phase: *mut f64,
) -> CavqedStatus {
    guard(|| {
        let fit = bell_fit(&deref(s, "state")?.0);
        write(amplitude, fit.amplitude, "amplitude")?;
        write(phase, fit.phase, "phase")
    })
}

/// Ω·ln4/((2k+1)π)
#[no_mangle]
pub extern "C" fn cavqed_gamma_max(k: u32, omega: f64) -> f64 {
    gamma_max(InteractionTimeIndex(k), omega)
}

/// Piecewise closed form of F_max at t_k.
#[no_mangle]
pub extern "C" fn cavqed_closed_form_fmax(k: u32, gamma: f64, omega: f64) -> f64 {
    closed_form_fmax(InteractionTimeIndex(k), gamma, omega)
}

/// e^{−γ(2k+1)π/(2Ω)}
#[no_mangle]
pub extern "C" fn cavqed_closed_form_concurrence(k: u32, gamma: f64, omega: f64) -> f64 {
    closed_form_concurrence_tk(InteractionTimeIndex(k), gamma, omega)
}

/// t_k = (2k+1)π/(4Ω)
#[no_mangle]
pub extern "C" fn cavqed_interaction_time(k: u32, omega: f64) -> f64 {
    InteractionTimeIndex(k).time(omega)
}

/// RK4 integration of the effective master equation from `rho0`, sampled
/// at the `n` increasing times in `times`, with step `dt`.
#[no_mangle]
pub unsafe extern "C" fn cavqed_integrate_effective(
    rho0: *const CavqedState,
    p: *const CavqedParams,
    times: *const f64,
    n: usize,
    dt: f64,
    out: *mut *mut CavqedTrajectory,
) -> CavqedStatus {
    guard(|| {
        let rho0 = deref(rho0, "rho0")?;
        let p = deref(p, "params")?;
        if times.is_null() {
            return Err(null("times"));
        }
        let times = slice::from_raw_parts(times, n);
        let cfg = lib(IntegratorConfig::rk4(dt))?;
        write_handle(out, CavqedTrajectory(lib(integrate_effective(&rho0.0, &p.0, times, cfg))?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_trajectory_len(tr: *const CavqedTrajectory, out: *mut usize) -> CavqedStatus {
    guard(|| write(out, deref(tr, "trajectory")?.0.len(), "out"))
}

/// Copy of the i-th sampled state.
#[no_mangle]
pub unsafe extern "C" fn cavqed_trajectory_state(
    tr: *const CavqedTrajectory,
    index: usize,
    out: *mut *mut CavqedState,
) -> CavqedStatus {
    guard(|| {
        let tr = deref(tr, "trajectory")?;
        let s = tr.0.states().get(index).ok_or_else(|| {
            (CavqedStatus::OutOfRange, format!("index {index} >= {}", tr.0.len()))
        })?;
        write_handle(out, CavqedState(s.clone()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn cavqed_trajectory_free(tr: *mut CavqedTrajectory) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavqed::model::{EE, EG, GE, GG};
    use std::ptr;

    #[test]
    fn basis_constants_match_core() {
        assert_eq!([CAVQED_EE, CAVQED_EG, CAVQED_GE, CAVQED_GG], [EE, EG, GE, GG]);
    }

    #[test]
    fn error_message_roundtrip() {
        let mut p = ptr::null_mut();
        let st = unsafe { cavqed_params_new(-1.0, 1.0, 0.0, &mut p) };
        assert_eq!(st, CavqedStatus::InvalidParams);
        assert!(p.is_null());
        let msg = unsafe { CStr::from_ptr(cavqed_last_error_message()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn null_out_pointer() {
        let st = unsafe { cavqed_params_new(1.0, 1.0, 0.0, ptr::null_mut()) };
        assert_eq!(st, CavqedStatus::NullPointer);
    }
}
