//! C interface to `kac-core`.
//!
//! Every function returns a [`KacStatus`]. On failure the message is kept per
//! thread and can be read with [`kac_last_error`]. Ensembles are opaque and
//! must be released with [`kac_ensemble_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kac_core::boltzmann::{integrate_moments, MomentVector};
use kac_core::generator::{first_gap, second_gap, second_gap_limit};
use kac_core::simulator::{empty_series, record, Ensemble, InitialCondition, MOMENT_ORDER};
use kac_core::{KacError, Params};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KacStatus {
    Ok = 0,
    InvalidParameter = 1,
    NullPointer = 2,
    BufferTooSmall = 3,
    /// Assembly mismatch, integration failure or another numerical error.
    Numerical = 4,
    /// Both rates are zero.
    NoEvents = 5,
    Panic = 6,
}

/// Replicated particle system.
pub struct KacEnsemble {
    inner: Ensemble,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: KacError) -> KacStatus {
    set_error(&e.to_string());
    match e {
        KacError::InvalidParameter(_) | KacError::OddIndex(_) | KacError::Domain(_) => KacStatus::InvalidParameter,
        KacError::NoEvents => KacStatus::NoEvents,
        _ => KacStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> KacStatus) -> KacStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            KacStatus::Panic
        }
    }
}

fn null(what: &str) -> KacStatus {
    set_error(&format!("{what} is null"));
    KacStatus::NullPointer
}

/// Message for the last failing call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create `replicas` copies of an `n`-particle system with independent
/// Gaussian velocities of variance `temperature`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_new(
    n: usize,
    lambda: f64,
    mu: f64,
    beta: f64,
    temperature: f64,
    replicas: usize,
    seed: u64,
    out: *mut *mut KacEnsemble,
) -> KacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let made = Params::new(n, lambda, mu, beta)
            .and_then(|p| Ensemble::new(p, InitialCondition::Gaussian { temperature }, replicas, seed));
        match made {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(KacEnsemble { inner }));
                KacStatus::Ok
            }
            Err(e) => {
                *out = ptr::null_mut();
                fail(e)
            }
        }
    })
}

/// # Safety
/// `ens` must come from [`kac_ensemble_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_free(ens: *mut KacEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Advance every replica to absolute time `t`.
///
/// # Safety
/// `ens` must be a live ensemble.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_advance(ens: *mut KacEnsemble, t: f64) -> KacStatus {
    guard(|| match ens.as_mut() {
        None => null("ens"),
        Some(e) => e.inner.advance_to(t).map_or_else(fail, |_| KacStatus::Ok),
    })
}

/// # Safety
/// `ens` must be a live ensemble and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_time(ens: *const KacEnsemble, out: *mut f64) -> KacStatus {
    guard(|| match (ens.as_ref(), out.is_null()) {
        (None, _) => null("ens"),
        (_, true) => null("out"),
        (Some(e), false) => {
            *out = e.inner.time();
            KacStatus::Ok
        }
    })
}

/// Replica-averaged total kinetic energy and its standard error.
///
/// # Safety
/// `ens` must be a live ensemble; `mean` and `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_kinetic_energy(
    ens: *const KacEnsemble,
    mean: *mut f64,
    stderr: *mut f64,
) -> KacStatus {
    guard(|| {
        let Some(e) = ens.as_ref() else { return null("ens") };
        if mean.is_null() || stderr.is_null() {
            return null("output");
        }
        let mut s = empty_series(e.inner.params(), e.inner.len());
        record(&mut s, &e.inner);
        *mean = s.kinetic_energy[0];
        *stderr = s.kinetic_energy_stderr[0];
        KacStatus::Ok
    })
}

/// One-particle moments `E[v^k]`, `k = 1..=len`, pooled over particles and
/// replicas. `len` may not exceed 6.
///
/// # Safety
/// `ens` must be a live ensemble and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kac_ensemble_moments(ens: *const KacEnsemble, out: *mut f64, len: usize) -> KacStatus {
    guard(|| {
        let Some(e) = ens.as_ref() else { return null("ens") };
        if out.is_null() {
            return null("out");
        }
        if len > MOMENT_ORDER {
            set_error(&format!("at most {MOMENT_ORDER} moments are tracked"));
            return KacStatus::InvalidParameter;
        }
        let mut s = empty_series(e.inner.params(), e.inner.len());
        record(&mut s, &e.inner);
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&s.moments[0][..len]);
        KacStatus::Ok
    })
}

/// Smallest nonzero eigenvalue of the generator on the even symmetric sectors.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kac_first_gap(n: usize, lambda: f64, mu: f64, beta: f64, out: *mut f64) -> KacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match Params::new(n, lambda, mu, beta).and_then(|p| first_gap(&p)) {
            Ok(g) => {
                *out = g.value;
                KacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Second gap by the quadratic route, cross-checked against the matrix and
/// assembled routes. `upper` receives the other root and may be null.
///
/// # Safety
/// `out` must be writable; `upper` null or writable.
#[no_mangle]
pub unsafe extern "C" fn kac_second_gap(
    n: usize,
    lambda: f64,
    mu: f64,
    beta: f64,
    out: *mut f64,
    upper: *mut f64,
) -> KacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match Params::new(n, lambda, mu, beta).and_then(|p| second_gap(&p)) {
            Ok(g) => {
                *out = g.value;
                if !upper.is_null() {
                    *upper = g.upper_root;
                }
                KacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `min(lambda / 2 + 5 mu / 8, mu)`.
#[no_mangle]
pub extern "C" fn kac_second_gap_limit(lambda: f64, mu: f64) -> f64 {
    second_gap_limit(lambda, mu)
}

/// Integrate the moment hierarchy from `m0[0..=order]` (with `m0[0] = 1`)
/// and write `steps + 1` rows of `order + 1` moments, spaced `horizon / steps`
/// apart, into `out`.
///
/// # Safety
/// `m0` must hold `order + 1` values and `out` must hold `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn kac_integrate_moments(
    m0: *const f64,
    order: usize,
    lambda: f64,
    mu: f64,
    beta: f64,
    horizon: f64,
    steps: usize,
    out: *mut f64,
    out_len: usize,
) -> KacStatus {
    guard(|| {
        if m0.is_null() || out.is_null() {
            return null("buffer");
        }
        if steps == 0 || order == 0 {
            set_error("steps and order must be positive");
            return KacStatus::InvalidParameter;
        }
        let need = (steps + 1) * (order + 1);
        if out_len < need {
            set_error(&format!("output holds {out_len} values, need {need}"));
            return KacStatus::BufferTooSmall;
        }
        let start = std::slice::from_raw_parts(m0, order + 1).to_vec();
        let run = Params::new(1, lambda, mu, beta)
            .and_then(|p| MomentVector::new(start).map(|m| (p, m)))
            .and_then(|(p, m)| integrate_moments(&m, &p, horizon, horizon / steps as f64));
        match run {
            Ok(rows) => {
                let dst = std::slice::from_raw_parts_mut(out, need);
                for (k, mv) in rows.iter().take(steps + 1).enumerate() {
                    dst[k * (order + 1)..(k + 1) * (order + 1)].copy_from_slice(&mv.m);
                }
                KacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
