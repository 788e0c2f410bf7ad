//! C ABI for the `tvdp` accounting library.
//!
//! Every function returns a [`TvdpStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read
//! with [`tvdp_last_error`]. Handles are opaque and must be released with
//! the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tvdp::amplification::subsample;
use tvdp::asymptotics::clt_gap;
use tvdp::composition::{compose_exact, compose_kairouz, compose_types_approx};
use tvdp::curves::curve_from_budget;
use tvdp::divergences::DivergenceSpec;
use tvdp::localdp::{chi2_output_bound, dobrushin, kl_contraction_bound, ldp_epsilon, max_fdiv, q_star};
use tvdp::mechanisms::{gaussian_tv, laplace_tv, staircase_tv, GaussianParams, StaircaseSpec};
use tvdp::{Channel, CompositionLedger, Error, PrivacyBudget, TradeoffCurve};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvdpStatus {
    Ok = 0,
    InvalidArgument = 1,
    Infeasible = 2,
    Capacity = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Composition algorithm for [`tvdp_compose`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvdpComposeMode {
    Exact = 0,
    Types = 1,
    /// (eps, delta) composition without the TV constraint.
    Kairouz = 2,
}

/// Tradeoff curve handle.
pub struct TvdpCurve(TradeoffCurve);

/// Composition ledger handle.
pub struct TvdpLedger(CompositionLedger);

/// Channel handle.
pub struct TvdpChannel(Channel);

/// Closed-form bounds over channels with given eps and eta.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TvdpLdpBounds {
    pub max_kl: f64,
    pub max_chi2: f64,
    pub max_tv: f64,
    pub kl_contraction: f64,
    pub chi2_output: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(TvdpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation(_) => TvdpStatus::Infeasible,
            Error::Capacity(_) => TvdpStatus::Capacity,
            _ => TvdpStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(TvdpStatus::NullPointer, format!("{name} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> TvdpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TvdpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            TvdpStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn tvdp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tvdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// curves

/// Boundary curve of an (eps, delta, eta) budget.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_from_budget(
    eps: f64,
    delta: f64,
    eta: f64,
    out: *mut *mut TvdpCurve,
) -> TvdpStatus {
    guard(|| {
        let c = curve_from_budget(&PrivacyBudget::new(eps, delta, eta)?);
        write(out, "out", Box::into_raw(Box::new(TvdpCurve(c))))
    })
}

/// Curve from vertex arrays; the vertices must form a valid tradeoff curve.
///
/// # Safety
/// `xs` and `ys` must hold `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_new(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut *mut TvdpCurve,
) -> TvdpStatus {
    guard(|| {
        if xs.is_null() || ys.is_null() {
            return Err(null("vertex array"));
        }
        let xs = std::slice::from_raw_parts(xs, n);
        let ys = std::slice::from_raw_parts(ys, n);
        let c = TradeoffCurve::new(xs.iter().copied().zip(ys.iter().copied()).collect())?;
        write(out, "out", Box::into_raw(Box::new(TvdpCurve(c))))
    })
}

/// # Safety
/// `curve` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_free(curve: *mut TvdpCurve) {
    if !curve.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(curve))));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_vertex_count(curve: *const TvdpCurve, out: *mut usize) -> TvdpStatus {
    guard(|| write(out, "out", deref(curve, "curve")?.0.vertices().len()))
}

/// Copies up to `cap` vertices; `written` receives the number copied.
///
/// # Safety
/// `xs` and `ys` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_vertices(
    curve: *const TvdpCurve,
    xs: *mut f64,
    ys: *mut f64,
    cap: usize,
    written: *mut usize,
) -> TvdpStatus {
    guard(|| {
        let v = deref(curve, "curve")?.0.vertices();
        if xs.is_null() || ys.is_null() {
            return Err(null("vertex buffer"));
        }
        let n = v.len().min(cap);
        for (i, &(x, y)) in v.iter().take(n).enumerate() {
            xs.add(i).write(x);
            ys.add(i).write(y);
        }
        write(written, "written", n)
    })
}

/// Value of the curve at `t` in [0, 1].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_eval(curve: *const TvdpCurve, t: f64, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", deref(curve, "curve")?.0.eval(t)?))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_tv(curve: *const TvdpCurve, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", deref(curve, "curve")?.0.tv()))
}

/// Smallest delta such that the curve is (eps, delta)-DP.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_delta_for_epsilon(curve: *const TvdpCurve, eps: f64, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", deref(curve, "curve")?.0.delta_for_epsilon(eps)))
}

/// Pointwise maximum of `n` curves.
///
/// # Safety
/// `curves` must hold `n` valid handles.
#[no_mangle]
pub unsafe extern "C" fn tvdp_curve_intersect(
    curves: *const *const TvdpCurve,
    n: usize,
    out: *mut *mut TvdpCurve,
) -> TvdpStatus {
    guard(|| {
        if curves.is_null() {
            return Err(null("curves"));
        }
        let list = std::slice::from_raw_parts(curves, n)
            .iter()
            .map(|&c| deref(c, "curve").map(|c| c.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let c = TradeoffCurve::intersect(&list)?;
        write(out, "out", Box::into_raw(Box::new(TvdpCurve(c))))
    })
}

// composition

/// k-fold composition ledger. `tol` is used by the types mode only.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_compose(
    eps: f64,
    delta: f64,
    eta: f64,
    k: usize,
    mode: TvdpComposeMode,
    tol: f64,
    out: *mut *mut TvdpLedger,
) -> TvdpStatus {
    guard(|| {
        let l = match mode {
            TvdpComposeMode::Kairouz => compose_kairouz(eps, delta, k)?,
            TvdpComposeMode::Exact => compose_exact(&PrivacyBudget::new(eps, delta, eta)?, k)?,
            TvdpComposeMode::Types => compose_types_approx(&PrivacyBudget::new(eps, delta, eta)?, k, tol)?,
        };
        write(out, "out", Box::into_raw(Box::new(TvdpLedger(l))))
    })
}

/// # Safety
/// `ledger` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ledger_free(ledger: *mut TvdpLedger) {
    if !ledger.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(ledger))));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ledger_len(ledger: *const TvdpLedger, out: *mut usize) -> TvdpStatus {
    guard(|| write(out, "out", deref(ledger, "ledger")?.0.entries.len()))
}

/// Entry `index`: its `j`, epsilon and delta.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ledger_entry(
    ledger: *const TvdpLedger,
    index: usize,
    j: *mut usize,
    eps: *mut f64,
    delta: *mut f64,
) -> TvdpStatus {
    guard(|| {
        let l = &deref(ledger, "ledger")?.0;
        let e = l.entries.get(index).ok_or_else(|| {
            Fail(
                TvdpStatus::InvalidArgument,
                format!("index {index} out of range (ledger has {} entries)", l.entries.len()),
            )
        })?;
        write(j, "j", e.j)?;
        write(eps, "eps", e.eps)?;
        write(delta, "delta", e.delta)
    })
}

/// Total variation after composition.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ledger_tv(ledger: *const TvdpLedger, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", deref(ledger, "ledger")?.0.eta))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ledger_to_curve(ledger: *const TvdpLedger, out: *mut *mut TvdpCurve) -> TvdpStatus {
    guard(|| {
        let c = deref(ledger, "ledger")?.0.to_curve();
        write(out, "out", Box::into_raw(Box::new(TvdpCurve(c))))
    })
}

// amplification and limits

/// Budget after subsampling with rate `p`.
///
/// # Safety
/// Out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_subsample(
    eps: f64,
    delta: f64,
    eta: f64,
    p: f64,
    out_eps: *mut f64,
    out_delta: *mut f64,
    out_eta: *mut f64,
) -> TvdpStatus {
    guard(|| {
        let s = subsample(&PrivacyBudget::new(eps, delta, eta)?, p)?;
        write(out_eps, "out_eps", s.epsilon())?;
        write(out_delta, "out_delta", s.delta())?;
        write(out_eta, "out_eta", s.eta())
    })
}

/// Sup distance between the k-fold pure-DP curve and its Gaussian limit.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_clt_gap(eps: f64, eta: f64, k: usize, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", clt_gap(eps, eta, k)?))
}

// mechanisms

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_laplace_tv(eps: f64, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", laplace_tv(eps)?))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_gaussian_tv(mu: f64, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", gaussian_tv(&GaussianParams::new(mu)?)))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_staircase_tv(gamma: f64, eps: f64, sensitivity: f64, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", staircase_tv(&StaircaseSpec::new(gamma, eps, sensitivity)?)))
}

// local DP

/// Channel from a row-major `rows x cols` matrix.
///
/// # Safety
/// `data` must hold `rows * cols` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_channel_new(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut TvdpChannel,
) -> TvdpStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows.checked_mul(cols).ok_or_else(|| Fail(TvdpStatus::InvalidArgument, "matrix too large".into()))?;
        let flat = std::slice::from_raw_parts(data, len);
        let matrix = if cols == 0 { Vec::new() } else { flat.chunks(cols).map(<[f64]>::to_vec).collect() };
        let c = Channel::new(matrix)?;
        write(out, "out", Box::into_raw(Box::new(TvdpChannel(c))))
    })
}

/// Extremal three-output channel for (eps, eta).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_channel_q_star(eps: f64, eta: f64, out: *mut *mut TvdpChannel) -> TvdpStatus {
    guard(|| write(out, "out", Box::into_raw(Box::new(TvdpChannel(q_star(eps, eta)?)))))
}

/// # Safety
/// `channel` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tvdp_channel_free(channel: *mut TvdpChannel) {
    if !channel.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(channel))));
    }
}

/// Local-DP epsilon (may be infinity).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_channel_epsilon(channel: *const TvdpChannel, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", ldp_epsilon(&deref(channel, "channel")?.0)))
}

/// Largest TV between two rows.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_channel_tv(channel: *const TvdpChannel, out: *mut f64) -> TvdpStatus {
    guard(|| write(out, "out", dobrushin(&deref(channel, "channel")?.0)))
}

/// Closed-form bounds; `tv_in` is the input TV for the chi-square bound.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tvdp_ldp_bounds(eps: f64, eta: f64, tv_in: f64, out: *mut TvdpLdpBounds) -> TvdpStatus {
    guard(|| {
        let b = TvdpLdpBounds {
            max_kl: max_fdiv(eps, eta, &DivergenceSpec::Kl)?,
            max_chi2: max_fdiv(eps, eta, &DivergenceSpec::ChiSquared)?,
            max_tv: max_fdiv(eps, eta, &DivergenceSpec::Tv)?,
            kl_contraction: kl_contraction_bound(eps, eta),
            chi2_output: chi2_output_bound(eps, eta, tv_in)?,
        };
        write(out, "out", b)
    })
}
