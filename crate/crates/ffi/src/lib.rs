//! C interface to `cavity-memory`.
//!
//! A `CqmModel` is created from the flat JSON parameter layout and owned by
//! the caller until passed to `cqm_model_free`. Every fallible call returns a
//! `CqmStatus`; on failure `cqm_last_error_message` describes the error on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cavity_memory::metrics::MetricsError;
use cavity_memory::spectral::SpectralError;
use cavity_memory::statesim::{self, StateSimError};
use cavity_memory::{
    t_matrix, Cavity, DetectorModel, MetricReport, ParamError, ParamSet, PulseSpec, Quadrature, QuadratureConfig,
    Qubit, C64,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    InvalidParams = 4,
    Quadrature = 5,
    ZeroProbability = 6,
    Numerical = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CqmComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for CqmComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<CqmComplex> for C64 {
    fn from(z: CqmComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Scattering matrix at one wavenumber, measured from the cavity resonance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CqmScattering {
    pub k: f64,
    pub phase_factor: CqmComplex,
    pub t_ll: CqmComplex,
    pub t_rr: CqmComplex,
    pub t_lr: CqmComplex,
    pub t_rl: CqmComplex,
}

/// Closed-form figures of merit. `cooperativity` is NaN when `gamma = 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CqmMetrics {
    pub cooperativity: f64,
    pub f_swap: f64,
    pub f_swap_leading: f64,
    pub f_qm: f64,
    pub p_kl: f64,
    pub p_l: f64,
    pub p_qm: f64,
    pub p_qm_conditional: f64,
    pub f_storage_retrieval: f64,
}

/// State-simulation results plus the largest deviation from the closed forms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CqmOracle {
    pub p_kl: f64,
    pub p_l: f64,
    pub p_qm: f64,
    pub fidelity: f64,
    pub loss_weight: f64,
    pub readout_probability: f64,
    pub p_qm_conditional: f64,
    pub max_closed_form_delta: f64,
}

/// Opaque model handle.
pub struct CqmModel {
    params: ParamSet,
    cavity: Cavity,
    pulse: PulseSpec,
    quad: Quadrature,
    detector: DetectorModel,
}

struct Failure(CqmStatus, String);

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Failure(CqmStatus::InvalidParams, e.to_string())
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        let status = match e {
            SpectralError::Param(_) => CqmStatus::InvalidParams,
            _ => CqmStatus::Quadrature,
        };
        Failure(status, e.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        let status = match &e {
            MetricsError::Param(_) | MetricsError::UnequalCouplings(_) => CqmStatus::InvalidParams,
            MetricsError::Spectral(SpectralError::Param(_)) => CqmStatus::InvalidParams,
            MetricsError::Spectral(_) => CqmStatus::Quadrature,
            MetricsError::ZeroScatteringWeight(_) => CqmStatus::ZeroProbability,
            MetricsError::Scattering(_) => CqmStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<StateSimError> for Failure {
    fn from(e: StateSimError) -> Self {
        let status = match e {
            StateSimError::Metrics(m) => return m.into(),
            StateSimError::Spectral(s) => return s.into(),
            StateSimError::Param(_) => CqmStatus::InvalidParams,
            StateSimError::ZeroProbability(_) => CqmStatus::ZeroProbability,
            _ => CqmStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CqmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            CqmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CqmStatus::NullPointer, format!("`{what}` is null"))
}

/// # Safety
/// `ptr` is null or points to a live `T`.
unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `ptr` is null or points to writable storage for a `T`.
unsafe fn deref_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

fn qubit(c_l: CqmComplex, c_r: CqmComplex) -> Result<Qubit, Failure> {
    Ok(Qubit::new(c_l.into(), c_r.into())?)
}

/// Parses a JSON parameter set and stores a new handle in `*out`. Detector
/// efficiency starts at 1 and the quadrature at its default node counts.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_model_from_json(json: *const c_char, out: *mut *mut CqmModel) -> CqmStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = std::ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure(CqmStatus::InvalidUtf8, e.to_string()))?;
        let params = ParamSet::from_json(text).map_err(|e| Failure(CqmStatus::InvalidJson, e.to_string()))?;
        let (cavity, pulse) = params.validate()?;
        let model =
            CqmModel { params, cavity, pulse, quad: Quadrature::default(), detector: DetectorModel::Constant(1.0) };
        *out = Box::into_raw(Box::new(model));
        Ok(())
    })
}

/// # Safety
/// `model` is null or a handle from `cqm_model_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cqm_model_free(model: *mut CqmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Flat detector efficiency in `(0, 1]`.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqm_model_set_eta(model: *mut CqmModel, eta: f64) -> CqmStatus {
    guard(|| {
        let model = deref_mut(model, "model")?;
        model.detector = DetectorModel::Constant(eta).validate()?;
        Ok(())
    })
}

/// Piecewise-linear efficiency through `(k[i], eta[i])`, clamped outside.
///
/// # Safety
/// `model` must be a live handle; `k` and `eta` must each hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn cqm_model_set_eta_table(
    model: *mut CqmModel,
    k: *const f64,
    eta: *const f64,
    len: usize,
) -> CqmStatus {
    guard(|| {
        let model = deref_mut(model, "model")?;
        if k.is_null() || eta.is_null() {
            return Err(null(if k.is_null() { "k" } else { "eta" }));
        }
        let k = std::slice::from_raw_parts(k, len).to_vec();
        let eta = std::slice::from_raw_parts(eta, len).to_vec();
        model.detector = DetectorModel::Tabulated { k, eta }.validate()?;
        Ok(())
    })
}

/// Node counts for the Gaussian and Lorentzian rules.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cqm_model_set_quadrature(
    model: *mut CqmModel,
    gaussian_nodes: usize,
    lorentzian_nodes: usize,
) -> CqmStatus {
    guard(|| {
        let model = deref_mut(model, "model")?;
        model.quad = Quadrature::new(QuadratureConfig { gaussian_nodes, lorentzian_nodes })?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_scattering(model: *const CqmModel, k: f64, out: *mut CqmScattering) -> CqmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let out = deref_mut(out, "out")?;
        if !k.is_finite() {
            return Err(Failure(CqmStatus::InvalidParams, format!("k = {k} is not finite")));
        }
        let t = t_matrix(k, &model.cavity).map_err(|e| Failure(CqmStatus::Numerical, e.to_string()))?;
        *out = CqmScattering {
            k,
            phase_factor: t.phase_factor.into(),
            t_ll: t.t_ll.into(),
            t_rr: t.t_rr.into(),
            t_lr: t.t_lr.into(),
            t_rl: t.t_rl.into(),
        };
        Ok(())
    })
}

/// Closed forms for the input qubit `c_l|L⟩ + c_r|R⟩`, which must be normalized.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_metrics(
    model: *const CqmModel,
    c_l: CqmComplex,
    c_r: CqmComplex,
    out: *mut CqmMetrics,
) -> CqmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let out = deref_mut(out, "out")?;
        let r = MetricReport::evaluate(&model.params, &model.quad, &model.detector, &qubit(c_l, c_r)?)?;
        *out = CqmMetrics {
            cooperativity: r.cooperativity.unwrap_or(f64::NAN),
            f_swap: r.f_swap,
            f_swap_leading: r.f_swap_leading,
            f_qm: r.f_qm,
            p_kl: r.p_kl,
            p_l: r.p_l,
            p_qm: r.p_qm,
            p_qm_conditional: r.p_qm_conditional,
            f_storage_retrieval: r.f_storage_retrieval,
        };
        Ok(())
    })
}

/// Storage, retrieval and readout simulated on the spectral grid.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cqm_oracle(
    model: *const CqmModel,
    c_l: CqmComplex,
    c_r: CqmComplex,
    out: *mut CqmOracle,
) -> CqmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let out = deref_mut(out, "out")?;
        let input = qubit(c_l, c_r)?;
        let (r, deltas) =
            statesim::compare_with_closed_form(&model.cavity, &model.pulse, &model.quad, &input, &model.detector)?;
        *out = CqmOracle {
            p_kl: r.p_kl,
            p_l: r.p_l,
            p_qm: r.p_qm,
            fidelity: r.fidelity,
            loss_weight: r.loss_weight,
            readout_probability: r.readout_probability,
            p_qm_conditional: r.p_qm_conditional,
            max_closed_form_delta: deltas.max_abs(),
        };
        Ok(())
    })
}

/// Message for the most recent failure on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cqm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cqm_status_message(status: CqmStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CqmStatus::Ok => c"ok",
        CqmStatus::NullPointer => c"null pointer argument",
        CqmStatus::InvalidUtf8 => c"string is not valid UTF-8",
        CqmStatus::InvalidJson => c"malformed parameter JSON",
        CqmStatus::InvalidParams => c"invalid parameters",
        CqmStatus::Quadrature => c"quadrature failure",
        CqmStatus::ZeroProbability => c"conditioning event has zero probability",
        CqmStatus::Numerical => c"numerical failure",
        CqmStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn cqm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
