//! C ABI over `qerase`.
//!
//! States and channels are opaque handles created from JSON and released
//! with their `_free` function. Every call returns a [`QeStatus`] whose
//! values match the CLI exit codes; on failure a message is available from
//! [`qe_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`qe_string_free`]. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::Deserialize;

use qerase::channels::{apply_local_channel, KrausChannel};
use qerase::correlations::{discord, OptimizerConfig};
use qerase::ensembles::{monte_carlo_verify, EnsembleConfig, StateEnsemble};
use qerase::io::{ChannelFile, StateFile};
use qerase::qmath::DensityOperator;
use qerase::scenario::{run_scenario, Scenario, ScenarioParams};
use qerase::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeStatus {
    Ok = 0,
    /// Panic or other internal failure.
    Internal = 1,
    /// Malformed JSON or a matrix that is not a valid state/channel.
    Parse = 2,
    UnsupportedDimension = 3,
    InvalidParameter = 4,
    /// A bound check failed; any report out-parameter is still filled.
    BoundViolation = 5,
    NullPointer = 6,
}

/// Density operator over labelled subsystems.
pub struct QeState(DensityOperator);

/// Kraus channel.
pub struct QeChannel(KrausChannel);

/// Optimizer settings for discord; see [`qe_optimizer_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QeOptimizerConfig {
    pub grid_resolution: usize,
    pub refinement_iterations: usize,
    pub random_restarts: usize,
    pub seed: u64,
    /// Bits.
    pub convergence_tol: f64,
}

impl From<QeOptimizerConfig> for OptimizerConfig {
    fn from(c: QeOptimizerConfig) -> Self {
        OptimizerConfig {
            grid_resolution: c.grid_resolution,
            refinement_iterations: c.refinement_iterations,
            random_restarts: c.random_restarts,
            seed: c.seed,
            convergence_tol: c.convergence_tol,
        }
    }
}

impl From<OptimizerConfig> for QeOptimizerConfig {
    fn from(c: OptimizerConfig) -> Self {
        QeOptimizerConfig {
            grid_resolution: c.grid_resolution,
            refinement_iterations: c.refinement_iterations,
            random_restarts: c.random_restarts,
            seed: c.seed,
            convergence_tol: c.convergence_tol,
        }
    }
}

/// Correlations of a bipartite state, in bits.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QeCorrelations {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    /// Signed `S(unmeasured | measured)`.
    pub conditional_entropy: f64,
    pub optimizer_slack: f64,
}

/// Aggregate of a Monte Carlo sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QeMonteCarloSummary {
    pub trials: usize,
    pub failed_trials: usize,
    pub total_violations: usize,
    pub erasure_violations: usize,
    pub total_entropy_violations: usize,
    pub generalized_landauer_violations: usize,
    pub mutual_information_violations: usize,
    pub creation_violations: usize,
    pub creation_evaluated: usize,
    pub entangled_memory_trials: usize,
    pub erasure_min_margin: f64,
    pub optimizer_slack: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(QeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::Io(_) => QeStatus::Parse,
            Error::UnsupportedDimension(_) => QeStatus::UnsupportedDimension,
            _ => QeStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<QeStatus, Failure>) -> QeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QeStatus::Internal
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass pointers obtained from this library or valid C objects
    unsafe { p.as_ref() }.ok_or_else(|| Failure(QeStatus::NullPointer, format!("`{what}` is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure(QeStatus::NullPointer, format!("`{what}` is null")))
    } else {
        Ok(p)
    }
}

fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(QeStatus::NullPointer, format!("`{what}` is null")));
    }
    // SAFETY: non-null and NUL-terminated per the API contract
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(QeStatus::InvalidParameter, format!("`{what}` is not UTF-8")))
}

fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(QeStatus::Internal, "string contains NUL".into()))?;
    // SAFETY: out checked non-null by the caller of this helper
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn optimizer(cfg: *const QeOptimizerConfig) -> OptimizerConfig {
    // SAFETY: null means defaults; otherwise a valid struct per the contract
    unsafe { cfg.as_ref() }.map(|c| (*c).into()).unwrap_or_default()
}

/// Message of the last failure on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn qe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fills `out` with the default optimizer settings.
///
/// # Safety
/// `out` must be null or point to writable memory for one struct.
#[no_mangle]
pub unsafe extern "C" fn qe_optimizer_default(out: *mut QeOptimizerConfig) -> QeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        unsafe { *out = OptimizerConfig::default().into() };
        Ok(QeStatus::Ok)
    })
}

/// Parses a state file (`dims`, `labels`, `matrix` of `[re, im]` pairs).
///
/// # Safety
/// `json` must be null or NUL-terminated; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_state_from_json(json: *const c_char, out: *mut *mut QeState) -> QeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = read_str(json, "json")?;
        let state = StateFile::parse(text)
            .and_then(|f| f.to_state())
            .map_err(|e| Failure(QeStatus::Parse, e.to_string()))?;
        unsafe { *out = Box::into_raw(Box::new(QeState(state))) };
        Ok(QeStatus::Ok)
    })
}

/// Serializes a state in the state-file format.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_state_to_json(state: *const QeState, out: *mut *mut c_char) -> QeStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        let out = out_ptr(out, "out")?;
        write_string(out, StateFile::from_state(&state.0).to_json())?;
        Ok(QeStatus::Ok)
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_state_free(state: *mut QeState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Total Hilbert-space dimension.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_state_dim(state: *const QeState, out: *mut usize) -> QeStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        let out = out_ptr(out, "out")?;
        unsafe { *out = state.0.dim() };
        Ok(QeStatus::Ok)
    })
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `state` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_state_entropy(state: *const QeState, out: *mut f64) -> QeStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        let out = out_ptr(out, "out")?;
        unsafe { *out = state.0.entropy() };
        Ok(QeStatus::Ok)
    })
}

/// Discord of a bipartite state measured on subsystem `side`. `config` may
/// be null for defaults.
///
/// # Safety
/// Pointers must be null or valid as documented for the other functions.
#[no_mangle]
pub unsafe extern "C" fn qe_discord(
    state: *const QeState,
    side: *const c_char,
    config: *const QeOptimizerConfig,
    out: *mut QeCorrelations,
) -> QeStatus {
    guard(|| {
        let state = non_null(state, "state")?;
        let side = read_str(side, "side")?;
        let out = out_ptr(out, "out")?;
        let cfg = optimizer(config);
        cfg.validate()?;
        let r = discord(&state.0, side, &cfg)?;
        unsafe {
            *out = QeCorrelations {
                mutual_information: r.mutual_information,
                classical_correlation: r.classical_correlation,
                discord: r.discord,
                conditional_entropy: r.conditional_entropy,
                optimizer_slack: r.optimizer_slack,
            }
        };
        Ok(QeStatus::Ok)
    })
}

/// Parses `{"kraus": [matrix, …]}`.
///
/// # Safety
/// `json` must be null or NUL-terminated; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_from_json(json: *const c_char, out: *mut *mut QeChannel) -> QeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = read_str(json, "json")?;
        let ch = ChannelFile::parse(text)
            .and_then(|f| f.to_channel())
            .map_err(|e| Failure(QeStatus::Parse, e.to_string()))?;
        unsafe { *out = Box::into_raw(Box::new(QeChannel(ch))) };
        Ok(QeStatus::Ok)
    })
}

/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_channel_free(channel: *mut QeChannel) {
    if !channel.is_null() {
        drop(unsafe { Box::from_raw(channel) });
    }
}

/// Applies `channel` to subsystem `side`; the result is a new handle.
///
/// # Safety
/// Pointers must be null or valid as documented for the other functions.
#[no_mangle]
pub unsafe extern "C" fn qe_apply_local_channel(
    channel: *const QeChannel,
    state: *const QeState,
    side: *const c_char,
    out: *mut *mut QeState,
) -> QeStatus {
    guard(|| {
        let channel = non_null(channel, "channel")?;
        let state = non_null(state, "state")?;
        let side = read_str(side, "side")?;
        let out = out_ptr(out, "out")?;
        let result = apply_local_channel(&channel.0, &state.0, side)?;
        unsafe { *out = Box::into_raw(Box::new(QeState(result))) };
        Ok(QeStatus::Ok)
    })
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct ParamsJson {
    side: Option<String>,
    beta: Option<f64>,
    dist: Option<Vec<f64>>,
    energies: Option<Vec<f64>>,
    optimizer: Option<OptimizerConfig>,
}

/// Runs scenario `name` (`bleach`, `thermalize`, `dephase`, `landauer`) and
/// writes the JSON report to `report`. `params_json` may be null; otherwise
/// an object with optional `side`, `beta`, `dist`, `energies`, `optimizer`.
/// Returns `BOUND_VIOLATION` with the report filled if any check fails.
///
/// # Safety
/// Pointers must be null or valid as documented for the other functions.
#[no_mangle]
pub unsafe extern "C" fn qe_run_scenario(
    name: *const c_char,
    state: *const QeState,
    params_json: *const c_char,
    report: *mut *mut c_char,
) -> QeStatus {
    guard(|| {
        let kind: Scenario = read_str(name, "name")?.parse()?;
        let state = non_null(state, "state")?;
        let out = out_ptr(report, "report")?;
        let p: ParamsJson = if params_json.is_null() {
            ParamsJson::default()
        } else {
            serde_json::from_str(read_str(params_json, "params_json")?)
                .map_err(|e| Failure(QeStatus::Parse, format!("params_json: {e}")))?
        };
        let params = ScenarioParams {
            side: p.side.unwrap_or_else(|| "B".into()),
            beta: p.beta,
            dist: p.dist,
            energies: p.energies,
            optimizer: p.optimizer.unwrap_or_default(),
        };
        let digest_input = serde_json::to_vec(&StateFile::from_state(&state.0)).unwrap_or_default();
        let rec = run_scenario(kind, &state.0, &params, &qerase::io::digest(&[&digest_input, kind.name().as_bytes()]))?;
        let violated = rec.violated();
        write_string(out, rec.to_json())?;
        if violated {
            set_error("bound violated");
            Ok(QeStatus::BoundViolation)
        } else {
            Ok(QeStatus::Ok)
        }
    })
}

/// Monte Carlo sweep over random states on `A ⊗ B` and random channels on
/// `B` with at most `kraus_count` Kraus operators. `quantum_classical`
/// selects quantum-classical initial states. Returns `BOUND_VIOLATION` with
/// `out` filled if any check fails.
///
/// # Safety
/// `config` null or valid; `out` null or writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qe_montecarlo(
    seed: u64,
    dim_a: usize,
    dim_b: usize,
    env_dim: usize,
    kraus_count: usize,
    trials: usize,
    quantum_classical: bool,
    config: *const QeOptimizerConfig,
    out: *mut QeMonteCarloSummary,
) -> QeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let mut cfg = EnsembleConfig::new(seed, dim_a, dim_b, trials);
        cfg.env_dim = env_dim;
        cfg.kraus_count = kraus_count;
        if quantum_classical {
            cfg.state = StateEnsemble::QuantumClassical;
        }
        let s = monte_carlo_verify(&cfg, &optimizer(config))?.summary;
        unsafe {
            *out = QeMonteCarloSummary {
                trials: s.trials,
                failed_trials: s.failed_trials,
                total_violations: s.total_violations(),
                erasure_violations: s.erasure.violations,
                total_entropy_violations: s.total_entropy.violations,
                generalized_landauer_violations: s.generalized_landauer.violations,
                mutual_information_violations: s.mutual_information.violations,
                creation_violations: s.creation.violations,
                creation_evaluated: s.creation.evaluated,
                entangled_memory_trials: s.entangled_memory_trials,
                erasure_min_margin: s.erasure.min_margin,
                optimizer_slack: s.optimizer_slack,
            }
        };
        if s.total_violations() > 0 {
            set_error("bound violated");
            Ok(QeStatus::BoundViolation)
        } else {
            Ok(QeStatus::Ok)
        }
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
