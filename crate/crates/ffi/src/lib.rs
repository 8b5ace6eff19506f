//! C interface to `qdb-core`.
//!
//! Every fallible function returns a [`QdbStatus`] and writes its result
//! through an out-pointer. On failure `qdb_last_error_message` describes the
//! problem for the calling thread. Handles (`QdbModel`, `QdbExperimentSet`,
//! `QdbDistribution`) are opaque and must be released with their `_free`
//! function. Strings returned by the library stay owned by it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdb_core::model::{self as core_model, fit_experiment_with};
use qdb_core::{
    embedded_experiments, load_experiments, markov_total_probability, pignistic_transform,
    ExperimentRecord, FaceType, FittedModel, HamiltonianParams, MassFunction, ModelConfig,
    Prediction, QdbError,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdbStatus {
    Ok = 0,
    NullPointer = 1,
    /// Index out of range, non-UTF-8 string or similar misuse.
    InvalidArgument = 2,
    /// A value the model rejects, e.g. priors that do not sum to one.
    Validation = 3,
    Parse = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdbFaceType {
    Wide = 0,
    Narrow = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QdbPrediction {
    pub p_attack_given_good: f64,
    pub p_attack_given_bad: f64,
    pub p_uncertain_given_good: f64,
    pub p_uncertain_given_bad: f64,
    /// Probability of attacking after categorizing.
    pub p_total_cd: f64,
    /// Probability of attacking without categorizing.
    pub p_attack_d_alone: f64,
    pub interference: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QdbFitResult {
    pub h_g: f64,
    pub h_b: f64,
    pub residual_good: f64,
    pub residual_bad: f64,
    /// Non-zero when a target lay outside the reachable range.
    pub clamped: i32,
    pub prediction: QdbPrediction,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdbExperiment {
    pub face_type: QdbFaceType,
    pub p_g: f64,
    pub p_attack_given_good: f64,
    pub p_b: f64,
    pub p_attack_given_bad: f64,
    pub p_t_observed: f64,
    pub p_attack_observed: f64,
}

/// Model settings: deliberation time, measurement weights and fit search range.
pub struct QdbModel {
    config: ModelConfig,
}

pub struct QdbExperimentSet {
    records: Vec<ExperimentRecord>,
    source_ids: Vec<CString>,
}

/// Pignistic probabilities, one per frame label in sorted order.
pub struct QdbDistribution {
    entries: Vec<(CString, f64)>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(err: &QdbError) -> QdbStatus {
    match err {
        QdbError::Parse { .. }
        | QdbError::MassSpec { .. }
        | QdbError::Json(_)
        | QdbError::Csv(_) => QdbStatus::Parse,
        QdbError::Io { .. } => QdbStatus::Io,
        _ => QdbStatus::Validation,
    }
}

struct Failure(QdbStatus, String);

impl From<QdbError> for Failure {
    fn from(err: QdbError) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(QdbStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `body`, turning errors and panics into a status plus a thread-local message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QdbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            QdbStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {message}"));
            QdbStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            QdbStatus::InvalidArgument,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

impl From<Prediction> for QdbPrediction {
    fn from(p: Prediction) -> Self {
        QdbPrediction {
            p_attack_given_good: p.p_attack_given_good,
            p_attack_given_bad: p.p_attack_given_bad,
            p_uncertain_given_good: p.p_uncertain_given_good,
            p_uncertain_given_bad: p.p_uncertain_given_bad,
            p_total_cd: p.p_total_cd,
            p_attack_d_alone: p.p_attack_d_alone,
            interference: p.interference,
        }
    }
}

impl From<&FittedModel> for QdbFitResult {
    fn from(f: &FittedModel) -> Self {
        QdbFitResult {
            h_g: f.params.h_g,
            h_b: f.params.h_b,
            residual_good: f.residual_good,
            residual_bad: f.residual_bad,
            clamped: f.clamped() as i32,
            prediction: f.prediction.into(),
        }
    }
}

impl From<&ExperimentRecord> for QdbExperiment {
    fn from(r: &ExperimentRecord) -> Self {
        QdbExperiment {
            face_type: match r.face_type {
                FaceType::Wide => QdbFaceType::Wide,
                FaceType::Narrow => QdbFaceType::Narrow,
            },
            p_g: r.p_g,
            p_attack_given_good: r.p_attack_given_good,
            p_b: r.p_b,
            p_attack_given_bad: r.p_attack_given_bad,
            p_t_observed: r.p_t_observed,
            p_attack_observed: r.p_attack_observed,
        }
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qdb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn qdb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Model with default settings (t = pi/2, weights 0.25 and 0.5, h in [-10, 10]
/// at step 1e-3). Never returns null.
#[no_mangle]
pub extern "C" fn qdb_model_new() -> *mut QdbModel {
    Box::into_raw(Box::new(QdbModel {
        config: ModelConfig::default(),
    }))
}

/// # Safety
/// `model` must come from `qdb_model_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdb_model_free(model: *mut QdbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn update_model(model: *mut QdbModel, edit: impl FnOnce(&mut ModelConfig)) -> QdbStatus {
    guard(|| {
        let model = model.as_mut().ok_or_else(|| null("model"))?;
        let mut config = model.config;
        edit(&mut config);
        config.validate()?;
        model.config = config;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdb_model_set_time(model: *mut QdbModel, t: f64) -> QdbStatus {
    update_model(model, |c| c.time = t)
}

/// Uncertain-state weights with and without a categorization step.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdb_model_set_weights(
    model: *mut QdbModel,
    categorized: f64,
    decision_alone: f64,
) -> QdbStatus {
    update_model(model, |c| {
        c.weights.categorized = categorized;
        c.weights.decision_alone = decision_alone;
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdb_model_set_search(
    model: *mut QdbModel,
    h_min: f64,
    h_max: f64,
    step: f64,
) -> QdbStatus {
    update_model(model, |c| {
        c.search.lower = h_min;
        c.search.upper = h_max;
        c.search.step = step;
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_predict(
    model: *const QdbModel,
    p_g: f64,
    p_b: f64,
    h_g: f64,
    h_b: f64,
    out: *mut QdbPrediction,
) -> QdbStatus {
    guard(|| {
        let config = borrow(model, "model")?.config;
        let params = HamiltonianParams::new(h_g, h_b, config.time)?;
        let p = core_model::predict_with(p_g, p_b, &params, &config.weights)?;
        write(out, "out", p.into())
    })
}

/// Fits `h_g` and `h_b` to the observed conditionals and predicts both conditions.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_fit(
    model: *const QdbModel,
    p_g: f64,
    p_b: f64,
    observed_attack_given_good: f64,
    observed_attack_given_bad: f64,
    out: *mut QdbFitResult,
) -> QdbStatus {
    guard(|| {
        let config = borrow(model, "model")?.config;
        let fitted = fit_experiment_with(
            p_g,
            p_b,
            observed_attack_given_good,
            observed_attack_given_bad,
            &config,
        )?;
        write(out, "out", QdbFitResult::from(&fitted))
    })
}

/// Reported attack probability given a category, via the matrix exponential.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_conditional(
    h: f64,
    t: f64,
    uncertain_weight: f64,
    out: *mut f64,
) -> QdbStatus {
    guard(|| {
        HamiltonianParams::new(h, h, t)?;
        write(
            out,
            "out",
            core_model::qdb_conditional(h, t, uncertain_weight),
        )
    })
}

/// Same quantity as `qdb_conditional` at t = pi/2, from the closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_closed_form_conditional(
    h: f64,
    uncertain_weight: f64,
    out: *mut f64,
) -> QdbStatus {
    guard(|| {
        if !h.is_finite() {
            return Err(Failure(
                QdbStatus::Validation,
                format!("h = {h} is not finite"),
            ));
        }
        write(
            out,
            "out",
            core_model::closed_form_conditional(h, uncertain_weight),
        )
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_markov_total_probability(
    p_g: f64,
    p_attack_given_good: f64,
    p_b: f64,
    p_attack_given_bad: f64,
    out: *mut f64,
) -> QdbStatus {
    guard(|| {
        write(
            out,
            "out",
            markov_total_probability(p_g, p_attack_given_good, p_b, p_attack_given_bad)?,
        )
    })
}

fn experiment_set(records: Vec<ExperimentRecord>) -> Box<QdbExperimentSet> {
    let source_ids = records
        .iter()
        .map(|r| CString::new(r.source_id.replace('\0', " ")).expect("NULs removed"))
        .collect();
    Box::new(QdbExperimentSet {
        records,
        source_ids,
    })
}

/// The twelve published records (six sources, wide and narrow faces).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_embedded(out: *mut *mut QdbExperimentSet) -> QdbStatus {
    guard(|| {
        write(
            out,
            "out",
            Box::into_raw(experiment_set(embedded_experiments())),
        )
    })
}

/// Loads a CSV or JSON record file. On failure `*out` is set to null.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_load(
    path: *const c_char,
    out: *mut *mut QdbExperimentSet,
) -> QdbStatus {
    if !out.is_null() {
        out.write(ptr::null_mut());
    }
    guard(|| {
        let path = str_arg(path, "path")?;
        let records = load_experiments(path)?;
        write(out, "out", Box::into_raw(experiment_set(records)))
    })
}

/// # Safety
/// `set` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_len(set: *const QdbExperimentSet) -> usize {
    set.as_ref().map_or(0, |s| s.records.len())
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_get(
    set: *const QdbExperimentSet,
    index: usize,
    out: *mut QdbExperiment,
) -> QdbStatus {
    guard(|| {
        let set = borrow(set, "set")?;
        let record = set.records.get(index).ok_or_else(|| {
            Failure(
                QdbStatus::InvalidArgument,
                format!(
                    "index {index} out of range for {} records",
                    set.records.len()
                ),
            )
        })?;
        write(out, "out", record.into())
    })
}

/// Source name of record `index`, owned by `set`; null when out of range.
///
/// # Safety
/// `set` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_source_id(
    set: *const QdbExperimentSet,
    index: usize,
) -> *const c_char {
    set.as_ref()
        .and_then(|s| s.source_ids.get(index))
        .map_or(ptr::null(), |id| id.as_ptr())
}

/// # Safety
/// `set` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdb_experiments_free(set: *mut QdbExperimentSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Pignistic transform of a mass spec such as `"A:0.4 A,W:0.6"`.
/// On failure `*out` is set to null.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_pignistic(
    spec: *const c_char,
    out: *mut *mut QdbDistribution,
) -> QdbStatus {
    if !out.is_null() {
        out.write(ptr::null_mut());
    }
    guard(|| {
        let mass: MassFunction = str_arg(spec, "spec")?.parse()?;
        let entries = pignistic_transform(&mass)
            .into_iter()
            .map(|(label, p)| {
                (
                    CString::new(label.replace('\0', " ")).expect("NULs removed"),
                    p,
                )
            })
            .collect();
        write(
            out,
            "out",
            Box::into_raw(Box::new(QdbDistribution { entries })),
        )
    })
}

/// # Safety
/// `dist` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qdb_distribution_len(dist: *const QdbDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.entries.len())
}

/// Label and probability of entry `index`. The label is owned by `dist`.
///
/// # Safety
/// `dist` must be a live handle; `label` and `probability` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdb_distribution_get(
    dist: *const QdbDistribution,
    index: usize,
    label: *mut *const c_char,
    probability: *mut f64,
) -> QdbStatus {
    guard(|| {
        let dist = borrow(dist, "dist")?;
        let (name, p) = dist.entries.get(index).ok_or_else(|| {
            Failure(
                QdbStatus::InvalidArgument,
                format!(
                    "index {index} out of range for {} entries",
                    dist.entries.len()
                ),
            )
        })?;
        if label.is_null() {
            return Err(null("label"));
        }
        write(probability, "probability", *p)?;
        write(label, "label", name.as_ptr())
    })
}

/// # Safety
/// `dist` must come from `qdb_pignistic` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdb_distribution_free(dist: *mut QdbDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}
