//! C ABI over `adasac`.
//!
//! Datasets and run results are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns an [`AdasacStatus`]; on failure a description is available from
//! [`adasac_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use adasac::bench::Engine;
use adasac::consensus::{
    crossover_probability, mutation_probability, AdaptiveParams, ConsensusError,
};
use adasac::datagen::{generate, SyntheticSpec, Task, TaskData};
use adasac::estimators::{
    count_inliers, Correspondence, Dataset, Estimator, HomographyEstimator, LineEstimator,
    ModelParams, Point2,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdasacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdasacTask {
    Line = 0,
    Homography = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdasacEngine {
    Ransac = 0,
    Gasac = 1,
    Adaptive = 2,
}

/// Genetic engine settings. GASAC only reads `population_size`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdasacParams {
    pub gamma: f64,
    pub delta: f64,
    pub population_size: usize,
    pub elitism: usize,
}

/// Opaque dataset handle.
pub struct AdasacDataset {
    data: TaskData,
}

/// Opaque result of one engine run.
pub struct AdasacResult {
    best_so_far: Vec<usize>,
    sample: Vec<usize>,
    model: Vec<f64>,
    inliers: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(AdasacStatus, String);

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure(AdasacStatus::InvalidArgument, message.into())
    }

    fn null(name: &str) -> Self {
        Failure(AdasacStatus::NullPointer, format!("`{name}` is null"))
    }
}

impl From<ConsensusError> for Failure {
    fn from(e: ConsensusError) -> Self {
        let status = match e {
            ConsensusError::InsufficientData { .. } => AdasacStatus::InsufficientData,
            _ => AdasacStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> AdasacStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdasacStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            AdasacStatus::Panic
        }
    }
}

fn store<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null before building `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

fn coords<'a>(values: *const f64, count: usize, name: &str) -> Result<&'a [f64], Failure> {
    if values.is_null() {
        return Err(Failure::null(name));
    }
    // SAFETY: the caller promises `count` readable doubles at `values`.
    Ok(unsafe { slice::from_raw_parts(values, count) })
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn adasac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Defaults: gamma 3, delta 0.2, population 10, elitism 1.
#[no_mangle]
pub extern "C" fn adasac_params_default() -> AdasacParams {
    let p = AdaptiveParams::default();
    AdasacParams {
        gamma: p.gamma,
        delta: p.delta,
        population_size: p.population_size,
        elitism: p.elitism,
    }
}

/// `norm_fitness ^ gamma`.
#[no_mangle]
pub extern "C" fn adasac_crossover_probability(norm_fitness: f64, gamma: f64) -> f64 {
    crossover_probability(norm_fitness, gamma)
}

/// `exp(-norm_fitness / delta)`.
#[no_mangle]
pub extern "C" fn adasac_mutation_probability(norm_fitness: f64, delta: f64) -> f64 {
    mutation_probability(norm_fitness, delta)
}

/// Builds a point dataset from `n` interleaved `x, y` pairs.
///
/// # Safety
/// `xy` must point to `2 * n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adasac_dataset_from_points(
    xy: *const f64,
    n: usize,
    out: *mut *mut AdasacDataset,
) -> AdasacStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let v = coords(xy, 2 * n, "xy")?;
        let pts = v.chunks_exact(2).map(|c| Point2::new(c[0], c[1])).collect();
        let data = Dataset::new(pts).map_err(|e| Failure::invalid(e.to_string()))?;
        store(
            out,
            AdasacDataset {
                data: TaskData::Line(data),
            },
        );
        Ok(())
    })
}

/// Builds a correspondence dataset from `n` rows of `x1, y1, x2, y2`.
///
/// # Safety
/// `xyxy` must point to `4 * n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adasac_dataset_from_correspondences(
    xyxy: *const f64,
    n: usize,
    out: *mut *mut AdasacDataset,
) -> AdasacStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let v = coords(xyxy, 4 * n, "xyxy")?;
        let cs = v
            .chunks_exact(4)
            .map(|c| Correspondence::new(Point2::new(c[0], c[1]), Point2::new(c[2], c[3])))
            .collect();
        let data = Dataset::new(cs).map_err(|e| Failure::invalid(e.to_string()))?;
        store(
            out,
            AdasacDataset {
                data: TaskData::Homography(data),
            },
        );
        Ok(())
    })
}

/// Generates a labeled synthetic dataset.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn adasac_dataset_generate(
    task: AdasacTask,
    n: usize,
    inlier_ratio: f64,
    noise_sigma: f64,
    outlier_box: f64,
    inlier_threshold: f64,
    seed: u64,
    out: *mut *mut AdasacDataset,
) -> AdasacStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let spec = SyntheticSpec {
            task: match task {
                AdasacTask::Line => Task::Line,
                AdasacTask::Homography => Task::Homography,
            },
            n,
            inlier_ratio,
            noise_sigma,
            outlier_box,
            inlier_threshold,
            seed,
        };
        let data = generate(&spec).map_err(|e| Failure::invalid(e.to_string()))?;
        store(out, AdasacDataset { data });
        Ok(())
    })
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adasac_dataset_len(dataset: *const AdasacDataset) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { dataset.as_ref() }.map_or(0, |d| d.data.len())
}

/// Copies up to `capacity` inlier labels (1 inlier, 0 outlier) into `labels`
/// and returns how many the dataset has; 0 for unlabeled data.
///
/// # Safety
/// `dataset` must be a live handle; `labels` must hold `capacity` bytes or
/// be null when `capacity` is 0.
#[no_mangle]
pub unsafe extern "C" fn adasac_dataset_labels(
    dataset: *const AdasacDataset,
    labels: *mut u8,
    capacity: usize,
) -> usize {
    // SAFETY: guaranteed by the caller.
    let Some(d) = (unsafe { dataset.as_ref() }) else {
        return 0;
    };
    let Some(src) = d.data.labels() else {
        return 0;
    };
    if !labels.is_null() {
        for (i, &l) in src.iter().take(capacity).enumerate() {
            // SAFETY: `i < capacity`.
            unsafe { *labels.add(i) = l as u8 };
        }
    }
    src.len()
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adasac_dataset_free(dataset: *mut AdasacDataset) {
    if !dataset.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(dataset) });
    }
}

fn run_engine<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    engine: Engine,
    params: &AdaptiveParams,
    budget: usize,
    seed: u64,
) -> Result<AdasacResult, Failure> {
    let trace = engine.run(estimator, data, params, budget, seed)?;
    let (model, inliers) = match &trace.best_model {
        Some(m) => (m.parameters(), count_inliers(estimator, m, data)),
        None => (Vec::new(), 0),
    };
    Ok(AdasacResult {
        best_so_far: trace.series.iter().map(|&(_, b)| b).collect(),
        sample: trace.best_chromosome.genes().to_vec(),
        model,
        inliers,
    })
}

/// Runs one engine. Points use a line model, correspondences a homography.
/// `params` may be null for the defaults.
///
/// # Safety
/// `dataset` must be a live handle, `params` null or readable, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn adasac_run(
    dataset: *const AdasacDataset,
    engine: AdasacEngine,
    inlier_threshold: f64,
    params: *const AdasacParams,
    budget: usize,
    seed: u64,
    out: *mut *mut AdasacResult,
) -> AdasacStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        // SAFETY: guaranteed by the caller.
        let d = unsafe { dataset.as_ref() }.ok_or_else(|| Failure::null("dataset"))?;
        if !(inlier_threshold > 0.0 && inlier_threshold.is_finite()) {
            return Err(Failure::invalid(format!(
                "inlier threshold must be > 0, got {inlier_threshold}"
            )));
        }
        // SAFETY: guaranteed by the caller.
        let p = unsafe { params.as_ref() }
            .copied()
            .unwrap_or_else(|| adasac_params_default());
        let params = AdaptiveParams {
            gamma: p.gamma,
            delta: p.delta,
            population_size: p.population_size,
            elitism: p.elitism,
        };
        let engine = match engine {
            AdasacEngine::Ransac => Engine::Ransac,
            AdasacEngine::Gasac => Engine::Gasac,
            AdasacEngine::Adaptive => Engine::Adaptive,
        };
        let result = match &d.data {
            TaskData::Line(data) => {
                let est = LineEstimator::new(inlier_threshold);
                run_engine(&est, data, engine, &params, budget, seed)?
            }
            TaskData::Homography(data) => {
                let est = HomographyEstimator::new(inlier_threshold);
                run_engine(&est, data, engine, &params, budget, seed)?
            }
        };
        store(out, result);
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adasac_result_models_generated(result: *const AdasacResult) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { result.as_ref() }.map_or(0, |r| r.best_so_far.len())
}

/// Inlier count of the best model over the whole dataset.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adasac_result_best_inliers(result: *const AdasacResult) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { result.as_ref() }.map_or(0, |r| r.inliers)
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, capacity: usize) -> usize {
    if !dst.is_null() {
        let k = src.len().min(capacity);
        // SAFETY: `dst` holds `capacity >= k` elements per the caller.
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, k) };
    }
    src.len()
}

/// Copies up to `capacity` best-so-far inlier counts (one per fitted model)
/// and returns the full length.
///
/// # Safety
/// `result` must be a live handle; `out` must hold `capacity` elements or
/// be null.
#[no_mangle]
pub unsafe extern "C" fn adasac_result_curve(
    result: *const AdasacResult,
    out: *mut usize,
    capacity: usize,
) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { result.as_ref() }.map_or(0, |r| unsafe { copy_out(&r.best_so_far, out, capacity) })
}

/// Copies the dataset indices of the best minimal sample and returns their
/// count.
///
/// # Safety
/// As [`adasac_result_curve`].
#[no_mangle]
pub unsafe extern "C" fn adasac_result_sample(
    result: *const AdasacResult,
    out: *mut usize,
    capacity: usize,
) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { result.as_ref() }.map_or(0, |r| unsafe { copy_out(&r.sample, out, capacity) })
}

/// Copies the best model's parameters (`a, b, c` for a line, the row-major
/// 3x3 matrix for a homography) and returns their count; 0 when every
/// sample was degenerate.
///
/// # Safety
/// As [`adasac_result_curve`].
#[no_mangle]
pub unsafe extern "C" fn adasac_result_model(
    result: *const AdasacResult,
    out: *mut f64,
    capacity: usize,
) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { result.as_ref() }.map_or(0, |r| unsafe { copy_out(&r.model, out, capacity) })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adasac_result_free(result: *mut AdasacResult) {
    if !result.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(result) });
    }
}
