use crate::estimators::{Dataset, Estimator};

use super::{check_data, engine_rng, Budget, Chromosome, ConsensusError, Evaluator, RunTrace};

/// Iterations needed so that, with probability `confidence`, at least one
/// all-inlier minimal sample has been drawn when a fraction `inlier_ratio`
/// of the data are inliers: `ceil(log(1 - confidence) / log(1 - w^m))`.
///
/// Returns `None` when no finite bound exists (`inlier_ratio == 0`).
pub fn ransac_iteration_bound(inlier_ratio: f64, m: usize, confidence: f64) -> Option<usize> {
    let p_good = inlier_ratio.powi(m as i32);
    if p_good >= 1.0 {
        return Some(1);
    }
    if p_good <= 0.0 {
        return None;
    }
    let k = (1.0 - confidence).ln() / (1.0 - p_good).ln();
    if !k.is_finite() {
        return None;
    }
    Some((k.ceil() as usize).max(1))
}

/// Classic RANSAC: a uniformly random distinct minimal sample per model.
///
/// With `confidence = Some(p)` the run also stops once the standard
/// iteration bound for the best inlier ratio seen so far is reached. `None`
/// spends the whole budget unless every minimal sample has been fit.
pub fn run_ransac<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    max_models: usize,
    seed: u64,
    confidence: Option<f64>,
) -> Result<RunTrace<E::Model>, ConsensusError> {
    let n = data.len();
    let m = estimator.minimal_sample_size();
    check_data(n, m)?;
    if max_models == 0 {
        return Err(ConsensusError::InvalidParams(
            "budget must be positive".into(),
        ));
    }
    if let Some(p) = confidence {
        if !(p > 0.0 && p < 1.0) {
            return Err(ConsensusError::InvalidParams(format!(
                "confidence must lie in (0, 1), got {p}"
            )));
        }
    }

    let mut rng = engine_rng(seed);
    let mut eval = Evaluator::new(estimator, data, Budget::new(max_models));
    let mut iterations = 0usize;
    while !eval.budget().is_exhausted() && !eval.search_space_exhausted() {
        let mut c = Chromosome::random(n, m, &mut rng);
        eval.evaluate(&mut c)?;
        iterations += 1;
        if let Some(p) = confidence {
            let w = eval.best_inliers() as f64 / n as f64;
            if matches!(ransac_iteration_bound(w, m, p), Some(k) if iterations >= k) {
                break;
            }
        }
    }
    Ok(eval.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{LineEstimator, Point2};

    #[test]
    fn bound_examples() {
        assert_eq!(ransac_iteration_bound(0.5, 2, 0.99), Some(17));
        assert_eq!(ransac_iteration_bound(1.0, 2, 0.99), Some(1));
        assert_eq!(ransac_iteration_bound(0.0, 4, 0.99), None);
    }

    #[test]
    fn bound_matches_direct_search() {
        // Smallest k with 1 - (1 - w^m)^k >= p, found by counting.
        for &(w, m, p) in &[
            (0.5, 2, 0.99),
            (0.3, 4, 0.95),
            (0.8, 2, 0.999),
            (0.1, 2, 0.9),
        ] {
            let q: f64 = 1.0 - f64::powi(w, m as i32);
            let mut k = 1usize;
            let mut miss = q;
            while 1.0 - miss < p {
                miss *= q;
                k += 1;
            }
            assert_eq!(
                ransac_iteration_bound(w, m, p),
                Some(k),
                "w={w} m={m} p={p}"
            );
        }
    }

    #[test]
    fn all_inlier_data_stops_after_one_draw() {
        let data = Dataset::new(
            (0..20)
                .map(|i| Point2::new(i as f64, 2.0 * i as f64))
                .collect(),
        )
        .unwrap();
        let est = LineEstimator::new(0.1);
        let trace = run_ransac(&est, &data, 100, 9, Some(0.99)).unwrap();
        assert_eq!(trace.series, vec![(1, 20)]);
        let full = run_ransac(&est, &data, 100, 9, None).unwrap();
        assert_eq!(full.series.len(), 100);
    }

    #[test]
    fn rejects_bad_inputs() {
        let data = Dataset::new(vec![Point2::new(0.0, 0.0)]).unwrap();
        let est = LineEstimator::new(0.1);
        assert_eq!(
            run_ransac(&est, &data, 10, 0, None),
            Err(ConsensusError::InsufficientData { n: 1, m: 2 })
        );
        let data = Dataset::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        assert!(run_ransac(&est, &data, 10, 0, Some(1.0)).is_err());
        assert!(run_ransac(&est, &data, 0, 0, None).is_err());
    }
}
