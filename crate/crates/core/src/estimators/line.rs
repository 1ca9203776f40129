use super::{EstimateError, Estimator, ModelParams, Point2, COINCIDENCE_TOL};

/// Line `a*x + b*y + c = 0` with `(a, b)` a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Line {
    pub fn through(p: &Point2, q: &Point2) -> Result<Self, EstimateError> {
        let dx = q.x - p.x;
        let dy = q.y - p.y;
        let len = dx.hypot(dy);
        if len < COINCIDENCE_TOL {
            return Err(EstimateError::DegenerateSample);
        }
        let a = dy / len;
        let b = -dx / len;
        let c = -(a * p.x + b * p.y);
        Ok(Self { a, b, c })
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance(&self, p: &Point2) -> f64 {
        (self.a * p.x + self.b * p.y + self.c).abs()
    }
}

impl ModelParams for Line {
    fn parameters(&self) -> Vec<f64> {
        vec![self.a, self.b, self.c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEstimator {
    threshold: f64,
}

impl LineEstimator {
    /// Panics unless `threshold` is positive and finite.
    pub fn new(threshold: f64) -> Self {
        assert!(
            threshold > 0.0 && threshold.is_finite(),
            "inlier threshold must be positive, got {threshold}"
        );
        Self { threshold }
    }
}

impl Estimator for LineEstimator {
    type Observation = Point2;
    type Model = Line;

    fn minimal_sample_size(&self) -> usize {
        2
    }

    fn inlier_threshold(&self) -> f64 {
        self.threshold
    }

    fn fit(&self, sample: &[&Point2]) -> Result<Line, EstimateError> {
        match sample {
            [p, q] => Line::through(p, q),
            _ => Err(EstimateError::DegenerateSample),
        }
    }

    fn residual(&self, model: &Line, obs: &Point2) -> Result<f64, EstimateError> {
        Ok(model.distance(obs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn diagonal_line() {
        let l = Line::through(&Point2::new(0.0, 0.0), &Point2::new(1.0, 1.0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((l.a - h).abs() < EPS);
        assert!((l.b + h).abs() < EPS);
        assert!(l.c.abs() < EPS);
        assert!((l.distance(&Point2::new(1.0, 0.0)) - h).abs() < EPS);
    }

    #[test]
    fn horizontal_line() {
        let l = Line::through(&Point2::new(0.0, 2.0), &Point2::new(1.0, 2.0)).unwrap();
        // -y + 2 = 0
        assert!(l.a.abs() < EPS);
        assert!((l.b + 1.0).abs() < EPS);
        assert!((l.c - 2.0).abs() < EPS);
        assert_eq!(l.distance(&Point2::new(5.0, 2.0)), 0.0);
        assert!((l.distance(&Point2::new(0.0, 5.0)) - 3.0).abs() < EPS);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = Point2::new(3.0, 3.0);
        assert_eq!(Line::through(&p, &p), Err(EstimateError::DegenerateSample));
        let est = LineEstimator::new(1.0);
        assert_eq!(est.fit(&[&p, &p]), Err(EstimateError::DegenerateSample));
        assert_eq!(est.fit(&[&p]), Err(EstimateError::DegenerateSample));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -1e3..1e3f64
    }

    proptest! {
        #[test]
        fn fit_points_have_zero_residual(x1 in coord(), y1 in coord(), x2 in coord(), y2 in coord()) {
            let p = Point2::new(x1, y1);
            let q = Point2::new(x2, y2);
            prop_assume!(p.distance(&q) > 1e-6);
            let l = Line::through(&p, &q).unwrap();
            prop_assert!((l.a.hypot(l.b) - 1.0).abs() < 1e-12);
            prop_assert!(l.distance(&p) < 1e-9);
            prop_assert!(l.distance(&q) < 1e-9);
        }

        #[test]
        fn residual_ignores_point_order(
            x1 in coord(), y1 in coord(), x2 in coord(), y2 in coord(), x in coord(), y in coord()
        ) {
            let p = Point2::new(x1, y1);
            let q = Point2::new(x2, y2);
            prop_assume!(p.distance(&q) > 1e-6);
            let r = Point2::new(x, y);
            let d1 = Line::through(&p, &q).unwrap().distance(&r);
            let d2 = Line::through(&q, &p).unwrap().distance(&r);
            prop_assert!((d1 - d2).abs() <= 1e-9 * (1.0 + d1));
        }
    }
}
