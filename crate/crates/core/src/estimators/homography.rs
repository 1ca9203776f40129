use nalgebra::{DMatrix, Matrix3};

use super::{
    Correspondence, EstimateError, Estimator, ModelParams, Point2, COLLINEARITY_TOL,
    PROJECTION_W_TOL,
};

/// Planar projective transform stored row-major.
///
/// Scale is fixed so that `h[8] == 1` when that entry is non-negligible,
/// otherwise the matrix has unit Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    h: [f64; 9],
}

impl Homography {
    pub const IDENTITY: Homography = Homography {
        h: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    };

    /// Builds a normalized homography. Returns `None` for a singular or
    /// non-finite matrix.
    pub fn from_row_major(h: [f64; 9]) -> Option<Self> {
        let m = Matrix3::from_row_slice(&h);
        Self::from_matrix(&m)
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Homography {
            h: [1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0],
        }
    }

    fn from_matrix(m: &Matrix3<f64>) -> Option<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let norm = m.norm();
        if norm == 0.0 {
            return None;
        }
        let scaled = if m[(2, 2)].abs() > PROJECTION_W_TOL {
            m / m[(2, 2)]
        } else {
            m / norm
        };
        let fro = scaled.norm();
        if scaled.determinant().abs() <= 1e-12 * fro * fro * fro {
            return None;
        }
        let mut h = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                h[3 * r + c] = scaled[(r, c)];
            }
        }
        Some(Homography { h })
    }

    pub fn as_row_major(&self) -> &[f64; 9] {
        &self.h
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_row_slice(&self.h)
    }

    pub fn project(&self, p: &Point2) -> Result<Point2, EstimateError> {
        let h = &self.h;
        let w = h[6] * p.x + h[7] * p.y + h[8];
        if w.abs() < PROJECTION_W_TOL {
            return Err(EstimateError::ProjectionAtInfinity);
        }
        Ok(Point2::new(
            (h[0] * p.x + h[1] * p.y + h[2]) / w,
            (h[3] * p.x + h[4] * p.y + h[5]) / w,
        ))
    }

    pub fn inverse(&self) -> Option<Homography> {
        self.matrix()
            .try_inverse()
            .and_then(|m| Self::from_matrix(&m))
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Homography) -> Option<Homography> {
        Self::from_matrix(&(self.matrix() * first.matrix()))
    }

    /// One-directional transfer error: distance from `c.target` to the
    /// projection of `c.source`.
    pub fn transfer_error(&self, c: &Correspondence) -> Result<f64, EstimateError> {
        self.project(&c.source).map(|p| p.distance(&c.target))
    }
}

impl ModelParams for Homography {
    fn parameters(&self) -> Vec<f64> {
        self.h.to_vec()
    }
}

/// Direct linear transform solver for four or more correspondences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomographyEstimator {
    threshold: f64,
}

impl HomographyEstimator {
    /// Panics unless `threshold` is positive and finite.
    pub fn new(threshold: f64) -> Self {
        assert!(
            threshold > 0.0 && threshold.is_finite(),
            "inlier threshold must be positive, got {threshold}"
        );
        Self { threshold }
    }
}

impl Estimator for HomographyEstimator {
    type Observation = Correspondence;
    type Model = Homography;

    fn minimal_sample_size(&self) -> usize {
        4
    }

    fn inlier_threshold(&self) -> f64 {
        self.threshold
    }

    fn fit(&self, sample: &[&Correspondence]) -> Result<Homography, EstimateError> {
        fit_dlt(sample)
    }

    fn residual(&self, model: &Homography, obs: &Correspondence) -> Result<f64, EstimateError> {
        model.transfer_error(obs)
    }
}

/// Similarity moving the centroid to the origin with mean distance sqrt(2).
fn conditioning(points: &[Point2]) -> Option<(Matrix3<f64>, Vec<Point2>)> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean = points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n;
    if !(mean.is_finite() && mean > 0.0) {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean;
    let t = Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0);
    let out = points
        .iter()
        .map(|p| Point2::new(s * (p.x - cx), s * (p.y - cy)))
        .collect();
    Some((t, out))
}

fn has_collinear_triple(points: &[Point2]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (points[i], points[j], points[k]);
                let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                if cross.abs() < COLLINEARITY_TOL {
                    return true;
                }
            }
        }
    }
    false
}

fn fit_dlt(sample: &[&Correspondence]) -> Result<Homography, EstimateError> {
    let n = sample.len();
    if n < 4 {
        return Err(EstimateError::DegenerateSample);
    }
    let src: Vec<Point2> = sample.iter().map(|c| c.source).collect();
    let dst: Vec<Point2> = sample.iter().map(|c| c.target).collect();
    let (ts, src_n) = conditioning(&src).ok_or(EstimateError::DegenerateSample)?;
    let (td, dst_n) = conditioning(&dst).ok_or(EstimateError::DegenerateSample)?;

    if n == 4 && (has_collinear_triple(&src_n) || has_collinear_triple(&dst_n)) {
        return Err(EstimateError::DegenerateSample);
    }

    // Zero rows pad the system to 9x9 so the SVD yields the full right
    // null space even for a minimal sample.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (s, d)) in src_n.iter().zip(&dst_n).enumerate() {
        let (x, y, u, v) = (s.x, s.y, d.x, d.y);
        let r = 2 * k;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or(EstimateError::DegenerateSample)?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let largest = sv[order[sv.len() - 1]];
    // A second (near) null direction means the system is rank deficient.
    if largest.is_nan() || largest <= 0.0 || sv[order[1]] < COLLINEARITY_TOL * largest {
        return Err(EstimateError::DegenerateSample);
    }
    let h = v_t.row(order[0]);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let td_inv = td.try_inverse().ok_or(EstimateError::DegenerateSample)?;
    let full = td_inv * hn * ts;
    Homography::from_matrix(&full).ok_or(EstimateError::DegenerateSample)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(sx: f64, sy: f64, tx: f64, ty: f64) -> Correspondence {
        Correspondence::new(Point2::new(sx, sy), Point2::new(tx, ty))
    }

    fn fit(cs: &[Correspondence]) -> Result<Homography, EstimateError> {
        let refs: Vec<&Correspondence> = cs.iter().collect();
        HomographyEstimator::new(1.0).fit(&refs)
    }

    fn assert_close(h: &Homography, expected: &[f64; 9], tol: f64) {
        for (a, b) in h.as_row_major().iter().zip(expected) {
            assert!(
                (a - b).abs() < tol,
                "{:?} vs {:?}",
                h.as_row_major(),
                expected
            );
        }
    }

    #[test]
    fn identity_from_unit_square() {
        let cs = [
            corr(0.0, 0.0, 0.0, 0.0),
            corr(1.0, 0.0, 1.0, 0.0),
            corr(0.0, 1.0, 0.0, 1.0),
            corr(1.0, 1.0, 1.0, 1.0),
        ];
        let h = fit(&cs).unwrap();
        assert_close(&h, Homography::IDENTITY.as_row_major(), 1e-9);
    }

    #[test]
    fn translation_from_unit_square() {
        let cs = [
            corr(0.0, 0.0, 2.0, 3.0),
            corr(1.0, 0.0, 3.0, 3.0),
            corr(0.0, 1.0, 2.0, 4.0),
            corr(1.0, 1.0, 3.0, 4.0),
        ];
        let h = fit(&cs).unwrap();
        assert_close(&h, Homography::translation(2.0, 3.0).as_row_major(), 1e-9);
    }

    #[test]
    fn collinear_source_is_degenerate() {
        let cs = [
            corr(0.0, 0.0, 0.0, 0.0),
            corr(1.0, 1.0, 1.0, 0.0),
            corr(2.0, 2.0, 0.0, 1.0),
            corr(1.0, 0.0, 1.0, 1.0),
        ];
        assert_eq!(fit(&cs), Err(EstimateError::DegenerateSample));
    }

    #[test]
    fn collinear_target_is_degenerate() {
        let cs = [
            corr(0.0, 0.0, 0.0, 0.0),
            corr(1.0, 0.0, 1.0, 0.0),
            corr(0.0, 1.0, 2.0, 0.0),
            corr(1.0, 1.0, 5.0, 7.0),
        ];
        assert_eq!(fit(&cs), Err(EstimateError::DegenerateSample));
    }

    #[test]
    fn coincident_and_short_samples_are_degenerate() {
        let same = corr(1.0, 1.0, 1.0, 1.0);
        assert_eq!(fit(&[same; 4]), Err(EstimateError::DegenerateSample));
        assert_eq!(fit(&[same; 3]), Err(EstimateError::DegenerateSample));
    }

    #[test]
    fn residual_examples() {
        let est = HomographyEstimator::new(1.0);
        let id = Homography::IDENTITY;
        assert_eq!(est.residual(&id, &corr(1.0, 2.0, 1.0, 2.0)), Ok(0.0));
        assert_eq!(est.residual(&id, &corr(0.0, 0.0, 3.0, 4.0)), Ok(5.0));
        let t = Homography::translation(2.0, 0.0);
        assert_eq!(est.residual(&t, &corr(0.0, 0.0, 0.0, 0.0)), Ok(2.0));
    }

    #[test]
    fn projection_at_infinity() {
        // w = x - 1 vanishes on the line x = 1.
        let h = Homography::from_row_major([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            h.transfer_error(&corr(1.0, 5.0, 0.0, 0.0)),
            Err(EstimateError::ProjectionAtInfinity)
        );
    }

    #[test]
    fn zero_corner_uses_frobenius_scale() {
        let h = Homography::from_row_major([0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(h.is_none(), "singular matrix must be rejected");
        let h = Homography::from_row_major([0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 2.0, 0.0]).unwrap();
        let norm: f64 = h.as_row_major().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composing_with_inverse_round_trips() {
        let h =
            Homography::from_row_major([1.2, 0.1, 3.0, -0.2, 0.9, -1.0, 1e-3, 2e-3, 1.0]).unwrap();
        let back = h.inverse().unwrap().compose(&h).unwrap();
        let p = Point2::new(4.0, -7.0);
        let q = back.project(&p).unwrap();
        assert!(p.distance(&q) < 1e-9);
    }
}
