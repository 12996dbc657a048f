//! Cross-entropy supervision, the uni-modal baseline target, and disparity
//! error metrics.

use crate::distribution::{evaluate_laplacian, normalize_distribution, DiscreteDistribution, LaplaceMode};
use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::{DisparityMap, ProbabilityVolume};

/// Floor applied to predicted probabilities before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

/// `-Σ target[d] · ln(max(pred[d], LOG_FLOOR))`.
pub fn cross_entropy<T: Scalar>(pred: &DiscreteDistribution<T>, target: &DiscreteDistribution<T>) -> Result<T> {
    if pred.len() != target.len() {
        return Err(GtError::Data(format!(
            "prediction has {} candidates, target has {}",
            pred.len(),
            target.len()
        )));
    }
    Ok(cross_entropy_slice(pred.probs(), target.probs()))
}

fn cross_entropy_slice<T: Scalar>(pred: &[T], target: &[T]) -> T {
    let floor = T::lit(LOG_FLOOR);
    -pred
        .iter()
        .zip(target)
        .fold(T::zero(), |acc, (&p, &t)| acc + t * p.max(floor).ln())
}

/// Shannon entropy in nats.
pub fn entropy<T: Scalar>(p: &DiscreteDistribution<T>) -> T {
    -p.probs()
        .iter()
        .filter(|&&v| v > T::zero())
        .fold(T::zero(), |acc, &v| acc + v * v.ln())
}

/// Mean cross-entropy over pixels where `mask` is set.
pub fn mean_cross_entropy<T: Scalar>(
    pred: &ProbabilityVolume<T>,
    target: &ProbabilityVolume<T>,
    mask: &[bool],
) -> Result<T> {
    if !pred.same_shape(target) {
        return Err(GtError::Data("prediction and target volumes differ in shape".into()));
    }
    if mask.len() != pred.pixel_count() {
        return Err(GtError::Data(format!(
            "mask has {} entries for {} pixels",
            mask.len(),
            pred.pixel_count()
        )));
    }
    let mut total = T::zero();
    let mut count = 0usize;
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        total = total + cross_entropy_slice(pred.pixel_at(i), target.pixel_at(i));
        count += 1;
    }
    if count == 0 {
        return Err(GtError::UndefinedMetric("no supervised pixels".into()));
    }
    Ok(total / T::from_index(count))
}

/// Single Laplacian centred on the label: the uni-modal baseline target.
pub fn unimodal_gt<T: Scalar>(disparities: usize, d_hat: T, b: T) -> Result<DiscreteDistribution<T>> {
    if disparities == 0 {
        return Err(GtError::InvalidParameter("disparity range must be positive".into()));
    }
    if !(d_hat.is_finite() && d_hat >= T::zero() && d_hat <= T::from_index(disparities - 1)) {
        return Err(GtError::Data(format!(
            "label {d_hat} outside [0, {}]",
            disparities - 1
        )));
    }
    normalize_distribution(evaluate_laplacian(disparities, &LaplaceMode::new(T::one(), d_hat, b))?)
}

/// Error threshold `k` in pixels for the `>k px` outlier rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricThreshold<T>(T);

impl<T: Scalar> MetricThreshold<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k.is_finite() && k > T::zero()) {
            return Err(GtError::Config(format!("threshold must be positive, got {k}")));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> T {
        self.0
    }
}

fn check_same_shape<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>) -> Result<()> {
    if pred.height() != gt.height() || pred.width() != gt.width() {
        return Err(GtError::Data(format!(
            "prediction is {}×{}, ground truth is {}×{}",
            pred.height(),
            pred.width(),
            gt.height(),
            gt.width()
        )));
    }
    Ok(())
}

/// Percentage of valid ground-truth pixels whose absolute error exceeds `k`.
/// A missing prediction at a valid pixel counts as an outlier.
pub fn outlier_rate<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>, thr: MetricThreshold<T>) -> Result<T> {
    check_same_shape(pred, gt)?;
    let mut valid = 0usize;
    let mut bad = 0usize;
    for i in 0..gt.len() {
        let Some(g) = gt.valid_value(i) else { continue };
        valid += 1;
        match pred.valid_value(i) {
            Some(p) if (p - g).abs() <= thr.get() => {}
            _ => bad += 1,
        }
    }
    if valid == 0 {
        return Err(GtError::UndefinedMetric("ground truth has no valid pixels".into()));
    }
    Ok(T::lit(100.0) * T::from_index(bad) / T::from_index(valid))
}

/// Mean absolute error over valid ground-truth pixels.
pub fn end_point_error<T: Scalar>(pred: &DisparityMap<T>, gt: &DisparityMap<T>) -> Result<T> {
    check_same_shape(pred, gt)?;
    let mut valid = 0usize;
    let mut total = T::zero();
    for i in 0..gt.len() {
        let Some(g) = gt.valid_value(i) else { continue };
        let Some(p) = pred.valid_value(i) else {
            return Err(GtError::Data(format!("prediction missing at valid pixel {i}")));
        };
        total = total + (p - g).abs();
        valid += 1;
    }
    if valid == 0 {
        return Err(GtError::UndefinedMetric("ground truth has no valid pixels".into()));
    }
    Ok(total / T::from_index(valid))
}
