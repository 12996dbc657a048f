//! Disparity regression from a predicted distribution.

use std::str::FromStr;

use crate::distribution::DiscreteDistribution;
use crate::error::{GtError, Result};
use crate::modes::{separate_slice, SeparationConfig};
use crate::parallel::map_indexed;
use crate::scalar::Scalar;
use crate::volume::{DisparityMap, ProbabilityVolume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Probability-weighted mean over all candidates.
    SoftArgmin,
    /// Location of the heaviest fitted mode.
    Dominant,
}

impl FromStr for Estimator {
    type Err = GtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softargmin" => Ok(Estimator::SoftArgmin),
            "dme" => Ok(Estimator::Dominant),
            other => Err(GtError::Config(format!(
                "unknown estimator {other:?}, expected dme or softargmin"
            ))),
        }
    }
}

pub fn soft_argmin<T: Scalar>(p: &DiscreteDistribution<T>) -> T {
    soft_argmin_slice(p.probs())
}

fn soft_argmin_slice<T: Scalar>(p: &[T]) -> T {
    p.iter()
        .enumerate()
        .fold(T::zero(), |acc, (d, &v)| acc + T::from_index(d) * v)
}

/// Dominant-mode estimate: the fitted location of the mode with the largest
/// mass (ties go to the smaller location). Falls back to [`soft_argmin`]
/// when no bin exceeds `cfg.epsilon`.
pub fn dme_estimate<T: Scalar>(p: &DiscreteDistribution<T>, cfg: &SeparationConfig<T>) -> T {
    dme_slice(p.probs(), cfg)
}

fn dme_slice<T: Scalar>(p: &[T], cfg: &SeparationConfig<T>) -> T {
    separate_slice(p, cfg)
        .into_iter()
        .map(|s| s.mode)
        .reduce(|best, m| {
            if m.w > best.w || (m.w == best.w && m.mu < best.mu) {
                m
            } else {
                best
            }
        })
        .map_or_else(|| soft_argmin_slice(p), |m| m.mu)
}

/// Estimates every pixel of a volume. Masked pixels come out invalid.
pub fn infer_volume<T: Scalar>(
    volume: &ProbabilityVolume<T>,
    estimator: Estimator,
    cfg: &SeparationConfig<T>,
    workers: Option<usize>,
) -> Result<DisparityMap<T>> {
    cfg.validate()?;
    let values = map_indexed(volume.pixel_count(), workers, |i| {
        if volume.is_masked(i) {
            return DisparityMap::<T>::invalid_value();
        }
        let p = volume.pixel_at(i);
        match estimator {
            Estimator::SoftArgmin => soft_argmin_slice(p),
            Estimator::Dominant => dme_slice(p, cfg),
        }
    })?;
    DisparityMap::new(volume.height(), volume.width(), values)
}
