//! Mode separation and fitting.
//!
//! A multi-modal distribution is peeled one mode at a time: take the highest
//! remaining bin, walk outward while the distribution keeps descending by
//! more than `sigma`, fit `(w, mu, b)` over that span, zero the span, and
//! repeat until nothing above `epsilon` remains.

use std::ops::RangeInclusive;

use crate::distribution::{argmax_first, laplacian_kernel, DiscreteDistribution, LaplaceMode};
use crate::error::{GtError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationConfig<T> {
    /// A new mode is started only while some bin exceeds this.
    pub epsilon: T,
    /// Minimum drop between neighbouring bins for the span to keep growing.
    pub sigma: T,
}

impl<T: Scalar> SeparationConfig<T> {
    pub const DEFAULT_EPSILON: f64 = 1e-3;
    pub const DEFAULT_SIGMA: f64 = 1e-3;

    pub fn new(epsilon: T, sigma: T) -> Result<Self> {
        let cfg = Self { epsilon, sigma };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("sigma", self.sigma)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(GtError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SeparationConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(Self::DEFAULT_EPSILON),
            sigma: T::lit(Self::DEFAULT_SIGMA),
        }
    }
}

/// A fitted mode together with the inclusive bin span it was fitted over.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedMode<T> {
    pub mode: LaplaceMode<T>,
    pub span: RangeInclusive<usize>,
}

/// Separates and fits every mode of `p`, in extraction order.
pub fn separate_modes<T: Scalar>(p: &DiscreteDistribution<T>, cfg: &SeparationConfig<T>) -> Vec<LaplaceMode<T>> {
    separate_slice(p.probs(), cfg).into_iter().map(|s| s.mode).collect()
}

/// Like [`separate_modes`] but also reports each mode's span.
pub fn separate_modes_with_spans<T: Scalar>(
    p: &DiscreteDistribution<T>,
    cfg: &SeparationConfig<T>,
) -> Vec<SeparatedMode<T>> {
    separate_slice(p.probs(), cfg)
}

pub(crate) fn separate_slice<T: Scalar>(p: &[T], cfg: &SeparationConfig<T>) -> Vec<SeparatedMode<T>> {
    let mut p = p.to_vec();
    let last = p.len().saturating_sub(1);
    let mut out = Vec::new();
    // Bins zeroed by an earlier span. Stepping onto one would add no mass,
    // only an overlapping span, so expansion stops there.
    let mut claimed = vec![false; p.len()];

    while let Some(peak) = argmax_first(&p).filter(|&i| p[i] > cfg.epsilon) {
        let (mut l, mut r) = (peak, peak);
        while l >= 1 && !claimed[l - 1] && p[l] - p[l - 1] > cfg.sigma {
            l -= 1;
        }
        while r < last && !claimed[r + 1] && p[r] - p[r + 1] > cfg.sigma {
            r += 1;
        }

        let span = &p[l..=r];
        let w = span.iter().fold(T::zero(), |acc, &v| acc + v);
        let mu = span
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &v)| acc + (v / w) * T::from_index(l + i));
        let b = span
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &v)| acc + (v / w) * (T::from_index(l + i) - mu).abs());

        out.push(SeparatedMode {
            mode: LaplaceMode::new(w, mu, b),
            span: l..=r,
        });
        p[l..=r].iter_mut().for_each(|v| *v = T::zero());
        claimed[l..=r].iter_mut().for_each(|c| *c = true);
    }
    out
}

/// Sums the rendered Laplacians of `modes` over `disparities` bins.
pub fn reconstruct_from_modes<T: Scalar>(disparities: usize, modes: &[LaplaceMode<T>]) -> Result<Vec<T>> {
    let mut acc = vec![T::zero(); disparities];
    let mut buf = Vec::with_capacity(disparities);
    for mode in modes {
        if !(mode.w.is_finite() && mode.mu.is_finite() && mode.b.is_finite()) {
            return Err(GtError::InvalidParameter(format!("non-finite mode {mode:?}")));
        }
        laplacian_kernel(disparities, mode, &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, &v)| *a = *a + v);
    }
    Ok(acc)
}
