//! Per-pixel disparity distributions and the discrete Laplacian mode model.

use crate::error::{GtError, Result};
use crate::scalar::{sequential_sum, Scalar};

/// Lower clamp applied to the scale when rendering a mode. A fitted mode
/// covering a single bin has zero mean absolute deviation; rendering it with
/// this scale keeps it effectively one-hot.
pub const B_MIN: f64 = 0.05;

/// Sum tolerance for a distribution that is considered normalized.
pub const NORMALIZED_TOLERANCE: f64 = 1e-6;

/// Sum tolerance for silent renormalization of loaded data.
pub const LOAD_TOLERANCE: f64 = 1e-3;

/// Probability vector over the integer disparity candidates `0..D`.
///
/// Entries are finite and non-negative. The total mass is at most one; it is
/// exactly one (within [`NORMALIZED_TOLERANCE`]) for anything produced by
/// [`normalize_distribution`] but may be smaller for partially stripped
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    probs: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    /// Wraps a probability vector, checking entries and that the mass does
    /// not exceed one.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        check_entries(&probs)?;
        let sum = sequential_sum(&probs);
        if sum > T::one() + T::lit(NORMALIZED_TOLERANCE) {
            return Err(GtError::Data(format!("distribution mass {sum} exceeds one")));
        }
        Ok(Self { probs })
    }

    /// Accepts a loaded vector whose mass is within [`LOAD_TOLERANCE`] of one.
    /// Vectors already within [`NORMALIZED_TOLERANCE`] are kept bit-for-bit;
    /// the rest are rescaled.
    pub fn from_loaded(probs: Vec<T>) -> Result<Self> {
        check_entries(&probs)?;
        let sum = sequential_sum(&probs);
        let dev = (sum - T::one()).abs();
        if dev <= T::lit(NORMALIZED_TOLERANCE) {
            Ok(Self { probs })
        } else if dev <= T::lit(LOAD_TOLERANCE) {
            Ok(Self {
                probs: probs.into_iter().map(|p| p / sum).collect(),
            })
        } else {
            Err(GtError::Data(format!(
                "distribution sums to {sum}, outside 1 ± {LOAD_TOLERANCE}"
            )))
        }
    }

    /// Wraps a vector already known to satisfy the invariants.
    pub(crate) fn from_vec_unchecked(probs: Vec<T>) -> Self {
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    pub fn mass(&self) -> T {
        sequential_sum(&self.probs)
    }

    /// Index of the largest entry; ties resolve to the smallest index.
    pub fn argmax(&self) -> Option<usize> {
        argmax_first(&self.probs)
    }
}

impl<T> AsRef<[T]> for DiscreteDistribution<T> {
    fn as_ref(&self) -> &[T] {
        &self.probs
    }
}

fn check_entries<T: Scalar>(probs: &[T]) -> Result<()> {
    if probs.is_empty() {
        return Err(GtError::Data("distribution has no disparity candidates".into()));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < T::zero())
    {
        return Err(GtError::Data(format!("entry {i} is {p}, expected finite and >= 0")));
    }
    Ok(())
}

pub(crate) fn argmax_first<T: Scalar>(values: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Divides a non-negative vector by its sum.
pub fn normalize_distribution<T: Scalar>(probs: Vec<T>) -> Result<DiscreteDistribution<T>> {
    if probs.iter().any(|p| !p.is_finite()) {
        return Err(GtError::DegenerateDistribution("non-finite entry".into()));
    }
    if probs.iter().any(|&p| p < T::zero()) {
        return Err(GtError::DegenerateDistribution("negative entry".into()));
    }
    let sum = sequential_sum(&probs);
    if sum <= T::zero() {
        return Err(GtError::DegenerateDistribution("all entries are zero".into()));
    }
    Ok(DiscreteDistribution::from_vec_unchecked(
        probs.into_iter().map(|p| p / sum).collect(),
    ))
}

/// One mode in Laplace parameter space: mass `w`, location `mu` and scale
/// `b` (mean absolute deviation, in disparity units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceMode<T> {
    pub w: T,
    pub mu: T,
    pub b: T,
}

impl<T: Scalar> LaplaceMode<T> {
    pub fn new(w: T, mu: T, b: T) -> Self {
        Self { w, mu, b }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w.is_finite() && self.mu.is_finite() && self.b.is_finite()) {
            return Err(GtError::InvalidParameter(format!(
                "non-finite mode parameters ({}, {}, {})",
                self.w, self.mu, self.b
            )));
        }
        if self.w <= T::zero() || self.w > T::one() + T::lit(NORMALIZED_TOLERANCE) {
            return Err(GtError::InvalidParameter(format!("mode weight {} outside (0, 1]", self.w)));
        }
        if self.b < T::zero() {
            return Err(GtError::InvalidParameter(format!("negative mode scale {}", self.b)));
        }
        Ok(())
    }
}

/// Renders one mode over `disparities` bins. The returned vector sums to
/// `mode.w`.
///
/// Location may be fractional. The scale is clamped below at [`B_MIN`].
pub fn evaluate_laplacian<T: Scalar>(disparities: usize, mode: &LaplaceMode<T>) -> Result<Vec<T>> {
    if disparities == 0 {
        return Err(GtError::InvalidParameter("disparity range must be positive".into()));
    }
    if !(mode.w.is_finite() && mode.mu.is_finite() && mode.b.is_finite()) {
        return Err(GtError::InvalidParameter(format!(
            "non-finite mode parameters ({}, {}, {})",
            mode.w, mode.mu, mode.b
        )));
    }
    let mut out = Vec::with_capacity(disparities);
    laplacian_kernel(disparities, mode, &mut out);
    Ok(out)
}

/// Writes the normalized kernel times `w` into `out` (cleared first).
pub(crate) fn laplacian_kernel<T: Scalar>(disparities: usize, mode: &LaplaceMode<T>, out: &mut Vec<T>) {
    let scale = mode.b.max(T::lit(B_MIN));
    // Offset by the nearest distance so the peak never underflows; the ratio
    // is unchanged.
    let nearest = (0..disparities)
        .map(|d| (T::from_index(d) - mode.mu).abs())
        .fold(T::infinity(), T::min);
    out.clear();
    out.extend((0..disparities).map(|d| {
        let dist = (T::from_index(d) - mode.mu).abs();
        (-(dist - nearest) / scale).exp()
    }));
    let norm = sequential_sum(out);
    for v in out.iter_mut() {
        *v = mode.w * *v / norm;
    }
}

/// Label point added to parameter space for every pixel with a valid label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelAnchor<T> {
    pub w_hat: T,
    /// `None` when the pixel has no usable label.
    pub d_hat: Option<T>,
    pub b_hat: T,
}

impl<T: Scalar> LabelAnchor<T> {
    pub const DEFAULT_W: f64 = 1.0;
    pub const DEFAULT_B: f64 = 0.8;

    pub fn new(d_hat: T) -> Self {
        Self {
            w_hat: T::lit(Self::DEFAULT_W),
            d_hat: Some(d_hat),
            b_hat: T::lit(Self::DEFAULT_B),
        }
    }

    pub fn invalid() -> Self {
        Self {
            w_hat: T::lit(Self::DEFAULT_W),
            d_hat: None,
            b_hat: T::lit(Self::DEFAULT_B),
        }
    }

    pub fn with_params(w_hat: T, d_hat: Option<T>, b_hat: T) -> Self {
        Self { w_hat, d_hat, b_hat }
    }

    pub fn is_valid(&self) -> bool {
        self.d_hat.is_some()
    }

    pub fn as_mode(&self) -> Option<LaplaceMode<T>> {
        self.d_hat.map(|d| LaplaceMode::new(self.w_hat, d, self.b_hat))
    }
}

/// Fused mixture for one pixel: modes sorted by location, plus where the
/// label ended up and how many points were discarded as noise.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthMixture<T> {
    pub modes: Vec<LaplaceMode<T>>,
    pub label_cluster_index: Option<usize>,
    pub noise_count: usize,
}

impl<T: Scalar> GroundTruthMixture<T> {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn label_mode(&self) -> Option<&LaplaceMode<T>> {
        self.label_cluster_index.map(|i| &self.modes[i])
    }
}
