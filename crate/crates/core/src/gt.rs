//! Ground-truth distribution modeling from ensemble predictions.
//!
//! Every member distribution is split into fitted modes, the label is added
//! as one more point, the points are clustered by location, lone points are
//! dropped as biased knowledge, and each cluster is fused into a single
//! Laplacian. The mixture of fused Laplacians, normalized, is the ground
//! truth.

use crate::cluster::{cluster_mu, ClusterConfig, ClusterOutcome, ParameterPoint};
use crate::distribution::{laplacian_kernel, DiscreteDistribution, GroundTruthMixture, LabelAnchor, LaplaceMode};
use crate::error::{GtError, Result};
use crate::modes::{separate_slice, SeparationConfig};
use crate::parallel::map_indexed;
use crate::scalar::{sequential_sum, Scalar};
use crate::volume::{DisparityMap, EnsembleVolumes, ProbabilityVolume};

/// Everything that controls ground-truth modeling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtConfig<T> {
    pub separation: SeparationConfig<T>,
    pub cluster: ClusterConfig<T>,
    /// Weight of the label anchor point.
    pub label_w: T,
    /// Scale of the label anchor point.
    pub label_b: T,
    /// Keep noise points as singleton modes instead of discarding them.
    pub keep_noise: bool,
    /// Model pixels without a valid label from the ensemble alone instead of
    /// masking them.
    pub ensemble_only: bool,
}

impl<T: Scalar> Default for GtConfig<T> {
    fn default() -> Self {
        Self {
            separation: SeparationConfig::default(),
            cluster: ClusterConfig::default(),
            label_w: T::lit(LabelAnchor::<T>::DEFAULT_W),
            label_b: T::lit(LabelAnchor::<T>::DEFAULT_B),
            keep_noise: false,
            ensemble_only: false,
        }
    }
}

impl<T: Scalar> GtConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.separation.validate()?;
        self.cluster.validate()?;
        if !(self.label_w.is_finite() && self.label_w > T::zero() && self.label_w <= T::one()) {
            return Err(GtError::Config(format!("label weight must be in (0, 1], got {}", self.label_w)));
        }
        if !(self.label_b.is_finite() && self.label_b >= T::zero()) {
            return Err(GtError::Config(format!("label scale must be >= 0, got {}", self.label_b)));
        }
        Ok(())
    }

    pub fn anchor(&self, d_hat: Option<T>) -> LabelAnchor<T> {
        LabelAnchor::with_params(self.label_w, d_hat, self.label_b)
    }
}

/// Fits the modes of every member and appends the label anchor when valid.
/// Points are ordered by member, then extraction order, anchor last.
pub fn collect_parameter_points<T: Scalar>(
    dists: &[DiscreteDistribution<T>],
    anchor: &LabelAnchor<T>,
    cfg: &SeparationConfig<T>,
) -> Result<Vec<ParameterPoint<T>>> {
    if let Some(first) = dists.first() {
        if let Some(m) = dists.iter().position(|d| d.len() != first.len()) {
            return Err(GtError::Data(format!(
                "member {m} has {} candidates, member 0 has {}",
                dists[m].len(),
                first.len()
            )));
        }
    }
    let mut points = Vec::new();
    for (m, p) in dists.iter().enumerate() {
        points.extend(
            separate_slice(p.probs(), cfg)
                .into_iter()
                .map(|s| ParameterPoint::member(m, s.mode)),
        );
    }
    if let Some(mode) = anchor.as_mode() {
        points.push(ParameterPoint::anchor(mode));
    }
    Ok(points)
}

/// Fuses each cluster into the arithmetic mean of its members' parameters,
/// pins the label cluster's location to the label, drops noise and sorts by
/// location.
pub fn fuse_clusters<T: Scalar>(
    points: &[ParameterPoint<T>],
    outcome: &ClusterOutcome,
    anchor: &LabelAnchor<T>,
) -> Result<GroundTruthMixture<T>> {
    if outcome.clusters.is_empty() {
        return Err(GtError::EmptyMixture);
    }
    let mut fused: Vec<(LaplaceMode<T>, bool)> = Vec::with_capacity(outcome.clusters.len());
    for (k, members) in outcome.clusters.iter().enumerate() {
        if members.is_empty() {
            return Err(GtError::Data(format!("cluster {k} is empty")));
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= points.len()) {
            return Err(GtError::Data(format!("cluster {k} references point {bad} of {}", points.len())));
        }
        let n = T::from_index(members.len());
        let mean = |f: fn(&LaplaceMode<T>) -> T| members.iter().fold(T::zero(), |acc, &i| acc + f(&points[i].mode)) / n;
        let mut mode = LaplaceMode::new(mean(|m| m.w), mean(|m| m.mu), mean(|m| m.b));
        let is_label = outcome.label_cluster == Some(k);
        if is_label {
            if let Some(d) = anchor.d_hat {
                mode.mu = d;
            }
        }
        fused.push((mode, is_label));
    }
    fused.sort_by(|a, b| a.0.mu.partial_cmp(&b.0.mu).unwrap_or(std::cmp::Ordering::Equal));
    Ok(GroundTruthMixture {
        label_cluster_index: fused.iter().position(|(_, l)| *l),
        modes: fused.into_iter().map(|(m, _)| m).collect(),
        noise_count: outcome.noise.len(),
    })
}

/// Sums the mixture's Laplacians and divides by the total mass.
pub fn render_mixture<T: Scalar>(disparities: usize, mix: &GroundTruthMixture<T>) -> Result<DiscreteDistribution<T>> {
    if mix.modes.is_empty() {
        return Err(GtError::EmptyMixture);
    }
    if disparities == 0 {
        return Err(GtError::InvalidParameter("disparity range must be positive".into()));
    }
    let mut acc = vec![T::zero(); disparities];
    let mut buf = Vec::with_capacity(disparities);
    for mode in &mix.modes {
        if !(mode.w.is_finite() && mode.mu.is_finite() && mode.b.is_finite()) {
            return Err(GtError::InvalidParameter(format!("non-finite mode {mode:?}")));
        }
        laplacian_kernel(disparities, mode, &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, &v)| *a = *a + v);
    }
    let norm = sequential_sum(&acc);
    if !(norm > T::zero() && norm.is_finite()) {
        return Err(GtError::DegenerateDistribution(format!("mixture mass {norm}")));
    }
    Ok(DiscreteDistribution::from_vec_unchecked(
        acc.into_iter().map(|v| v / norm).collect(),
    ))
}

/// Collect, cluster, fuse and render for one pixel.
pub fn model_ground_truth<T: Scalar>(
    disparities: usize,
    dists: &[DiscreteDistribution<T>],
    anchor: &LabelAnchor<T>,
    cfg: &GtConfig<T>,
) -> Result<(DiscreteDistribution<T>, GroundTruthMixture<T>)> {
    if let Some(p) = dists.iter().find(|p| p.len() != disparities) {
        return Err(GtError::Data(format!(
            "member has {} candidates, expected {disparities}",
            p.len()
        )));
    }
    let points = collect_parameter_points(dists, anchor, &cfg.separation)?;
    let mut outcome = cluster_mu(&points, &cfg.cluster);
    if cfg.keep_noise {
        outcome.clusters.extend(outcome.noise.drain(..).map(|i| vec![i]));
    }
    let mix = fuse_clusters(&points, &outcome, anchor)?;
    let gt = render_mixture(disparities, &mix)?;
    Ok((gt, mix))
}

/// Output of [`model_ground_truth_volume`].
#[derive(Debug, Clone, PartialEq)]
pub struct GtVolume<T> {
    /// Modeled distributions; masked pixels are all-zero slices.
    pub volume: ProbabilityVolume<T>,
    pub mask: Vec<bool>,
    /// Per-pixel fused mixture, `None` where masked.
    pub mixtures: Vec<Option<GroundTruthMixture<T>>>,
}

/// Models every pixel of an ensemble against a label map.
///
/// Pixels without a valid label (non-finite, negative, or beyond the last
/// candidate) are masked unless `cfg.ensemble_only` is set; members whose
/// slice is masked at a pixel are skipped there.
pub fn model_ground_truth_volume<T: Scalar>(
    ensemble: &EnsembleVolumes<T>,
    labels: &DisparityMap<T>,
    cfg: &GtConfig<T>,
    workers: Option<usize>,
) -> Result<GtVolume<T>> {
    cfg.validate()?;
    let (h, w, d) = (ensemble.height(), ensemble.width(), ensemble.disparities());
    if labels.height() != h || labels.width() != w {
        return Err(GtError::Data(format!(
            "labels are {}×{}, ensemble is {h}×{w}",
            labels.height(),
            labels.width()
        )));
    }
    let max_label = T::from_index(d - 1);

    let per_pixel = map_indexed(h * w, workers, |i| -> Result<Option<(DiscreteDistribution<T>, GroundTruthMixture<T>)>> {
        let d_hat = labels.valid_value(i).filter(|&v| v <= max_label);
        if d_hat.is_none() && !cfg.ensemble_only {
            return Ok(None);
        }
        let dists: Vec<_> = ensemble
            .members()
            .iter()
            .filter_map(|m| m.distribution_at(i))
            .collect();
        match model_ground_truth(d, &dists, &cfg.anchor(d_hat), cfg) {
            Ok(r) => Ok(Some(r)),
            Err(GtError::EmptyMixture) => Ok(None),
            Err(e) => Err(e),
        }
    })?;

    let mut mask = Vec::with_capacity(h * w);
    let mut pixels = Vec::with_capacity(h * w);
    let mut mixtures = Vec::with_capacity(h * w);
    for r in per_pixel {
        match r? {
            Some((gt, mix)) => {
                mask.push(true);
                pixels.push(Some(gt));
                mixtures.push(Some(mix));
            }
            None => {
                mask.push(false);
                pixels.push(None);
                mixtures.push(None);
            }
        }
    }
    Ok(GtVolume {
        volume: ProbabilityVolume::from_pixels(h, w, d, pixels)?,
        mask,
        mixtures,
    })
}

/// Entrywise mean of the member distributions.
pub fn superimpose_average<T: Scalar>(dists: &[DiscreteDistribution<T>]) -> Result<DiscreteDistribution<T>> {
    let Some(first) = dists.first() else {
        return Err(GtError::Data("superimposition needs at least one distribution".into()));
    };
    let d = first.len();
    if dists.iter().any(|p| p.len() != d) {
        return Err(GtError::Data("members disagree on the disparity range".into()));
    }
    let m = T::from_index(dists.len());
    let out = (0..d)
        .map(|i| dists.iter().fold(T::zero(), |acc, p| acc + p.probs()[i]) / m)
        .collect();
    Ok(DiscreteDistribution::from_vec_unchecked(out))
}
