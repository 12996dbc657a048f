//! Multi-modal ground-truth disparity distributions built from the
//! predictions of a stereo network ensemble.
//!
//! Each ensemble member's per-pixel distribution is split into modes, every
//! mode is fitted as a discrete Laplacian `(w, mu, b)`, and the resulting
//! parameter-space points, together with a point for the disparity label,
//! are clustered by location. Clusters backed by several members are fused
//! into one Laplacian each; lone points are discarded. The normalized
//! mixture is the supervision target.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod cluster;
pub mod config;
pub mod distribution;
pub mod error;
pub mod estimation;
pub mod gt;
pub mod io;
pub mod metrics;
pub mod modes;
mod parallel;
pub mod scalar;
pub mod synth;
pub mod volume;

pub use cluster::{cluster_mu, ClusterOutcome, PointSource};
pub use distribution::{evaluate_laplacian, normalize_distribution, B_MIN};
pub use error::{GtError, Result};
pub use estimation::{dme_estimate, infer_volume, soft_argmin, Estimator};
pub use gt::{
    collect_parameter_points, fuse_clusters, model_ground_truth, model_ground_truth_volume, render_mixture,
    superimpose_average,
};
pub use metrics::{cross_entropy, end_point_error, outlier_rate, unimodal_gt};
pub use modes::{reconstruct_from_modes, separate_modes, separate_modes_with_spans};
pub use parallel::map_indexed;
pub use scalar::Scalar;

pub type DiscreteDistribution = distribution::DiscreteDistribution<f64>;
pub type LaplaceMode = distribution::LaplaceMode<f64>;
pub type LabelAnchor = distribution::LabelAnchor<f64>;
pub type GroundTruthMixture = distribution::GroundTruthMixture<f64>;
pub type ProbabilityVolume = volume::ProbabilityVolume<f64>;
pub type EnsembleVolumes = volume::EnsembleVolumes<f64>;
pub type DisparityMap = volume::DisparityMap<f64>;
pub type GrayImage = volume::GrayImage<f64>;
pub type SeparationConfig = modes::SeparationConfig<f64>;
pub type ClusterConfig = cluster::ClusterConfig<f64>;
pub type ParameterPoint = cluster::ParameterPoint<f64>;
pub type GtConfig = gt::GtConfig<f64>;
pub type GtVolume = gt::GtVolume<f64>;
pub type MetricThreshold = metrics::MetricThreshold<f64>;
