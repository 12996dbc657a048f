//! Density-based clustering of parameter-space points along the location axis.

use std::collections::VecDeque;

use crate::distribution::LaplaceMode;
use crate::error::{GtError, Result};
use crate::scalar::Scalar;

/// Where a parameter-space point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    Member(usize),
    LabelAnchor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPoint<T> {
    pub mode: LaplaceMode<T>,
    pub source: PointSource,
}

impl<T: Scalar> ParameterPoint<T> {
    pub fn member(index: usize, mode: LaplaceMode<T>) -> Self {
        Self {
            mode,
            source: PointSource::Member(index),
        }
    }

    pub fn anchor(mode: LaplaceMode<T>) -> Self {
        Self {
            mode,
            source: PointSource::LabelAnchor,
        }
    }

    pub fn is_anchor(&self) -> bool {
        self.source == PointSource::LabelAnchor
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig<T> {
    /// Neighbourhood radius on the location axis.
    pub eps: T,
    /// Neighbourhood size (self included) that makes a point a core point.
    pub min_pts: usize,
}

impl<T: Scalar> ClusterConfig<T> {
    pub const DEFAULT_EPS: f64 = 3.0;
    pub const DEFAULT_MIN_PTS: usize = 2;

    pub fn new(eps: T, min_pts: usize) -> Result<Self> {
        let cfg = Self { eps, min_pts };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > T::zero()) {
            return Err(GtError::Config(format!("eps must be positive and finite, got {}", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(GtError::Config("min_pts must be at least 1".into()));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for ClusterConfig<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(Self::DEFAULT_EPS),
            min_pts: Self::DEFAULT_MIN_PTS,
        }
    }
}

/// Partition of point indices into clusters and noise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterOutcome {
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
    /// Cluster holding the label anchor, if there is one.
    pub label_cluster: Option<usize>,
}

impl ClusterOutcome {
    /// Gives the anchor its own cluster if clustering left it as noise, and
    /// records which cluster holds it.
    pub(crate) fn rescue_anchor(&mut self, anchor: Option<usize>) {
        let Some(a) = anchor else { return };
        if let Some(pos) = self.noise.iter().position(|&n| n == a) {
            self.noise.remove(pos);
            self.clusters.push(vec![a]);
        }
        self.label_cluster = self.clusters.iter().position(|c| c.contains(&a));
    }
}

/// Clusters points by location. Clusters are numbered in the order their
/// first core point appears; a border point joins the first cluster that
/// reaches it. A label anchor left as noise is promoted to a singleton
/// cluster.
pub fn cluster_mu<T: Scalar>(points: &[ParameterPoint<T>], cfg: &ClusterConfig<T>) -> ClusterOutcome {
    let mus: Vec<T> = points.iter().map(|p| p.mode.mu).collect();
    let mut outcome = dbscan_1d(&mus, cfg.eps, cfg.min_pts);
    outcome.rescue_anchor(points.iter().position(|p| p.is_anchor()));
    outcome
}

#[derive(Clone, Copy, PartialEq)]
enum Label {
    Unvisited,
    Noise,
    Cluster(usize),
}

fn dbscan_1d<T: Scalar>(mus: &[T], eps: T, min_pts: usize) -> ClusterOutcome {
    let n = mus.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mus[a].partial_cmp(&mus[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    // Neighbours of i are a contiguous run of the sorted order.
    let neighbours = |i: usize| -> &[usize] {
        let m = mus[i];
        let r = rank[i];
        let lo = order[..r].partition_point(|&j| (m - mus[j]).abs() > eps);
        let hi = r + order[r..].partition_point(|&j| (mus[j] - m).abs() <= eps);
        &order[lo..hi]
    };

    let mut labels = vec![Label::Unvisited; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    for i in 0..n {
        if labels[i] != Label::Unvisited {
            continue;
        }
        let seeds = neighbours(i);
        if seeds.len() < min_pts {
            labels[i] = Label::Noise;
            continue;
        }
        let c = clusters.len();
        clusters.push(Vec::new());
        labels[i] = Label::Cluster(c);
        queue.extend(seeds.iter().copied().filter(|&j| j != i));
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Label::Cluster(_) => continue,
                Label::Noise => labels[j] = Label::Cluster(c),
                Label::Unvisited => {
                    labels[j] = Label::Cluster(c);
                    let nb = neighbours(j);
                    if nb.len() >= min_pts {
                        queue.extend(nb.iter().copied().filter(|&k| !matches!(labels[k], Label::Cluster(_))));
                    }
                }
            }
        }
    }

    let mut noise = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match l {
            Label::Cluster(c) => clusters[*c].push(i),
            _ => noise.push(i),
        }
    }
    ClusterOutcome {
        clusters,
        noise,
        label_cluster: None,
    }
}
