//! Exhaustive reference clustering used to check [`crate::cluster::cluster_mu`].

use crate::cluster::{ClusterConfig, ClusterOutcome, ParameterPoint};
use crate::scalar::Scalar;

/// O(n³) density clustering: builds the full adjacency matrix, takes the
/// transitive closure over core points, then attaches each border point to
/// the earliest cluster (ordered by smallest core index) it touches.
pub fn brute_force_dbscan<T: Scalar>(points: &[ParameterPoint<T>], cfg: &ClusterConfig<T>) -> ClusterOutcome {
    let n = points.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (points[i].mode.mu - points[j].mode.mu).abs() <= cfg.eps)
                .collect()
        })
        .collect();
    let core: Vec<bool> = adj
        .iter()
        .map(|row| row.iter().filter(|&&a| a).count() >= cfg.min_pts)
        .collect();

    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| core[i] && core[j] && adj[i][j]).collect())
        .collect();
    // Warshall's transitive closure, written with plain indices.
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        for i in 0..n {
            if !reach[i][k] {
                continue;
            }
            for j in 0..n {
                if reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }

    // Representative of a core point: smallest core index reachable from it.
    let rep: Vec<Option<usize>> = (0..n)
        .map(|i| core[i].then(|| (0..n).find(|&j| j == i || reach[i][j]).unwrap()))
        .collect();
    let mut reps: Vec<usize> = rep.iter().flatten().copied().collect();
    reps.sort_unstable();
    reps.dedup();

    let mut clusters = vec![Vec::new(); reps.len()];
    let mut noise = Vec::new();
    for i in 0..n {
        let owner = match rep[i] {
            Some(r) => Some(r),
            None => (0..n).filter(|&j| adj[i][j] && core[j]).filter_map(|j| rep[j]).min(),
        };
        match owner {
            Some(r) => clusters[reps.binary_search(&r).unwrap()].push(i),
            None => noise.push(i),
        }
    }

    let mut outcome = ClusterOutcome {
        clusters,
        noise,
        label_cluster: None,
    };
    if let Some(a) = points.iter().position(|p| p.is_anchor()) {
        if outcome.noise.contains(&a) {
            outcome.noise.retain(|&i| i != a);
            outcome.clusters.push(vec![a]);
        }
        outcome.label_cluster = outcome.clusters.iter().position(|c| c.contains(&a));
    }
    outcome
}
