#![allow(dead_code)]

use gtdist::{evaluate_laplacian, normalize_distribution, DiscreteDistribution, LaplaceMode};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn render(d: usize, modes: &[(f64, f64, f64)]) -> DiscreteDistribution {
    let mut acc = vec![0.0; d];
    for &(w, mu, b) in modes {
        for (a, v) in acc.iter_mut().zip(evaluate_laplacian(d, &LaplaceMode::new(w, mu, b)).unwrap()) {
            *a += v;
        }
    }
    normalize_distribution(acc).unwrap()
}

/// Dirichlet-like random distribution: independent exponentials, some bins
/// forced to zero.
pub fn random_distribution(rng: &mut ChaCha8Rng, d: usize) -> DiscreteDistribution {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { -rng.gen::<f64>().max(1e-300).ln() })
            .collect();
        if v.iter().any(|&x| x > 0.0) {
            return normalize_distribution(v).unwrap();
        }
    }
}

/// Random mixture of one to four Laplacians.
pub fn random_mixture(rng: &mut ChaCha8Rng, d: usize) -> DiscreteDistribution {
    let k = rng.gen_range(1..=4);
    let modes: Vec<_> = (0..k)
        .map(|_| (rng.gen_range(0.05..1.0), rng.gen_range(0.0..(d - 1) as f64), rng.gen_range(0.0..4.0)))
        .collect();
    render(d, &modes)
}

/// Number of strict-or-plateau local maxima of `p` inside `lo..=hi`.
pub fn local_maxima(p: &[f64], lo: usize, hi: usize) -> usize {
    (lo..=hi)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { p[i - 1] };
            let right = p.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            p[i] > left && p[i] >= right
        })
        .count()
}

/// Mean absolute deviation of `p` restricted to `lo..=hi`, computed
/// directly from its definition.
pub fn mad_over_span(p: &[f64], lo: usize, hi: usize) -> (f64, f64, f64) {
    let w: f64 = p[lo..=hi].iter().sum();
    let mu: f64 = (lo..=hi).map(|d| p[d] * d as f64).sum::<f64>() / w;
    let b: f64 = (lo..=hi).map(|d| p[d] * (d as f64 - mu).abs()).sum::<f64>() / w;
    (w, mu, b)
}
