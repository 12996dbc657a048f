//! Seeded synthetic scenes with known per-pixel mixtures, and ensembles
//! perturbed from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::KeyValues;
use crate::distribution::{laplacian_kernel, normalize_distribution, DiscreteDistribution, LaplaceMode};
use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::{DisparityMap, EnsembleVolumes, ProbabilityVolume};

/// Smallest location any generated mode may take.
pub const MU_MARGIN: f64 = 5.0;
/// Mass of an injected spurious mode.
pub const SPURIOUS_MASS: f64 = 0.1;

/// Recipe for a synthetic ground-truth scene.
///
/// The image is tiled into `region_size` squares. Each tile draws its own
/// mode count in `k_min..=k_max`; each pixel then draws locations at least
/// `min_separation` apart inside `[5, D-6]`, raw weights in `[w_min, 1]`
/// (normalized to one) and scales in `[b_min, b_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub height: usize,
    pub width: usize,
    pub disparities: usize,
    pub seed: u64,
    pub region_size: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub w_min: f64,
    pub min_separation: f64,
    pub b_min: f64,
    pub b_max: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            height: 64,
            width: 64,
            disparities: 96,
            seed: 0,
            region_size: 8,
            k_min: 1,
            k_max: 3,
            w_min: 0.2,
            min_separation: 8.0,
            b_min: 0.5,
            b_max: 3.0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(GtError::Config(m));
        if self.height == 0 || self.width == 0 || self.region_size == 0 {
            return fail("height, width and region_size must be positive".into());
        }
        if !(1..=3).contains(&self.k_min) || !(self.k_min..=3).contains(&self.k_max) {
            return fail(format!("mode counts must satisfy 1 <= k_min <= k_max <= 3, got {}..={}", self.k_min, self.k_max));
        }
        if !(self.w_min > 0.0 && self.w_min <= 1.0) {
            return fail(format!("w_min must be in (0, 1], got {}", self.w_min));
        }
        if !(self.min_separation >= 8.0 && self.min_separation.is_finite()) {
            return fail(format!("min_separation must be >= 8, got {}", self.min_separation));
        }
        if !(0.5 <= self.b_min && self.b_min <= self.b_max && self.b_max <= 3.0) {
            return fail(format!("scales must satisfy 0.5 <= b_min <= b_max <= 3, got [{}, {}]", self.b_min, self.b_max));
        }
        let room = self.disparities as f64 - 1.0 - 2.0 * MU_MARGIN;
        if room < (self.k_max - 1) as f64 * self.min_separation {
            return fail(format!(
                "{} disparities cannot hold {} modes {} apart inside [{MU_MARGIN}, D-{}]",
                self.disparities,
                self.k_max,
                self.min_separation,
                MU_MARGIN + 1.0
            ));
        }
        Ok(())
    }

    /// Reads the scene keys from a config, leaving other keys in place.
    pub fn from_config(kv: &mut KeyValues) -> Result<Self> {
        let d = Self::default();
        let spec = Self {
            height: kv.take_or("height", d.height)?,
            width: kv.take_or("width", d.width)?,
            disparities: kv.take_or("disparities", d.disparities)?,
            seed: kv.take_or("seed", d.seed)?,
            region_size: kv.take_or("region_size", d.region_size)?,
            k_min: kv.take_or("k_min", d.k_min)?,
            k_max: kv.take_or("k_max", d.k_max)?,
            w_min: kv.take_or("w_min", d.w_min)?,
            min_separation: kv.take_or("min_separation", d.min_separation)?,
            b_min: kv.take_or("b_min", d.b_min)?,
            b_max: kv.take_or("b_max", d.b_max)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// How ensemble members deviate from the true scene.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbSpec {
    pub members: usize,
    /// Maximum absolute location shift per member mode.
    pub mu_jitter: f64,
    /// Maximum absolute weight change per member mode.
    pub w_jitter: f64,
    /// Probability per pixel that one member receives a spurious mode.
    pub spurious_rate: f64,
    /// Spurious modes sit farther than this from every true location.
    pub spurious_min_distance: f64,
    pub spurious_b: f64,
    pub seed: u64,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        Self {
            members: 9,
            mu_jitter: 1.0,
            w_jitter: 0.1,
            spurious_rate: 0.0,
            spurious_min_distance: 10.0,
            spurious_b: 0.8,
            seed: 1,
        }
    }
}

impl PerturbSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(GtError::Config(m));
        if self.members == 0 {
            return fail("members must be at least 1".into());
        }
        if !(self.mu_jitter >= 0.0 && self.w_jitter >= 0.0 && self.mu_jitter.is_finite() && self.w_jitter.is_finite()) {
            return fail("jitters must be finite and non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.spurious_rate) {
            return fail(format!("spurious_rate must be in [0, 1], got {}", self.spurious_rate));
        }
        if !(self.spurious_min_distance > 0.0 && self.spurious_b >= 0.0 && self.spurious_b.is_finite()) {
            return fail("spurious_min_distance must be positive and spurious_b non-negative".into());
        }
        Ok(())
    }

    pub fn from_config(kv: &mut KeyValues) -> Result<Self> {
        let d = Self::default();
        let spec = Self {
            members: kv.take_or("members", d.members)?,
            mu_jitter: kv.take_or("mu_jitter", d.mu_jitter)?,
            w_jitter: kv.take_or("w_jitter", d.w_jitter)?,
            spurious_rate: kv.take_or("spurious_rate", d.spurious_rate)?,
            spurious_min_distance: kv.take_or("spurious_min_distance", d.spurious_min_distance)?,
            spurious_b: kv.take_or("spurious_b", d.spurious_b)?,
            seed: kv.take_or("perturb_seed", d.seed)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A generated scene: rendered truth, dominant-mode labels and the mixture
/// parameters behind every pixel (sorted by location).
#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub disparities: usize,
    pub truth: ProbabilityVolume<T>,
    pub labels: DisparityMap<T>,
    pub mixtures: Vec<Vec<LaplaceMode<T>>>,
}

/// Ensemble generated from a scene, with the spurious mode (member index and
/// parameters) injected at each pixel, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedEnsemble<T> {
    pub ensemble: EnsembleVolumes<T>,
    pub spurious: Vec<Option<(usize, LaplaceMode<T>)>>,
}

/// Renders a mixture and normalizes it.
pub fn render_modes<T: Scalar>(disparities: usize, modes: &[LaplaceMode<T>]) -> Result<DiscreteDistribution<T>> {
    let mut acc = vec![T::zero(); disparities];
    let mut buf = Vec::with_capacity(disparities);
    for m in modes {
        laplacian_kernel(disparities, m, &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, &v)| *a = *a + v);
    }
    normalize_distribution(acc)
}

fn uniform<T: Scalar>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> T {
    T::lit(lo + (hi - lo) * rng.gen::<f64>())
}

fn draw_locations(rng: &mut ChaCha8Rng, k: usize, d: usize, sep: f64) -> Vec<f64> {
    let hi = d as f64 - 1.0 - MU_MARGIN - (k - 1) as f64 * sep;
    let mut base: Vec<f64> = (0..k).map(|_| MU_MARGIN + (hi - MU_MARGIN) * rng.gen::<f64>()).collect();
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base.iter().enumerate().map(|(i, &u)| u + i as f64 * sep).collect()
}

pub fn gen_scene<T: Scalar>(spec: &SceneSpec) -> Result<Scene<T>> {
    spec.validate()?;
    let (h, w, d) = (spec.height, spec.width, spec.disparities);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tiles_x = w.div_ceil(spec.region_size);
    let tiles_y = h.div_ceil(spec.region_size);
    let tile_k: Vec<usize> = (0..tiles_x * tiles_y)
        .map(|_| rng.gen_range(spec.k_min..=spec.k_max))
        .collect();

    let mut mixtures = Vec::with_capacity(h * w);
    let mut pixels = Vec::with_capacity(h * w);
    let mut labels = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let k = tile_k[(y / spec.region_size) * tiles_x + x / spec.region_size];
            let mus = draw_locations(&mut rng, k, d, spec.min_separation);
            let raw: Vec<f64> = (0..k).map(|_| spec.w_min + (1.0 - spec.w_min) * rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let modes: Vec<LaplaceMode<T>> = mus
                .iter()
                .zip(&raw)
                .map(|(&mu, &rw)| LaplaceMode::new(T::lit(rw / total), T::lit(mu), uniform(&mut rng, spec.b_min, spec.b_max)))
                .collect();
            let dominant = modes
                .iter()
                .fold(modes[0], |best, m| if m.w > best.w { *m } else { best });
            labels.push(dominant.mu);
            pixels.push(Some(render_modes(d, &modes)?));
            mixtures.push(modes);
        }
    }
    Ok(Scene {
        disparities: d,
        truth: ProbabilityVolume::from_pixels(h, w, d, pixels)?,
        labels: DisparityMap::new(h, w, labels)?,
        mixtures,
    })
}

/// Picks a location in `[5, D-6]` farther than `min_dist` from every true
/// location, uniformly over the admissible set.
fn draw_spurious_location(rng: &mut ChaCha8Rng, truth: &[f64], d: usize, min_dist: f64) -> Option<f64> {
    let (lo, hi) = (MU_MARGIN, d as f64 - 1.0 - MU_MARGIN);
    let mut blocked: Vec<(f64, f64)> = truth.iter().map(|&m| (m - min_dist, m + min_dist)).collect();
    blocked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut free = Vec::new();
    let mut cursor = lo;
    for (a, b) in blocked {
        if a > cursor {
            free.push((cursor, a.min(hi)));
        }
        cursor = cursor.max(b);
    }
    if cursor < hi {
        free.push((cursor, hi));
    }
    free.retain(|(a, b)| b > a);
    let total: f64 = free.iter().map(|(a, b)| b - a).sum();
    if total <= 0.0 {
        return None;
    }
    let mut t = total * rng.gen::<f64>();
    for &(a, b) in &free {
        if t < b - a {
            return Some(a + t);
        }
        t -= b - a;
    }
    free.last().map(|&(_, b)| b)
}

pub fn perturb_ensemble<T: Scalar>(scene: &Scene<T>, spec: &PerturbSpec) -> Result<PerturbedEnsemble<T>> {
    spec.validate()?;
    let d = scene.disparities;
    let (h, w) = (scene.truth.height(), scene.truth.width());
    let top = T::from_index(d - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut members: Vec<Vec<T>> = vec![Vec::with_capacity(h * w * d); spec.members];
    let mut spurious = Vec::with_capacity(h * w);

    for truth in &scene.mixtures {
        let injected = if spec.spurious_rate > 0.0 && rng.gen::<f64>() < spec.spurious_rate {
            let member = rng.gen_range(0..spec.members);
            let locs: Vec<f64> = truth.iter().map(|m| m.mu.to_f64_lossy()).collect();
            let mu = draw_spurious_location(&mut rng, &locs, d, spec.spurious_min_distance).ok_or_else(|| {
                GtError::Config(format!(
                    "no room for a spurious mode {} away from {locs:?}",
                    spec.spurious_min_distance
                ))
            })?;
            Some((member, LaplaceMode::new(T::lit(SPURIOUS_MASS), T::lit(mu), T::lit(spec.spurious_b))))
        } else {
            None
        };

        for (m, out) in members.iter_mut().enumerate() {
            let mut modes: Vec<LaplaceMode<T>> = truth
                .iter()
                .map(|t| {
                    let dmu: T = uniform(&mut rng, -spec.mu_jitter, spec.mu_jitter);
                    let dw: T = uniform(&mut rng, -spec.w_jitter, spec.w_jitter);
                    LaplaceMode::new(
                        (t.w + dw).max(T::lit(1e-3)),
                        (t.mu + dmu).max(T::zero()).min(top),
                        t.b,
                    )
                })
                .collect();
            if let Some((member, extra)) = injected {
                if member == m {
                    let total = modes.iter().fold(T::zero(), |a, x| a + x.w);
                    let keep = T::one() - extra.w;
                    modes.iter_mut().for_each(|x| x.w = x.w * keep / total);
                    modes.push(extra);
                }
            }
            out.extend_from_slice(render_modes(d, &modes)?.probs());
        }
        spurious.push(injected);
    }

    let volumes = members
        .into_iter()
        .map(|data| ProbabilityVolume::new(h, w, d, data))
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbedEnsemble {
        ensemble: EnsembleVolumes::new(volumes)?,
        spurious,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SceneSpec {
        SceneSpec {
            height: 8,
            width: 8,
            seed,
            ..SceneSpec::default()
        }
    }

    #[test]
    fn scenes_replay_bit_identically() {
        let a: Scene<f64> = gen_scene(&small(3)).unwrap();
        let b: Scene<f64> = gen_scene(&small(3)).unwrap();
        assert_eq!(a, b);
        let c: Scene<f64> = gen_scene(&small(4)).unwrap();
        assert_ne!(a.truth, c.truth);
    }

    #[test]
    fn unimodal_recipe_labels_the_only_mode() {
        let spec = SceneSpec {
            k_min: 1,
            k_max: 1,
            ..small(5)
        };
        let s: Scene<f64> = gen_scene(&spec).unwrap();
        for (i, m) in s.mixtures.iter().enumerate() {
            assert_eq!(m.len(), 1);
            assert_eq!(s.labels.values()[i], m[0].mu);
            assert!((m[0].w - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn recipes_respect_bounds() {
        let s: Scene<f64> = gen_scene(&SceneSpec {
            height: 16,
            width: 16,
            ..SceneSpec::default()
        })
        .unwrap();
        for m in &s.mixtures {
            let wsum: f64 = m.iter().map(|x| x.w).sum();
            assert!((wsum - 1.0).abs() < 1e-12);
            for pair in m.windows(2) {
                assert!(pair[1].mu - pair[0].mu >= 8.0 - 1e-9);
            }
            for x in m {
                assert!(x.mu >= 5.0 && x.mu <= 90.0);
                assert!((0.5..=3.0).contains(&x.b));
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SceneSpec { k_max: 4, ..SceneSpec::default() }.validate().is_err());
        assert!(SceneSpec { b_max: 3.5, ..SceneSpec::default() }.validate().is_err());
        assert!(SceneSpec { min_separation: 5.0, ..SceneSpec::default() }.validate().is_err());
        assert!(SceneSpec { disparities: 20, ..SceneSpec::default() }.validate().is_err());
        assert!(PerturbSpec { members: 0, ..PerturbSpec::default() }.validate().is_err());
        assert!(PerturbSpec { spurious_rate: 1.5, ..PerturbSpec::default() }.validate().is_err());
    }

    #[test]
    fn zero_perturbation_reproduces_truth() {
        let scene: Scene<f64> = gen_scene(&small(9)).unwrap();
        let spec = PerturbSpec {
            members: 3,
            mu_jitter: 0.0,
            w_jitter: 0.0,
            ..PerturbSpec::default()
        };
        let p = perturb_ensemble(&scene, &spec).unwrap();
        for m in p.ensemble.members() {
            assert_eq!(m, &scene.truth);
        }
        assert!(p.spurious.iter().all(Option::is_none));
    }

    #[test]
    fn full_spurious_rate_hits_one_member_per_pixel() {
        let scene: Scene<f64> = gen_scene(&small(2)).unwrap();
        let spec = PerturbSpec {
            spurious_rate: 1.0,
            ..PerturbSpec::default()
        };
        let p = perturb_ensemble(&scene, &spec).unwrap();
        assert_eq!(p.ensemble.len(), 9);
        for (truth, s) in scene.mixtures.iter().zip(&p.spurious) {
            let (member, mode) = s.expect("every pixel carries a spurious mode");
            assert!(member < 9);
            assert_eq!(mode.w, SPURIOUS_MASS);
            assert!(truth.iter().all(|t| (t.mu - mode.mu).abs() >= 10.0));
        }
    }

    #[test]
    fn spurious_location_avoids_blocked_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let mu = draw_spurious_location(&mut rng, &[20.0, 50.0], 96, 10.0).unwrap();
            assert!((5.0..=90.0).contains(&mu));
            assert!((mu - 20.0).abs() >= 10.0 && (mu - 50.0).abs() >= 10.0);
        }
        assert!(draw_spurious_location(&mut rng, &[20.0], 30, 30.0).is_none());
    }

    #[test]
    fn spec_from_config() {
        let mut kv = KeyValues::parse("height=4\nwidth=5\nmembers=3\nperturb_seed=11\n").unwrap();
        let scene = SceneSpec::from_config(&mut kv).unwrap();
        let perturb = PerturbSpec::from_config(&mut kv).unwrap();
        kv.finish().unwrap();
        assert_eq!((scene.height, scene.width), (4, 5));
        assert_eq!((perturb.members, perturb.seed), (3, 11));
    }
}
