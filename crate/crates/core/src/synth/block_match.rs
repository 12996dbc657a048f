//! Window-SAD block matcher that turns costs into per-pixel distributions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::{GrayImage, ProbabilityVolume};

/// For each left pixel and candidate `d`, the cost is the mean absolute
/// difference between the `window × window` patch around `(y, x)` in
/// `left` and around `(y, x - d)` in `right`, with edge replication. The
/// distribution is `softmax(-cost / tau)` over `d = 0..disparities`.
pub fn block_match<T: Scalar>(
    left: &GrayImage<T>,
    right: &GrayImage<T>,
    disparities: usize,
    window: usize,
    tau: T,
) -> Result<ProbabilityVolume<T>> {
    if left.width != right.width || left.height != right.height {
        return Err(GtError::Data(format!(
            "left is {}×{}, right is {}×{}",
            left.width, left.height, right.width, right.height
        )));
    }
    if window == 0 || window.is_multiple_of(2) {
        return Err(GtError::InvalidParameter(format!("window must be odd and positive, got {window}")));
    }
    if !(tau.is_finite() && tau > T::zero()) {
        return Err(GtError::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if disparities == 0 {
        return Err(GtError::InvalidParameter("disparity range must be positive".into()));
    }
    let (h, w) = (left.height, left.width);
    let r = (window / 2) as isize;
    let area = T::from_index(window * window);
    let mut data = Vec::with_capacity(h * w * disparities);
    let mut costs = vec![T::zero(); disparities];
    for y in 0..h as isize {
        for x in 0..w as isize {
            for (d, c) in costs.iter_mut().enumerate() {
                let mut sad = T::zero();
                for dy in -r..=r {
                    for dx in -r..=r {
                        let l = left.get_clamped(y + dy, x + dx);
                        let rv = right.get_clamped(y + dy, x + dx - d as isize);
                        sad = sad + (l - rv).abs();
                    }
                }
                *c = sad / area;
            }
            let best = costs.iter().copied().fold(T::infinity(), T::min);
            let start = data.len();
            data.extend(costs.iter().map(|&c| (-(c - best) / tau).exp()));
            let norm = data[start..].iter().fold(T::zero(), |a, &v| a + v);
            data[start..].iter_mut().for_each(|v| *v = *v / norm);
        }
    }
    ProbabilityVolume::new(h, w, disparities, data)
}

/// Uniform random texture in `[0, 1]`.
pub fn texture_image<T: Scalar>(width: usize, height: usize, seed: u64) -> Result<GrayImage<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::new(width, height, (0..width * height).map(|_| T::lit(rng.gen::<f64>())).collect())
}

/// Stereo pair where `right(y, x) = left(y, x + shift)`, so every left pixel
/// with `x >= shift` matches at disparity `shift`.
pub fn shifted_pair<T: Scalar>(width: usize, height: usize, shift: usize, seed: u64) -> Result<(GrayImage<T>, GrayImage<T>)> {
    let wide = texture_image::<T>(width + shift, height, seed)?;
    let crop = |offset: usize| {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (y, x)))
            .map(|(y, x)| wide.data[y * wide.width + x + offset])
            .collect();
        GrayImage::new(width, height, data)
    };
    Ok((crop(0)?, crop(shift)?))
}

/// Vertical stripes of period `period` px shifted by `shift`: every left
/// pixel matches at `shift` and at `shift ± n·period`.
pub fn stripe_pair<T: Scalar>(width: usize, height: usize, shift: usize, period: usize) -> Result<(GrayImage<T>, GrayImage<T>)> {
    if period == 0 {
        return Err(GtError::InvalidParameter("stripe period must be positive".into()));
    }
    let value = |x: usize| {
        let phase = (x % period) as f64 / period as f64;
        T::lit(0.5 + 0.5 * (2.0 * std::f64::consts::PI * phase).sin())
    };
    let left = (0..height).flat_map(|_| (0..width).map(value)).collect();
    let right = (0..height).flat_map(|_| (0..width).map(|x| value(x + shift))).collect();
    Ok((GrayImage::new(width, height, left)?, GrayImage::new(width, height, right)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_images_give_uniform_distributions() {
        let img = GrayImage::new(6, 4, vec![0.3f64; 24]).unwrap();
        let vol = block_match(&img, &img, 8, 3, 0.1).unwrap();
        assert!(vol.data().iter().all(|&v| (v - 0.125).abs() < 1e-12));
    }

    #[test]
    fn shifted_texture_peaks_at_shift() {
        let (l, r) = shifted_pair::<f64>(48, 16, 7, 3).unwrap();
        let vol = block_match(&l, &r, 16, 5, 0.02).unwrap();
        let mut hits = 0;
        let mut total = 0;
        for y in 2..14 {
            for x in (7 + 2)..(48 - 2) {
                let p = vol.pixel(y, x);
                let arg = crate::distribution::argmax_first(p).unwrap();
                hits += usize::from(arg == 7);
                total += 1;
            }
        }
        assert!(hits * 100 >= total * 95, "{hits}/{total}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let a = GrayImage::new(4, 4, vec![0.0f64; 16]).unwrap();
        let b = GrayImage::new(5, 4, vec![0.0f64; 20]).unwrap();
        assert!(matches!(block_match(&a, &b, 4, 3, 0.1), Err(GtError::Data(_))));
        assert!(block_match(&a, &a, 4, 2, 0.1).is_err());
        assert!(block_match(&a, &a, 4, 3, 0.0).is_err());
    }
}
