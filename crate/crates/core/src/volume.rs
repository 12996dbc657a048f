//! Batch containers: probability volumes, ensembles of them, disparity maps
//! and grayscale images.

use crate::distribution::{DiscreteDistribution, LOAD_TOLERANCE, NORMALIZED_TOLERANCE};
use crate::error::{GtError, Result};
use crate::scalar::{sequential_sum, Scalar};

/// `H × W × D` per-pixel distributions stored row-major as `[h][w][d]`.
///
/// A pixel whose slice is entirely zero carries no distribution (masked).
/// Every other slice holds a normalized distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVolume<T> {
    height: usize,
    width: usize,
    disparities: usize,
    data: Vec<T>,
}

impl<T: Scalar> ProbabilityVolume<T> {
    /// Validates every pixel. Slices within the load tolerance of unit mass
    /// are renormalized; all-zero slices are kept as masked pixels.
    pub fn new(height: usize, width: usize, disparities: usize, mut data: Vec<T>) -> Result<Self> {
        check_dims(height, width, disparities, data.len())?;
        for (i, slice) in data.chunks_exact_mut(disparities).enumerate() {
            if let Some((d, v)) = slice
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < T::zero())
            {
                return Err(GtError::Data(format!(
                    "pixel ({}, {}) bin {d} holds {v}",
                    i / width,
                    i % width
                )));
            }
            let sum = sequential_sum(slice);
            if sum == T::zero() {
                continue;
            }
            let dev = (sum - T::one()).abs();
            if dev > T::lit(LOAD_TOLERANCE) {
                return Err(GtError::Data(format!(
                    "pixel ({}, {}) sums to {sum}, outside 1 ± {LOAD_TOLERANCE}",
                    i / width,
                    i % width
                )));
            }
            if dev > T::lit(NORMALIZED_TOLERANCE) {
                slice.iter_mut().for_each(|v| *v = *v / sum);
            }
        }
        Ok(Self {
            height,
            width,
            disparities,
            data,
        })
    }

    /// Builds a volume from per-pixel distributions in row-major order;
    /// `None` entries become masked pixels.
    pub fn from_pixels(
        height: usize,
        width: usize,
        disparities: usize,
        pixels: Vec<Option<DiscreteDistribution<T>>>,
    ) -> Result<Self> {
        check_dims(height, width, disparities, pixels.len() * disparities)?;
        let mut data = Vec::with_capacity(height * width * disparities);
        for p in pixels {
            match p {
                Some(p) if p.len() == disparities => data.extend_from_slice(p.probs()),
                Some(p) => {
                    return Err(GtError::Data(format!(
                        "pixel has {} candidates, expected {disparities}",
                        p.len()
                    )))
                }
                None => data.extend(std::iter::repeat_n(T::zero(), disparities)),
            }
        }
        Ok(Self {
            height,
            width,
            disparities,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn disparities(&self) -> usize {
        self.disparities
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn pixel(&self, y: usize, x: usize) -> &[T] {
        self.pixel_at(y * self.width + x)
    }

    pub fn pixel_at(&self, index: usize) -> &[T] {
        &self.data[index * self.disparities..(index + 1) * self.disparities]
    }

    pub fn is_masked(&self, index: usize) -> bool {
        self.pixel_at(index).iter().all(|v| *v == T::zero())
    }

    /// The pixel's distribution, or `None` for a masked pixel.
    pub fn distribution_at(&self, index: usize) -> Option<DiscreteDistribution<T>> {
        if self.is_masked(index) {
            None
        } else {
            Some(DiscreteDistribution::from_vec_unchecked(self.pixel_at(index).to_vec()))
        }
    }

    pub fn same_shape<U>(&self, other: &ProbabilityVolume<U>) -> bool {
        self.height == other.height && self.width == other.width && self.disparities == other.disparities
    }
}

fn check_dims(height: usize, width: usize, disparities: usize, len: usize) -> Result<()> {
    if height == 0 || width == 0 || disparities == 0 {
        return Err(GtError::Data(format!(
            "volume dimensions must be positive, got {height}×{width}×{disparities}"
        )));
    }
    let expected = height
        .checked_mul(width)
        .and_then(|n| n.checked_mul(disparities))
        .ok_or_else(|| GtError::Data("volume dimensions overflow".into()))?;
    if expected != len {
        return Err(GtError::Data(format!(
            "volume {height}×{width}×{disparities} needs {expected} values, got {len}"
        )));
    }
    Ok(())
}

/// `M` member volumes of identical shape, one per ensemble network.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleVolumes<T> {
    members: Vec<ProbabilityVolume<T>>,
}

impl<T: Scalar> EnsembleVolumes<T> {
    pub fn new(members: Vec<ProbabilityVolume<T>>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(GtError::Data("ensemble needs at least one member".into()));
        };
        if let Some(i) = members.iter().position(|m| !m.same_shape(first)) {
            return Err(GtError::Data(format!(
                "member {i} is {}×{}×{}, member 0 is {}×{}×{}",
                members[i].height,
                members[i].width,
                members[i].disparities,
                first.height,
                first.width,
                first.disparities
            )));
        }
        Ok(Self { members })
    }

    /// Concatenates ensembles in order.
    pub fn concat(parts: Vec<EnsembleVolumes<T>>) -> Result<Self> {
        Self::new(parts.into_iter().flat_map(|e| e.members).collect())
    }

    pub fn members(&self) -> &[ProbabilityVolume<T>] {
        &self.members
    }

    pub fn into_members(self) -> Vec<ProbabilityVolume<T>> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn height(&self) -> usize {
        self.members[0].height
    }

    pub fn width(&self) -> usize {
        self.members[0].width
    }

    pub fn disparities(&self) -> usize {
        self.members[0].disparities
    }
}

impl<T: Scalar> From<ProbabilityVolume<T>> for EnsembleVolumes<T> {
    fn from(volume: ProbabilityVolume<T>) -> Self {
        Self { members: vec![volume] }
    }
}

/// `H × W` disparities. A pixel is valid iff its value is finite and
/// non-negative; anything else encodes "no disparity".
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap<T> {
    height: usize,
    width: usize,
    values: Vec<T>,
}

impl<T: Scalar> DisparityMap<T> {
    pub fn new(height: usize, width: usize, values: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(GtError::Data(format!(
                "map dimensions must be positive, got {height}×{width}"
            )));
        }
        if values.len() != height * width {
            return Err(GtError::Data(format!(
                "map {height}×{width} needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(Self { height, width, values })
    }

    pub fn filled(height: usize, width: usize, value: T) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    /// Canonical encoding of an invalid pixel.
    pub fn invalid_value() -> T {
        T::infinity()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, y: usize, x: usize) -> T {
        self.values[y * self.width + x]
    }

    pub fn is_valid(&self, index: usize) -> bool {
        let v = self.values[index];
        v.is_finite() && v >= T::zero()
    }

    /// The value at `index` when valid.
    pub fn valid_value(&self, index: usize) -> Option<T> {
        self.is_valid(index).then(|| self.values[index])
    }

    pub fn validity(&self) -> Vec<bool> {
        (0..self.values.len()).map(|i| self.is_valid(i)).collect()
    }

    pub fn valid_count(&self) -> usize {
        (0..self.values.len()).filter(|&i| self.is_valid(i)).count()
    }
}

/// Single-channel image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(GtError::Data(format!(
                "image {width}×{height} cannot hold {} samples",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// Pixel with coordinates clamped to the image (edge replication).
    #[inline]
    pub fn get_clamped(&self, y: isize, x: isize) -> T {
        let y = y.clamp(0, self.height as isize - 1) as usize;
        let x = x.clamp(0, self.width as isize - 1) as usize;
        self.data[y * self.width + x]
    }
}
