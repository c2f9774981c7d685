//! Single-channel image container used by every pipeline stage.

use crate::error::{Error, Result};

/// A grayscale image: row-major `f64` intensities, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImagePlane {
    /// Builds a plane from row-major pixels, validating range and finiteness.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer length {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        for (i, &v) in pixels.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "pixel {i} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds a plane by clamping a raw buffer into `[0, 1]`.
    ///
    /// This is the pipeline exit point for stages whose intermediate values
    /// may overshoot the unit interval (spline overshoot, float jitter).
    /// Non-finite values are a bug upstream and panic.
    pub fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Self {
        assert!(width >= 1 && height >= 1, "empty image");
        assert_eq!(pixels.len(), width * height, "pixel buffer length mismatch");
        for v in &mut pixels {
            assert!(v.is_finite(), "non-finite pixel value {v}");
            *v = v.clamp(0.0, 1.0);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Constant-valued plane.
    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds a plane from a function of (x, y), clamping into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::from_clamped(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Pixel at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.pixels.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / self.pixels.len() as f64
    }

    /// Maximum absolute pixel difference between same-sized planes.
    pub fn max_abs_diff(&self, other: &ImagePlane) -> f64 {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
