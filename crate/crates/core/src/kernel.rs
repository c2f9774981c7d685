//! Discrete Gaussian kernels and separable convolution with mirror borders.

use crate::error::{Error, Result};
use crate::plane::ImagePlane;

/// An odd-length symmetric 1-D filter, taps normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D {
    taps: Vec<f64>,
    radius: usize,
}

impl Kernel1D {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// Builds the sampled Gaussian `exp(-i^2 / (2 sigma^2))` for
/// `i in [-radius, radius]` with `radius = ceil(3 sigma)`, normalized to
/// unit sum. Taps are computed once per nonnegative offset and mirrored, so
/// symmetry is exact in floating point.
pub fn make_gaussian_kernel(sigma: f64) -> Result<Kernel1D> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!(
            "gaussian sigma must be finite and > 0, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as usize;
    make_gaussian_with_radius(sigma, radius)
}

/// Same sampled Gaussian but with an explicitly chosen radius, for windows
/// whose support is pinned by convention rather than the 3-sigma rule.
pub(crate) fn make_gaussian_with_radius(sigma: f64, radius: usize) -> Result<Kernel1D> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!(
            "gaussian sigma must be finite and > 0, got {sigma}"
        )));
    }
    if radius == 0 {
        return Err(Error::invalid("gaussian radius must be >= 1".to_string()));
    }
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);
    let half: Vec<f64> = (0..=radius)
        .map(|i| (-((i * i) as f64) * inv_two_var).exp())
        .collect();
    let sum = half[0] + 2.0 * half[1..].iter().sum::<f64>();
    let mut taps = vec![0.0; 2 * radius + 1];
    for (i, &g) in half.iter().enumerate() {
        let v = g / sum;
        taps[radius + i] = v;
        taps[radius - i] = v;
    }
    Ok(Kernel1D { taps, radius })
}

/// Reflects an out-of-range index into `[0, n)` about the half-sample
/// boundary, so `-1 -> 0`, `-2 -> 1`, `n -> n-1`, `n+1 -> n-2`, and so on.
#[inline]
pub(crate) fn mirror_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let j = i.rem_euclid(period);
    if j < n {
        j as usize
    } else {
        (period - 1 - j) as usize
    }
}

/// Separable convolution on a raw buffer; no clamping of the result.
///
/// Used directly by the structural-similarity windows, which convolve
/// squared intensities that legitimately stay unclamped.
pub fn convolve_separable_unclamped(
    src: &[f64],
    width: usize,
    height: usize,
    kernel: &Kernel1D,
) -> Vec<f64> {
    assert_eq!(src.len(), width * height, "buffer does not match dimensions");
    let tmp = convolve_rows(src, width, height, kernel);
    convolve_cols(&tmp, width, height, kernel)
}

/// Blurs a plane with the given kernel along both axes, mirror borders,
/// clamping the result back into `[0, 1]`.
pub fn convolve_separable(plane: &ImagePlane, kernel: &Kernel1D) -> ImagePlane {
    let out = convolve_separable_unclamped(plane.pixels(), plane.width(), plane.height(), kernel);
    ImagePlane::from_clamped(plane.width(), plane.height(), out)
}

/// Gaussian blur: builds the kernel for `sigma` and applies it separably.
pub fn blur(plane: &ImagePlane, sigma: f64) -> Result<ImagePlane> {
    let kernel = make_gaussian_kernel(sigma)?;
    Ok(convolve_separable(plane, &kernel))
}

fn convolve_rows(src: &[f64], width: usize, height: usize, kernel: &Kernel1D) -> Vec<f64> {
    let r = kernel.radius;
    let taps = &kernel.taps;
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        let out_row = &mut out[y * width..(y + 1) * width];
        for (x, out_px) in out_row.iter_mut().enumerate() {
            let mut acc = 0.0;
            if x >= r && x + r < width {
                for (k, &t) in taps.iter().enumerate() {
                    acc += t * row[x + k - r];
                }
            } else {
                for (k, &t) in taps.iter().enumerate() {
                    let i = x as isize + k as isize - r as isize;
                    acc += t * row[mirror_index(i, width)];
                }
            }
            *out_px = acc;
        }
    }
    out
}

fn convolve_cols(src: &[f64], width: usize, height: usize, kernel: &Kernel1D) -> Vec<f64> {
    let r = kernel.radius;
    let taps = &kernel.taps;
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        let out_row_range = y * width..(y + 1) * width;
        for (k, &t) in taps.iter().enumerate() {
            let sy = mirror_index(y as isize + k as isize - r as isize, height);
            let src_row = &src[sy * width..(sy + 1) * width];
            let out_row = &mut out[out_row_range.clone()];
            for (o, &s) in out_row.iter_mut().zip(src_row) {
                *o += t * s;
            }
        }
    }
    out
}
