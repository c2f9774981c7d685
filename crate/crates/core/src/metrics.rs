//! Similarity metrics: sample-wise MSE and Gaussian-windowed SSIM, folded
//! into one higher-is-better score for the sigma search.

use crate::error::{Error, Result};
use crate::kernel::{convolve_separable_unclamped, make_gaussian_with_radius};
use crate::plane::ImagePlane;

/// SSIM window and stabilization constants.
///
/// Defaults are the canonical 11x11 Gaussian window with sigma 1.5 and
/// k1 = 0.01, k2 = 0.03 over a unit dynamic range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window_sigma: f64,
    pub window_radius: usize,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window_sigma: 1.5,
            window_radius: 5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
        }
    }
}

/// Which similarity functional to optimize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Mse,
    Ssim(SsimParams),
}

impl MetricKind {
    pub fn ssim_default() -> Self {
        MetricKind::Ssim(SsimParams::default())
    }

    /// Stable lowercase name used in CSV columns and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Mse => "mse",
            MetricKind::Ssim(_) => "ssim",
        }
    }
}

fn check_same_dims(a: &ImagePlane, b: &ImagePlane) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::invalid(format!(
            "image dimensions differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Mean squared error over all pixels.
pub fn mse(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    check_same_dims(a, b)?;
    let n = a.pixels().len() as f64;
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok(sum / n)
}

/// Mean SSIM with the default 11x11 sigma-1.5 Gaussian window.
pub fn ssim(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    ssim_with_params(a, b, &SsimParams::default())
}

/// Mean SSIM over the local map.
///
/// Local means, variances, and covariance come from separable Gaussian
/// window convolutions with mirror borders; the per-pixel index uses the
/// standard two-factor form with C1 = (k1 L)^2 and C2 = (k2 L)^2.
pub fn ssim_with_params(a: &ImagePlane, b: &ImagePlane, params: &SsimParams) -> Result<f64> {
    check_same_dims(a, b)?;
    let side = 2 * params.window_radius + 1;
    if a.width() < side || a.height() < side {
        return Err(Error::invalid(format!(
            "image {}x{} is smaller than the {side}x{side} window",
            a.width(),
            a.height()
        )));
    }
    let window = make_gaussian_with_radius(params.window_sigma, params.window_radius)?;
    let (w, h) = (a.width(), a.height());
    let pa = a.pixels();
    let pb = b.pixels();

    let aa: Vec<f64> = pa.iter().map(|&v| v * v).collect();
    let bb: Vec<f64> = pb.iter().map(|&v| v * v).collect();
    let ab: Vec<f64> = pa.iter().zip(pb).map(|(&x, &y)| x * y).collect();

    let mu_a = convolve_separable_unclamped(pa, w, h, &window);
    let mu_b = convolve_separable_unclamped(pb, w, h, &window);
    let m_aa = convolve_separable_unclamped(&aa, w, h, &window);
    let m_bb = convolve_separable_unclamped(&bb, w, h, &window);
    let m_ab = convolve_separable_unclamped(&ab, w, h, &window);

    let c1 = (params.k1 * params.dynamic_range).powi(2);
    let c2 = (params.k2 * params.dynamic_range).powi(2);

    let mut sum = 0.0;
    for i in 0..w * h {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = m_aa[i] - ma * ma;
        let var_b = m_bb[i] - mb * mb;
        let cov = m_ab[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
        // The analytic ratio never leaves [-1, 1], but num and den round
        // independently, and for near-identical windows the quotient can
        // land one ulp above 1 and win strict-argmax ties it should not.
        sum += (num / den).clamp(-1.0, 1.0);
    }
    Ok(sum / (w * h) as f64)
}

/// Higher-is-better score: SSIM as-is, MSE negated, so one maximizer serves
/// both metrics.
pub fn similarity_score(a: &ImagePlane, b: &ImagePlane, metric: &MetricKind) -> Result<f64> {
    match metric {
        MetricKind::Mse => Ok(-mse(a, b)?),
        MetricKind::Ssim(params) => ssim_with_params(a, b, params),
    }
}
