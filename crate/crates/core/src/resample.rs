//! Decimation by a real-valued factor: downsample, then interpolate back up.
//!
//! The downsample step works in coarse-pixel units, the way image resizers
//! do: the interpolation kernel is dilated by the per-axis reduction factor,
//! so each coarse sample is a normalized weighted average of the fine pixels
//! under one coarse pitch. The dilated kernel is a soft low-pass, not a
//! brick wall, and there is no separate anti-alias stage, so content above
//! the coarse Nyquist rate still folds back into the baseband (attenuated).
//! The upsample step interpolates the coarse image at the original grid. The
//! default interpolant is an interpolating cubic B-spline (coefficients from
//! the recursive prefilter), with Keys bicubic available as an alternate.

use crate::error::{Error, Result};
use crate::kernel::mirror_index;
use crate::plane::ImagePlane;

/// Interpolation kernel used for both the down- and upsample steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolator {
    /// Interpolating cubic B-spline (recursive prefilter, then basis taps).
    CubicBSpline,
    /// Keys bicubic convolution kernel with a = -1/2; no prefilter.
    BicubicKeys,
}

/// Border handling for out-of-range sample coordinates.
///
/// Only half-sample mirror reflection is implemented; it keeps constant
/// images exact fixed points and avoids edge dimming.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Mirror,
}

/// Reduction factor plus interpolation policy for one decimation pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecimationSpec {
    m: f64,
    interpolator: Interpolator,
    boundary: Boundary,
}

impl DecimationSpec {
    /// Cubic B-spline decimation by factor `m`; requires finite `m >= 1`.
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m < 1.0 {
            return Err(Error::invalid(format!(
                "reduction factor must be finite and >= 1, got {m}"
            )));
        }
        Ok(Self {
            m,
            interpolator: Interpolator::CubicBSpline,
            boundary: Boundary::Mirror,
        })
    }

    pub fn with_interpolator(mut self, interpolator: Interpolator) -> Self {
        self.interpolator = interpolator;
        self
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn interpolator(&self) -> Interpolator {
        self.interpolator
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Coarse sample count along an axis of length `n`.
    pub fn coarse_len(&self, n: usize) -> usize {
        ((n as f64 / self.m).round() as usize).max(1)
    }

    /// The factor actually realized along an axis of length `n` after the
    /// coarse size is rounded to an integer. This is what regressions report.
    pub fn effective_factor(&self, n: usize) -> f64 {
        n as f64 / self.coarse_len(n) as f64
    }
}

/// Cubic B-spline coefficient plane for one image.
///
/// Holds `c` such that the spline `sum_k c_k beta3(x - k)` passes through
/// every source pixel at integer coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoefficients {
    width: usize,
    height: usize,
    coeffs: Vec<f64>,
}

impl SplineCoefficients {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Pole of the cubic B-spline direct filter (z + 4 + 1/z)/6: sqrt(3) - 2.
fn bspline_pole() -> f64 {
    3.0_f64.sqrt() - 2.0
}

/// Terms kept in the geometric boundary sums; |z1|^30 < 1e-17, far below
/// every tolerance in this crate.
const PREFILTER_HORIZON: usize = 30;

/// Computes the interpolating-spline coefficients of an image.
pub fn prefilter_cubic_bspline(img: &ImagePlane) -> Result<SplineCoefficients> {
    if img.width() < 2 || img.height() < 2 {
        return Err(Error::invalid(format!(
            "spline prefilter needs width and height >= 2, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let mut coeffs = img.pixels().to_vec();
    prefilter_buffer(&mut coeffs, img.width(), img.height());
    Ok(SplineCoefficients {
        width: img.width(),
        height: img.height(),
        coeffs,
    })
}

/// Evaluates the spline at a real coordinate; out-of-domain points mirror.
pub fn sample_spline(coeffs: &SplineCoefficients, x: f64, y: f64) -> f64 {
    sample_coeff_buffer(&coeffs.coeffs, coeffs.width, coeffs.height, x, y)
}

/// Reduction factor equivalent to viewing an image from farther away:
/// `1 + d / d_prime` for a move from distance `d_prime` to `d_prime + d`.
pub fn m_from_distances(d: f64, d_prime: f64) -> Result<f64> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::invalid(format!(
            "extra distance must be finite and >= 0, got {d}"
        )));
    }
    if !d_prime.is_finite() || d_prime <= 0.0 {
        return Err(Error::invalid(format!(
            "base distance must be finite and > 0, got {d_prime}"
        )));
    }
    Ok(1.0 + d / d_prime)
}

/// Downsamples by `spec.m` and interpolates back to the original size.
///
/// The down step resamples in coarse-pixel units: the kernel is dilated by
/// the per-axis effective factor and the weights are renormalized, so each
/// coarse sample averages the fine pixels under one coarse pitch. For the
/// B-spline interpolant the coarse plane is then run through the recursive
/// prefilter along each downscaled axis; the dilated basis average acts as
/// the direct filter at the coarse pitch, and inverting it makes the coarse
/// image interpolate the scene instead of merely approximating it. The up
/// step interpolates that coarse image back at the original grid.
///
/// Both grids are center-aligned (coarse sample `i` sits at
/// `(i + 0.5) * m_eff - 0.5` in fine coordinates), which makes `m = 1` the
/// identity. The coarse intermediate stays unclamped; only the final image
/// is clamped to `[0, 1]`.
pub fn decimate(img: &ImagePlane, spec: &DecimationSpec) -> Result<ImagePlane> {
    if !spec.m.is_finite() || spec.m < 1.0 {
        return Err(Error::invalid(format!(
            "reduction factor must be finite and >= 1, got {}",
            spec.m
        )));
    }
    let (w, h) = (img.width(), img.height());
    let cw = spec.coarse_len(w);
    let ch = spec.coarse_len(h);
    // When the coarse grid equals the fine grid the sample positions are
    // exactly the integers, and interpolation at the integers reproduces the
    // samples; return that identity exactly instead of through rounding.
    if cw == w && ch == h {
        return Ok(img.clone());
    }
    let mx = w as f64 / cw as f64;
    let my = h as f64 / ch as f64;

    let xtaps = coarse_axis_taps(w, cw, spec.interpolator);
    let ytaps = coarse_axis_taps(h, ch, spec.interpolator);
    let src = img.pixels();
    let mut rows = vec![0.0; cw * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        let out = &mut rows[y * cw..(y + 1) * cw];
        for (i, taps) in xtaps.iter().enumerate() {
            out[i] = taps.iter().map(|&(j, wt)| wt * line[j]).sum();
        }
    }
    let mut coarse = vec![0.0; cw * ch];
    for (jy, taps) in ytaps.iter().enumerate() {
        let out = &mut coarse[jy * cw..(jy + 1) * cw];
        for x in 0..cw {
            out[x] = taps.iter().map(|&(j, wt)| wt * rows[j * cw + x]).sum();
        }
    }
    if spec.interpolator == Interpolator::CubicBSpline {
        // Compensate the dilated-basis average so the coarse samples carry
        // full in-band contrast. Only axes that actually shrank were
        // averaged; an axis that kept its length must stay untouched.
        if cw < w {
            prefilter_rows(&mut coarse, cw, ch);
        }
        if ch < h {
            prefilter_cols(&mut coarse, cw, ch);
        }
    }

    let fine = resample_buffer(
        &coarse,
        cw,
        ch,
        w,
        h,
        |i| (i as f64 + 0.5) / mx - 0.5,
        |j| (j as f64 + 0.5) / my - 0.5,
        spec.interpolator,
    );
    Ok(ImagePlane::from_clamped(w, h, fine))
}

/// Source taps and normalized weights for one coarse sample along an axis.
///
/// The kernel is dilated by `src_len / tgt_len` so its footprint spans one
/// coarse pixel; out-of-range taps mirror. Weights are renormalized to sum
/// to one, which keeps constant signals exact fixed points at any factor.
fn coarse_axis_taps(
    src_len: usize,
    tgt_len: usize,
    interpolator: Interpolator,
) -> Vec<Vec<(usize, f64)>> {
    if tgt_len == src_len {
        return (0..tgt_len).map(|i| vec![(i, 1.0)]).collect();
    }
    let s = src_len as f64 / tgt_len as f64;
    (0..tgt_len)
        .map(|i| {
            let x = (i as f64 + 0.5) * s - 0.5;
            let lo = (x - 2.0 * s).ceil() as isize;
            let hi = (x + 2.0 * s).floor() as isize;
            let mut taps = Vec::with_capacity((hi - lo + 1).max(0) as usize);
            let mut norm = 0.0;
            for j in lo..=hi {
                let u = (x - j as f64) / s;
                let wt = match interpolator {
                    Interpolator::CubicBSpline => bspline_value(u),
                    Interpolator::BicubicKeys => keys_weight(u.abs()),
                };
                if wt != 0.0 {
                    norm += wt;
                    taps.push((mirror_index(j, src_len), wt));
                }
            }
            debug_assert!(norm > 0.0, "degenerate kernel row at {x}");
            for tap in &mut taps {
                tap.1 /= norm;
            }
            taps
        })
        .collect()
}

/// Samples `src` at the mapped target grid. Works on raw buffers because the
/// coarse intermediate of `decimate` is allowed to overshoot [0, 1].
#[allow(clippy::too_many_arguments)]
fn resample_buffer(
    src: &[f64],
    sw: usize,
    sh: usize,
    tw: usize,
    th: usize,
    map_x: impl Fn(usize) -> f64,
    map_y: impl Fn(usize) -> f64,
    interpolator: Interpolator,
) -> Vec<f64> {
    let prepared = match interpolator {
        Interpolator::CubicBSpline => {
            let mut c = src.to_vec();
            prefilter_buffer(&mut c, sw, sh);
            c
        }
        Interpolator::BicubicKeys => src.to_vec(),
    };
    let xs: Vec<f64> = (0..tw).map(map_x).collect();
    let mut out = Vec::with_capacity(tw * th);
    for j in 0..th {
        let y = map_y(j);
        for &x in &xs {
            let v = match interpolator {
                Interpolator::CubicBSpline => sample_coeff_buffer(&prepared, sw, sh, x, y),
                Interpolator::BicubicKeys => sample_keys_buffer(&prepared, sw, sh, x, y),
            };
            out.push(v);
        }
    }
    out
}

/// In-place separable spline prefilter: first each row, then each column.
fn prefilter_buffer(buf: &mut [f64], width: usize, height: usize) {
    prefilter_rows(buf, width, height);
    prefilter_cols(buf, width, height);
}

/// Runs the 1-D spline prefilter over every row of the buffer.
fn prefilter_rows(buf: &mut [f64], width: usize, height: usize) {
    assert_eq!(buf.len(), width * height);
    let mut causal = vec![0.0; width];
    for y in 0..height {
        let row = &mut buf[y * width..(y + 1) * width];
        prefilter_line(row, &mut causal);
    }
}

/// Runs the 1-D spline prefilter over every column of the buffer.
fn prefilter_cols(buf: &mut [f64], width: usize, height: usize) {
    assert_eq!(buf.len(), width * height);
    let mut line = vec![0.0; height];
    let mut causal = vec![0.0; height];
    for x in 0..width {
        for (j, c) in line.iter_mut().enumerate() {
            *c = buf[j * width + x];
        }
        prefilter_line(&mut line, &mut causal);
        for (j, &c) in line.iter().enumerate() {
            buf[j * width + x] = c;
        }
    }
}

/// 1-D interpolating-spline prefilter with half-sample mirror borders.
///
/// Applies the inverse of the direct filter (z + 4 + 1/z)/6 as a causal and
/// an anticausal first-order recursion with pole z1, the overall gain 6
/// folded into the causal pass. Border sums run the recursions over the
/// mirrored extension until the geometric tail is below 1e-17.
fn prefilter_line(s: &mut [f64], causal: &mut [f64]) {
    let n = s.len();
    if n < 2 {
        // A single mirrored sample is a constant signal; its coefficient is
        // the sample itself.
        return;
    }
    debug_assert_eq!(causal.len(), n);
    let z1 = bspline_pole();

    let mut init = s[0];
    let mut zp = 1.0;
    for j in 1..=PREFILTER_HORIZON {
        zp *= z1;
        init += zp * s[mirror_index(-(j as isize), n)];
    }
    causal[0] = 6.0 * init;
    for k in 1..n {
        causal[k] = 6.0 * s[k] + z1 * causal[k - 1];
    }

    let mut tail = causal[n - 1];
    let mut init = causal[n - 1];
    zp = 1.0;
    for j in 1..=PREFILTER_HORIZON {
        tail = 6.0 * s[mirror_index((n - 1 + j) as isize, n)] + z1 * tail;
        zp *= z1;
        init += zp * tail;
    }
    s[n - 1] = -z1 * init;
    for k in (0..n - 1).rev() {
        s[k] = z1 * (s[k + 1] - causal[k]);
    }
}

/// Centered cubic B-spline basis value at offset `u`; support is (-2, 2).
fn bspline_value(u: f64) -> f64 {
    let a = u.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + a * a * a / 2.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

/// Cubic B-spline basis weights for the four coefficients around a sample
/// point with fractional part `t`.
fn bspline_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let omt = 1.0 - t;
    [
        omt * omt * omt / 6.0,
        (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0,
        (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0,
        t3 / 6.0,
    ]
}

/// Keys cubic convolution weight (a = -1/2) at absolute offset `u >= 0`.
fn keys_weight(u: f64) -> f64 {
    if u <= 1.0 {
        (1.5 * u - 2.5) * u * u + 1.0
    } else if u < 2.0 {
        ((-0.5 * u + 2.5) * u - 4.0) * u + 2.0
    } else {
        0.0
    }
}

fn keys_weights(t: f64) -> [f64; 4] {
    [
        keys_weight(t + 1.0),
        keys_weight(t),
        keys_weight(1.0 - t),
        keys_weight(2.0 - t),
    ]
}

/// Separable 4x4 tensor-product sample with mirrored indices.
fn sample_tensor(buf: &[f64], w: usize, h: usize, x: f64, y: f64, wx: [f64; 4], wy: [f64; 4]) -> f64 {
    debug_assert!(x.is_finite() && y.is_finite());
    let kx0 = x.floor() as isize - 1;
    let ky0 = y.floor() as isize - 1;
    let ix: [usize; 4] = std::array::from_fn(|i| mirror_index(kx0 + i as isize, w));
    let mut acc = 0.0;
    for (j, &wyj) in wy.iter().enumerate() {
        let row = mirror_index(ky0 + j as isize, h) * w;
        let mut racc = 0.0;
        for (i, &wxi) in wx.iter().enumerate() {
            racc += wxi * buf[row + ix[i]];
        }
        acc += wyj * racc;
    }
    acc
}

fn sample_coeff_buffer(coeffs: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let tx = x - x.floor();
    let ty = y - y.floor();
    sample_tensor(coeffs, w, h, x, y, bspline_weights(tx), bspline_weights(ty))
}

fn sample_keys_buffer(pixels: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let tx = x - x.floor();
    let ty = y - y.floor();
    sample_tensor(pixels, w, h, x, y, keys_weights(tx), keys_weights(ty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct tridiagonal solve of the interpolation system with half-sample
    /// mirror closure: (5c0 + c1)/6 = s0, (c_{k-1} + 4c_k + c_{k+1})/6 = s_k,
    /// (c_{n-2} + 5c_{n-1})/6 = s_{n-1}.
    fn solve_tridiagonal_mirror(s: &[f64]) -> Vec<f64> {
        let n = s.len();
        assert!(n >= 2);
        let mut diag = vec![4.0 / 6.0; n];
        diag[0] = 5.0 / 6.0;
        diag[n - 1] = 5.0 / 6.0;
        let off = 1.0 / 6.0;
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        c_prime[0] = off / diag[0];
        d_prime[0] = s[0] / diag[0];
        for k in 1..n {
            let denom = diag[k] - off * c_prime[k - 1];
            c_prime[k] = off / denom;
            d_prime[k] = (s[k] - off * d_prime[k - 1]) / denom;
        }
        let mut c = vec![0.0; n];
        c[n - 1] = d_prime[n - 1];
        for k in (0..n - 1).rev() {
            c[k] = d_prime[k] - c_prime[k] * c[k + 1];
        }
        c
    }

    fn prefilter_signal(s: &[f64]) -> Vec<f64> {
        let mut buf = s.to_vec();
        let mut causal = vec![0.0; s.len()];
        prefilter_line(&mut buf, &mut causal);
        buf
    }

    #[test]
    fn constant_signal_keeps_constant_coefficients() {
        let c = prefilter_signal(&[0.37; 9]);
        for &v in &c {
            assert!((v - 0.37).abs() < 1e-12, "coefficient {v}");
        }
    }

    #[test]
    fn impulse_coefficients_match_direct_solve() {
        let s = [0.0, 0.0, 1.0, 0.0, 0.0];
        let got = prefilter_signal(&s);
        let want = solve_tridiagonal_mirror(&s);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
        }
        // The interpolation condition must hold back through the basis taps.
        for k in 1..4 {
            let back = (got[k - 1] + 4.0 * got[k] + got[k + 1]) / 6.0;
            assert!((back - s[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn recursive_prefilter_matches_direct_solve_on_random_signals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 5, 17, 64] {
            let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let got = prefilter_signal(&s);
            let want = solve_tridiagonal_mirror(&s);
            for (i, (g, w)) in got.iter().zip(&want).enumerate() {
                assert!(
                    (g - w).abs() < 1e-8,
                    "n = {n}, index {i}: {g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn spline_reproduces_source_pixels_at_integer_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let img = ImagePlane::from_fn(8, 8, |_, _| rng.random::<f64>());
        let coeffs = prefilter_cubic_bspline(&img).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let v = sample_spline(&coeffs, x as f64, y as f64);
                assert!(
                    (v - img.get(x, y)).abs() < 1e-6,
                    "at ({x}, {y}): {v} vs {}",
                    img.get(x, y)
                );
            }
        }
    }

    #[test]
    fn constant_image_samples_to_constant_anywhere() {
        let img = ImagePlane::constant(6, 5, 0.42).unwrap();
        let coeffs = prefilter_cubic_bspline(&img).unwrap();
        for (x, y) in [(0.3, 0.7), (2.5, 2.5), (-1.2, 7.9), (5.01, 0.0)] {
            let v = sample_spline(&coeffs, x, y);
            assert!((v - 0.42).abs() < 1e-12, "at ({x}, {y}): {v}");
        }
    }

    #[test]
    fn spline_reproduces_linear_ramp_between_samples() {
        // Cubic splines reproduce polynomials exactly; away from the mirrored
        // borders the ramp must come back to machine precision (well under
        // the 1e-6 contract).
        let (w, h) = (40, 40);
        let img = ImagePlane::from_fn(w, h, |x, y| {
            (x as f64 + 2.0 * y as f64) / (3.0 * 40.0)
        });
        let coeffs = prefilter_cubic_bspline(&img).unwrap();
        for (x, y) in [(15.25, 20.75), (18.5, 18.5), (20.1, 15.9), (16.0, 23.33)] {
            let want = (x + 2.0 * y) / 120.0;
            let got = sample_spline(&coeffs, x, y);
            assert!((got - want).abs() < 1e-6, "at ({x}, {y}): {got} vs {want}");
        }
    }

    #[test]
    fn keys_kernel_reproduces_pixels_and_interior_ramps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let img = ImagePlane::from_fn(8, 8, |_, _| rng.random::<f64>());
        for y in 0..8 {
            for x in 0..8 {
                let v = sample_keys_buffer(img.pixels(), 8, 8, x as f64, y as f64);
                assert!((v - img.get(x, y)).abs() < 1e-12);
            }
        }
        let ramp = ImagePlane::from_fn(16, 16, |x, y| (x as f64 + y as f64) / 32.0);
        for (x, y) in [(5.5, 7.25), (6.1, 8.9)] {
            let got = sample_keys_buffer(ramp.pixels(), 16, 16, x, y);
            let want = (x + y) / 32.0;
            assert!((got - want).abs() < 1e-12, "at ({x}, {y})");
        }
    }

    #[test]
    fn coarse_sizes_and_effective_factors() {
        let cases = [
            (64usize, 1.5, 43usize),
            (64, 3.0, 21),
            (64, 5.0, 13),
            (64, 6.0, 11),
            (64, 64.0, 1),
            (7, 2.0, 4),
        ];
        for (n, m, want) in cases {
            let spec = DecimationSpec::new(m).unwrap();
            assert_eq!(spec.coarse_len(n), want, "n = {n}, m = {m}");
            let m_eff = spec.effective_factor(n);
            assert!((m_eff - n as f64 / want as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_factors_below_one() {
        assert!(DecimationSpec::new(0.99).is_err());
        assert!(DecimationSpec::new(f64::NAN).is_err());
        assert!(DecimationSpec::new(f64::INFINITY).is_err());
        assert!(DecimationSpec::new(1.0).is_ok());
    }

    #[test]
    fn unit_factor_is_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let img = ImagePlane::from_fn(23, 17, |_, _| rng.random::<f64>());
        for interp in [Interpolator::CubicBSpline, Interpolator::BicubicKeys] {
            let spec = DecimationSpec::new(1.0).unwrap().with_interpolator(interp);
            let out = decimate(&img, &spec).unwrap();
            assert_eq!(out.pixels(), img.pixels(), "{interp:?}");
        }
        // The same identity must hold when the coarse grid merely rounds back
        // to the full size, not only at exactly m = 1.
        let spec = DecimationSpec::new(1.01).unwrap();
        assert_eq!(spec.coarse_len(23), 23);
        let out = decimate(&img, &spec).unwrap();
        assert_eq!(out.pixels(), img.pixels());
    }

    #[test]
    fn constant_images_are_fixed_points_for_every_factor() {
        let img = ImagePlane::constant(32, 24, 0.61).unwrap();
        for m in [1.0, 1.7, 2.0, 3.3, 8.0, 64.0] {
            for interp in [Interpolator::CubicBSpline, Interpolator::BicubicKeys] {
                let spec = DecimationSpec::new(m).unwrap().with_interpolator(interp);
                let out = decimate(&img, &spec).unwrap();
                assert_eq!(out.width(), 32);
                assert_eq!(out.height(), 24);
                assert!(
                    out.max_abs_diff(&img) < 1e-9,
                    "m = {m}, {interp:?}: diff {}",
                    out.max_abs_diff(&img)
                );
            }
        }
    }

    #[test]
    fn high_tone_folds_to_the_predicted_alias_bin() {
        // A horizontal cosine at 20 cycles across 64 columns lies above the
        // m = 2 coarse Nyquist (16 cycles); after decimation its energy must
        // sit at the folded bin |20 - 32| = 12.
        let n = 64;
        let img = ImagePlane::from_fn(n, n, |x, _| {
            0.5 + 0.4 * (2.0 * std::f64::consts::PI * 20.0 * x as f64 / n as f64).cos()
        });
        let spec = DecimationSpec::new(2.0).unwrap();
        let out = decimate(&img, &spec).unwrap();
        // Direct DFT magnitude of one row (all rows are identical).
        let row: Vec<f64> = (0..n).map(|x| out.get(x, 32)).collect();
        let mut best_bin = 0;
        let mut best_mag = 0.0;
        for k in 1..=n / 2 {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &v) in row.iter().enumerate() {
                let ph = -2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64;
                re += v * ph.cos();
                im += v * ph.sin();
            }
            let mag = re.hypot(im);
            if mag > best_mag {
                best_mag = mag;
                best_bin = k;
            }
        }
        assert_eq!(best_bin, 12, "dominant bin after folding");
        assert!(best_mag > 1.0, "alias should carry visible energy");
    }

    #[test]
    fn viewing_distance_factors() {
        assert_eq!(m_from_distances(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(m_from_distances(10.0, 10.0).unwrap(), 2.0);
        assert_eq!(m_from_distances(30.0, 10.0).unwrap(), 4.0);
        assert!(m_from_distances(1.0, 0.0).is_err());
        assert!(m_from_distances(-1.0, 1.0).is_err());
    }

    #[test]
    fn prefilter_rejects_degenerate_planes() {
        let img = ImagePlane::constant(1, 8, 0.5).unwrap();
        assert!(prefilter_cubic_bspline(&img).is_err());
    }
}
