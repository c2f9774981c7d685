//! Python module over the core library. Build the cdylib and import the
//! resulting shared object as `decblur`.

use pyo3::exceptions::{PyIndexError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use decblur_core as core;

fn py_err(e: core::Error) -> PyErr {
    match &e {
        core::Error::InvalidParameter(_) => PyValueError::new_err(e.to_string()),
        core::Error::Io { .. } | core::Error::Image { .. } => PyOSError::new_err(e.to_string()),
        core::Error::NumericalFailure(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_metric(name: &str) -> PyResult<core::MetricKind> {
    match name {
        "ssim" => Ok(core::MetricKind::ssim_default()),
        "mse" => Ok(core::MetricKind::Mse),
        other => Err(PyValueError::new_err(format!(
            "unknown metric {other:?}; expected \"ssim\" or \"mse\""
        ))),
    }
}

fn parse_mode(name: &str) -> PyResult<core::SearchMode> {
    match name {
        "protocol" => Ok(core::SearchMode::Protocol),
        "symmetric" => Ok(core::SearchMode::Symmetric),
        other => Err(PyValueError::new_err(format!(
            "unknown search mode {other:?}; expected \"protocol\" or \"symmetric\""
        ))),
    }
}

fn parse_interpolator(name: &str) -> PyResult<core::Interpolator> {
    match name {
        "cubic_bspline" => Ok(core::Interpolator::CubicBSpline),
        "bicubic_keys" => Ok(core::Interpolator::BicubicKeys),
        other => Err(PyValueError::new_err(format!(
            "unknown interpolator {other:?}; expected \"cubic_bspline\" or \"bicubic_keys\""
        ))),
    }
}

/// Grayscale image with float pixels in [0, 1], row-major.
#[pyclass(frozen)]
struct ImagePlane {
    inner: core::ImagePlane,
}

#[pymethods]
impl ImagePlane {
    /// Builds a plane from row-major pixels; values are clamped to [0, 1].
    #[new]
    fn new(width: usize, height: usize, pixels: Vec<f64>) -> PyResult<Self> {
        if pixels.len() != width * height {
            return Err(PyValueError::new_err(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if width == 0 || height == 0 {
            return Err(PyValueError::new_err("dimensions must be positive"));
        }
        Ok(Self {
            inner: core::ImagePlane::from_clamped(width, height, pixels),
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    /// Row-major copy of the pixel values.
    fn pixels(&self) -> Vec<f64> {
        self.inner.pixels().to_vec()
    }

    fn get(&self, x: usize, y: usize) -> PyResult<f64> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyIndexError::new_err(format!(
                "({x}, {y}) outside {}x{}",
                self.inner.width(),
                self.inner.height()
            )));
        }
        Ok(self.inner.get(x, y))
    }

    fn __repr__(&self) -> String {
        format!(
            "ImagePlane({}x{})",
            self.inner.width(),
            self.inner.height()
        )
    }
}

/// Outcome of one sigma* search.
#[pyclass(frozen)]
struct SigmaSearchResult {
    inner: core::SigmaSearchResult,
}

#[pymethods]
impl SigmaSearchResult {
    #[getter]
    fn sigma_star(&self) -> f64 {
        self.inner.sigma_star
    }

    #[getter]
    fn score_star(&self) -> f64 {
        self.inner.score_star
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m
    }

    #[getter]
    fn m_eff(&self) -> f64 {
        self.inner.m_eff
    }

    #[getter]
    fn metric(&self) -> String {
        self.inner.metric.name().to_string()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.name()
    }

    #[getter]
    fn bracket_saturated(&self) -> bool {
        self.inner.bracket_saturated
    }

    /// (sigma, score) pairs from the coarse scan, in sigma order.
    fn coarse_profile(&self) -> Vec<(f64, f64)> {
        self.inner.coarse_profile.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "SigmaSearchResult(sigma_star={:.4}, score={:.6}, m={}, metric={}, mode={})",
            self.inner.sigma_star,
            self.inner.score_star,
            self.inner.m,
            self.inner.metric.name(),
            self.inner.mode.name()
        )
    }
}

/// Seeded 1/f^2 noise image, the synthetic corpus member.
#[pyfunction]
fn generate_pink_image(width: usize, height: usize, seed: u64) -> PyResult<ImagePlane> {
    core::generate_pink_image(width, height, seed)
        .map(|inner| ImagePlane { inner })
        .map_err(py_err)
}

/// Gaussian blur with standard deviation sigma (pixels).
#[pyfunction]
fn blur(img: &ImagePlane, sigma: f64) -> PyResult<ImagePlane> {
    core::blur(&img.inner, sigma)
        .map(|inner| ImagePlane { inner })
        .map_err(py_err)
}

/// Shrinks by factor m, then interpolates back to the original size.
#[pyfunction]
#[pyo3(signature = (img, m, interpolator = "cubic_bspline"))]
fn decimate(img: &ImagePlane, m: f64, interpolator: &str) -> PyResult<ImagePlane> {
    let spec = core::DecimationSpec::new(m)
        .map_err(py_err)?
        .with_interpolator(parse_interpolator(interpolator)?);
    core::decimate(&img.inner, &spec)
        .map(|inner| ImagePlane { inner })
        .map_err(py_err)
}

/// Mean squared error between two equally sized planes.
#[pyfunction]
fn mse(a: &ImagePlane, b: &ImagePlane) -> PyResult<f64> {
    core::mse(&a.inner, &b.inner).map_err(py_err)
}

/// Mean structural similarity with the standard 11x11 Gaussian window.
#[pyfunction]
fn ssim(a: &ImagePlane, b: &ImagePlane) -> PyResult<f64> {
    core::ssim(&a.inner, &b.inner).map_err(py_err)
}

/// Higher-is-better score under the named metric ("ssim" or "mse").
#[pyfunction]
#[pyo3(signature = (a, b, metric = "ssim"))]
fn similarity_score(a: &ImagePlane, b: &ImagePlane, metric: &str) -> PyResult<f64> {
    core::similarity_score(&a.inner, &b.inner, &parse_metric(metric)?).map_err(py_err)
}

/// Finds the blur width that best mimics decimation by factor m.
#[pyfunction]
#[pyo3(signature = (img, m, metric = "ssim", mode = "protocol"))]
fn find_sigma_star(
    img: &ImagePlane,
    m: f64,
    metric: &str,
    mode: &str,
) -> PyResult<SigmaSearchResult> {
    let config = core::SearchConfig::for_factor(m).with_mode(parse_mode(mode)?);
    core::find_sigma_star(&img.inner, m, &parse_metric(metric)?, &config)
        .map(|inner| SigmaSearchResult { inner })
        .map_err(py_err)
}

/// Normalized Gaussian taps with radius ceil(3 sigma).
#[pyfunction]
fn make_gaussian_kernel(sigma: f64) -> PyResult<Vec<f64>> {
    core::make_gaussian_kernel(sigma)
        .map(|k| k.taps().to_vec())
        .map_err(py_err)
}

/// Fourier transform of the unit-mass Gaussian at angular frequency w.
#[pyfunction]
fn gaussian_ft(w: f64, sigma: f64) -> PyResult<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(PyValueError::new_err(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    Ok(core::gaussian_ft(w, sigma))
}

/// Slope of the sigma-per-m line implied by a 99.9% Gaussian support cut.
#[pyfunction]
fn rot_slope() -> f64 {
    core::rot_slope()
}

/// Growth factor of the spectral tail ratio between sigma = m/2 and sigma = m.
#[pyfunction]
fn truncation_ratio(sigma: f64, m: f64) -> PyResult<f64> {
    if !(sigma > 0.0) || !(m > 0.0) || !sigma.is_finite() || !m.is_finite() {
        return Err(PyValueError::new_err(format!(
            "sigma and m must be positive and finite, got sigma = {sigma}, m = {m}"
        )));
    }
    Ok(core::truncation_ratio(sigma, m))
}

/// Reduction factor equivalent to viewing from d_prime + d instead of d_prime.
#[pyfunction]
fn m_from_distances(d: f64, d_prime: f64) -> PyResult<f64> {
    core::m_from_distances(d, d_prime).map_err(py_err)
}

/// Loads an image file as a luminance plane in [0, 1].
#[pyfunction]
fn load_image(path: &str) -> PyResult<ImagePlane> {
    core::load_image(std::path::Path::new(path))
        .map(|inner| ImagePlane { inner })
        .map_err(py_err)
}

/// Writes the plane as an 8-bit grayscale image; format follows the extension.
#[pyfunction]
fn save_image(img: &ImagePlane, path: &str) -> PyResult<()> {
    core::save_image(&img.inner, std::path::Path::new(path), None).map_err(py_err)
}

#[pymodule]
fn decblur(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ImagePlane>()?;
    m.add_class::<SigmaSearchResult>()?;
    m.add_function(wrap_pyfunction!(generate_pink_image, m)?)?;
    m.add_function(wrap_pyfunction!(blur, m)?)?;
    m.add_function(wrap_pyfunction!(decimate, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(ssim, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_score, m)?)?;
    m.add_function(wrap_pyfunction!(find_sigma_star, m)?)?;
    m.add_function(wrap_pyfunction!(make_gaussian_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_ft, m)?)?;
    m.add_function(wrap_pyfunction!(rot_slope, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(m_from_distances, m)?)?;
    m.add_function(wrap_pyfunction!(load_image, m)?)?;
    m.add_function(wrap_pyfunction!(save_image, m)?)?;
    Ok(())
}
