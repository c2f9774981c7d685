//! The sweep: for every corpus image and reduction factor, find sigma*,
//! then aggregate per-factor means with confidence intervals and fit the
//! line relating the factor to the matched blur level.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::io::load_image;
use crate::metrics::MetricKind;
use crate::plane::ImagePlane;
use crate::resample::{decimate, DecimationSpec};
use crate::search::{find_sigma_star_with_decimated, SearchConfig, SearchMode};
use crate::spectral::{fft_2d, signed_bin_index};

/// Where experiment images come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusSource {
    /// Every PNG/PGM in a directory, in filename order.
    Directory(PathBuf),
    /// Seeded synthetic images with a 1/f^2 power spectrum.
    SyntheticPink,
}

/// Corpus description: source plus the synthetic generator's parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub source: CorpusSource,
    pub count: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
}

impl CorpusSpec {
    /// Synthetic corpus: `count` images of `width` x `height`, derived
    /// deterministically from `seed` (image i uses seed + i).
    pub fn synthetic_pink(count: usize, width: usize, height: usize, seed: u64) -> Result<Self> {
        if count < 1 {
            return Err(Error::invalid("corpus needs at least one image".to_string()));
        }
        if width < 16 || height < 16 {
            return Err(Error::invalid(format!(
                "synthetic images must be at least 16x16, got {width}x{height}"
            )));
        }
        Ok(Self {
            source: CorpusSource::SyntheticPink,
            count,
            width,
            height,
            seed,
        })
    }

    /// User-supplied directory of images; count/size/seed are unused.
    pub fn directory(path: impl Into<PathBuf>) -> Self {
        Self {
            source: CorpusSource::Directory(path.into()),
            count: 0,
            width: 0,
            height: 0,
            seed: 0,
        }
    }
}

/// One corpus entry; a load failure is carried, not dropped, so the sweep
/// can emit tagged error records for it.
#[derive(Debug)]
pub struct CorpusImage {
    pub id: String,
    pub image: Result<ImagePlane>,
}

/// Deterministic image whose amplitude spectrum falls off as 1/f (power
/// 1/f^2, the usual natural-image approximation): white Gaussian noise is
/// shaped by 1/f in the frequency domain, inverse-transformed, and the real
/// part is rescaled to fill [0, 1].
pub fn generate_pink_image(width: usize, height: usize, seed: u64) -> Result<ImagePlane> {
    if width < 16 || height < 16 {
        return Err(Error::invalid(format!(
            "pink-noise generator needs at least 16x16, got {width}x{height}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); width * height];
    for ky in 0..height {
        for kx in 0..width {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let fx = signed_bin_index(kx, width) as f64;
            let fy = signed_bin_index(ky, height) as f64;
            let f = fx.hypot(fy);
            if f > 0.0 {
                spectrum[ky * width + kx] = Complex64::new(re, im) / f;
            }
        }
    }
    fft_2d(&mut spectrum, width, height, true);
    let scale = 1.0 / (width * height) as f64;
    let real: Vec<f64> = spectrum.iter().map(|c| c.re * scale).collect();
    let lo = real.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = real.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pixels = if span > 0.0 {
        real.iter().map(|&v| (v - lo) / span).collect()
    } else {
        vec![0.5; width * height]
    };
    Ok(ImagePlane::from_clamped(width, height, pixels))
}

/// Materializes the corpus. Directory sources keep per-file load failures
/// inside the returned entries.
pub fn load_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusImage>> {
    match &spec.source {
        CorpusSource::SyntheticPink => {
            if spec.count < 1 {
                return Err(Error::invalid("corpus needs at least one image".to_string()));
            }
            (0..spec.count)
                .map(|i| {
                    Ok(CorpusImage {
                        id: format!("pink_{i:03}"),
                        image: generate_pink_image(
                            spec.width,
                            spec.height,
                            spec.seed.wrapping_add(i as u64),
                        ),
                    })
                })
                .collect()
        }
        CorpusSource::Directory(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    matches!(
                        p.extension()
                            .and_then(|e| e.to_str())
                            .map(|e| e.to_ascii_lowercase())
                            .as_deref(),
                        Some("png") | Some("pgm") | Some("pnm")
                    )
                })
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(Error::invalid(format!(
                    "no PNG or PGM images found in {}",
                    dir.display()
                )));
            }
            Ok(paths
                .into_iter()
                .map(|p| {
                    let id = p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| p.display().to_string());
                    CorpusImage {
                        id,
                        image: load_image(&p),
                    }
                })
                .collect())
        }
    }
}

/// Sweep outcome for one cell; failed cells carry the failure text.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Ok,
    Failed(String),
}

impl RecordStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RecordStatus::Ok)
    }
}

/// One (image, m, metric, mode) cell of the sweep.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub image_id: String,
    pub m: f64,
    pub m_eff: f64,
    pub metric: MetricKind,
    pub mode: SearchMode,
    /// NaN when status is Failed.
    pub sigma_star: f64,
    pub score_star: f64,
    pub status: RecordStatus,
}

/// Sweep-wide knobs; the sigma range itself scales per factor.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub modes: Vec<SearchMode>,
    pub sigma_min: f64,
    pub coarse_steps: usize,
    pub refine_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modes: vec![SearchMode::Protocol],
            sigma_min: 0.05,
            coarse_steps: 60,
            refine_tol: 1e-3,
        }
    }
}

impl ExperimentConfig {
    fn search_config(&self, m: f64, mode: SearchMode) -> SearchConfig {
        let mut config = SearchConfig::for_factor(m);
        config.sigma_min = self.sigma_min;
        config.coarse_steps = self.coarse_steps;
        config.refine_tol = self.refine_tol;
        config.mode = mode;
        config
    }
}

/// Runs the full factorial sweep: corpus x m_values x metrics x modes.
/// Every cell yields exactly one record; failures come back tagged instead
/// of dropped. Records are sorted, so output order is deterministic no
/// matter how the work was scheduled.
pub fn run_experiment(
    corpus: &CorpusSpec,
    m_values: &[f64],
    metrics: &[MetricKind],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentRecord>> {
    run_experiment_with_progress(corpus, m_values, metrics, config, |_| {})
}

/// Same sweep, invoking `progress` as each record completes (in completion
/// order, from worker threads).
pub fn run_experiment_with_progress(
    corpus: &CorpusSpec,
    m_values: &[f64],
    metrics: &[MetricKind],
    config: &ExperimentConfig,
    progress: impl Fn(&ExperimentRecord) + Sync,
) -> Result<Vec<ExperimentRecord>> {
    if m_values.is_empty() {
        return Err(Error::invalid("no reduction factors given".to_string()));
    }
    for &m in m_values {
        if !m.is_finite() || m < 1.0 {
            return Err(Error::invalid(format!(
                "reduction factors must be finite and >= 1, got {m}"
            )));
        }
    }
    if metrics.is_empty() {
        return Err(Error::invalid("no metrics given".to_string()));
    }
    if config.modes.is_empty() {
        return Err(Error::invalid("no search modes given".to_string()));
    }
    let images = load_corpus(corpus)?;

    let cells: Vec<(&CorpusImage, f64)> = images
        .iter()
        .flat_map(|img| m_values.iter().map(move |&m| (img, m)))
        .collect();

    let mut records: Vec<ExperimentRecord> = cells
        .par_iter()
        .flat_map(|&(corpus_image, m)| {
            let out = sweep_cell(corpus_image, m, metrics, config);
            for r in &out {
                progress(r);
            }
            out
        })
        .collect();

    records.sort_by(|a, b| {
        a.image_id
            .cmp(&b.image_id)
            .then(a.m.total_cmp(&b.m))
            .then(a.metric.name().cmp(b.metric.name()))
            .then(a.mode.name().cmp(b.mode.name()))
    });
    Ok(records)
}

/// All records for one (image, m) pair; the decimated arm is computed once
/// and shared across metrics and modes.
fn sweep_cell(
    corpus_image: &CorpusImage,
    m: f64,
    metrics: &[MetricKind],
    config: &ExperimentConfig,
) -> Vec<ExperimentRecord> {
    let mut out = Vec::with_capacity(metrics.len() * config.modes.len());
    let push_failure = |message: &str, out: &mut Vec<ExperimentRecord>| {
        for metric in metrics {
            for &mode in &config.modes {
                out.push(ExperimentRecord {
                    image_id: corpus_image.id.clone(),
                    m,
                    m_eff: f64::NAN,
                    metric: *metric,
                    mode,
                    sigma_star: f64::NAN,
                    score_star: f64::NAN,
                    status: RecordStatus::Failed(message.to_string()),
                });
            }
        }
    };

    let image = match &corpus_image.image {
        Ok(image) => image,
        Err(e) => {
            let msg = e.to_string();
            push_failure(&msg, &mut out);
            return out;
        }
    };
    let spec = match DecimationSpec::new(m) {
        Ok(spec) => spec,
        Err(e) => {
            let msg = e.to_string();
            push_failure(&msg, &mut out);
            return out;
        }
    };
    let decimated = match decimate(image, &spec) {
        Ok(d) => d,
        Err(e) => {
            let msg = e.to_string();
            push_failure(&msg, &mut out);
            return out;
        }
    };
    let m_eff = spec.effective_factor(image.width());

    for metric in metrics {
        for &mode in &config.modes {
            let search = config.search_config(m, mode);
            let record = match find_sigma_star_with_decimated(
                image, &decimated, m, m_eff, metric, &search,
            ) {
                Ok(result) => ExperimentRecord {
                    image_id: corpus_image.id.clone(),
                    m,
                    m_eff,
                    metric: *metric,
                    mode,
                    sigma_star: result.sigma_star,
                    score_star: result.score_star,
                    status: RecordStatus::Ok,
                },
                Err(e) => ExperimentRecord {
                    image_id: corpus_image.id.clone(),
                    m,
                    m_eff,
                    metric: *metric,
                    mode,
                    sigma_star: f64::NAN,
                    score_star: f64::NAN,
                    status: RecordStatus::Failed(e.to_string()),
                },
            };
            out.push(record);
        }
    }
    out
}

/// Straight-line fit with t-based 95% confidence intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci95: (f64, f64),
    pub intercept_ci95: (f64, f64),
}

/// Ordinary least squares of y on x with 95% CIs from the t distribution
/// on n - 2 degrees of freedom.
pub fn ols_with_ci(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "x and y lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "regression needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&v| (v - x_mean) * (v - x_mean)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a - x_mean) * (b - y_mean))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::invalid(
            "regression needs spread in x; all x values are equal".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let dof = nf - 2.0;
    let s = (sse / dof).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::NumericalFailure(format!("t distribution: {e}")))?
        .inverse_cdf(0.975);
    let slope_half = t * s / sxx.sqrt();
    let intercept_half = t * s * (1.0 / nf + x_mean * x_mean / sxx).sqrt();
    Ok(OlsFit {
        slope,
        intercept,
        slope_ci95: (slope - slope_half, slope + slope_half),
        intercept_ci95: (intercept - intercept_half, intercept + intercept_half),
    })
}

/// Mean with a t-based 95% confidence interval; needs n >= 2.
pub(crate) fn mean_ci95(values: &[f64]) -> Result<(f64, f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "confidence interval needs at least 2 values, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .map_err(|e| Error::NumericalFailure(format!("t distribution: {e}")))?
        .inverse_cdf(0.975);
    let half = t * var.sqrt() / nf.sqrt();
    Ok((mean, mean - half, mean + half))
}

/// Per-factor aggregate of sigma*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerMStat {
    pub m: f64,
    pub n: usize,
    pub mean_sigma: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
}

/// The fitted relationship between reduction factor and matched blur.
///
/// Orientation: the fit expresses m_eff as a linear function of sigma*, so
/// `slope` is directly comparable to the rule-of-thumb rate (m = 2 sigma)
/// and the spectral-support rate (m = 1.9092 sigma) carried alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSummary {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci95: (f64, f64),
    pub intercept_ci95: (f64, f64),
    /// Sorted by m.
    pub per_m_stats: Vec<PerMStat>,
    pub rot_slope_ref: f64,
    pub theory_slope_ref: f64,
}

/// Reference rates reported next to every fit.
pub const ROT_SLOPE_REF: f64 = 2.0;
pub const THEORY_SLOPE_REF: f64 = 1.9092;

/// Aggregates successful records: OLS of m_eff on sigma* over raw records,
/// plus per-factor mean sigma* with 95% CIs.
///
/// The records must be a single (metric, mode) slice; mixed slices are
/// rejected so two populations never get pooled into one line.
pub fn summarize(records: &[ExperimentRecord]) -> Result<RegressionSummary> {
    let ok_records: Vec<&ExperimentRecord> =
        records.iter().filter(|r| r.status.is_ok()).collect();
    if ok_records.is_empty() {
        return Err(Error::invalid(
            "no successful records to summarize".to_string(),
        ));
    }
    let metric_name = ok_records[0].metric.name();
    let mode_name = ok_records[0].mode.name();
    for r in &ok_records {
        if r.metric.name() != metric_name || r.mode.name() != mode_name {
            return Err(Error::invalid(format!(
                "records mix ({}, {}) with ({}, {}); fit each slice separately",
                metric_name,
                mode_name,
                r.metric.name(),
                r.mode.name()
            )));
        }
    }

    let mut m_values: Vec<f64> = ok_records.iter().map(|r| r.m).collect();
    m_values.sort_by(f64::total_cmp);
    m_values.dedup();
    if m_values.len() < 2 {
        return Err(Error::invalid(format!(
            "regression needs at least 2 distinct reduction factors, got {}",
            m_values.len()
        )));
    }

    let mut per_m_stats = Vec::with_capacity(m_values.len());
    for &m in &m_values {
        let sigmas: Vec<f64> = ok_records
            .iter()
            .filter(|r| r.m == m)
            .map(|r| r.sigma_star)
            .collect();
        if sigmas.len() < 3 {
            return Err(Error::invalid(format!(
                "m = {m}: {} records, need at least 3 per factor",
                sigmas.len()
            )));
        }
        let (mean, lo, hi) = mean_ci95(&sigmas)?;
        per_m_stats.push(PerMStat {
            m,
            n: sigmas.len(),
            mean_sigma: mean,
            ci95_lo: lo,
            ci95_hi: hi,
        });
    }

    let x: Vec<f64> = ok_records.iter().map(|r| r.sigma_star).collect();
    let y: Vec<f64> = ok_records.iter().map(|r| r.m_eff).collect();
    let fit = ols_with_ci(&x, &y)?;

    Ok(RegressionSummary {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_ci95: fit.slope_ci95,
        intercept_ci95: fit.intercept_ci95,
        per_m_stats,
        rot_slope_ref: ROT_SLOPE_REF,
        theory_slope_ref: THEORY_SLOPE_REF,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::plane_spectrum;

    #[test]
    fn pink_images_are_deterministic_and_seed_sensitive() {
        let a = generate_pink_image(32, 32, 123).unwrap();
        let b = generate_pink_image(32, 32, 123).unwrap();
        assert_eq!(a.pixels(), b.pixels());
        let c = generate_pink_image(32, 32, 124).unwrap();
        assert!(a.max_abs_diff(&c) > 0.1, "diff {}", a.max_abs_diff(&c));
        assert!(generate_pink_image(8, 32, 1).is_err());
    }

    #[test]
    fn pink_images_show_inverse_square_radial_power() {
        let img = generate_pink_image(64, 64, 5).unwrap();
        let spectrum = plane_spectrum(&img);
        let n = 64usize;
        let mut by_radius: Vec<(f64, Vec<f64>)> = Vec::new();
        for ky in 0..n {
            for kx in 0..n {
                let fx = signed_bin_index(kx, n) as f64;
                let fy = signed_bin_index(ky, n) as f64;
                let r = fx.hypot(fy).round();
                if !(2.0..=16.0).contains(&r) {
                    continue;
                }
                let power = spectrum[ky * n + kx].norm_sqr();
                match by_radius.iter_mut().find(|(rad, _)| *rad == r) {
                    Some((_, v)) => v.push(power),
                    None => by_radius.push((r, vec![power])),
                }
            }
        }
        let points: Vec<(f64, f64)> = by_radius
            .iter()
            .map(|(r, powers)| {
                let mean = powers.iter().sum::<f64>() / powers.len() as f64;
                (r.ln(), mean.ln())
            })
            .collect();
        let nf = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
        assert!(
            (-2.4..=-1.6).contains(&slope),
            "radial log-power slope {slope}"
        );
    }

    #[test]
    fn synthetic_corpus_loads_with_stable_ids() {
        let spec = CorpusSpec::synthetic_pink(3, 32, 32, 7).unwrap();
        let corpus = load_corpus(&spec).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus[0].id, "pink_000");
        assert_eq!(corpus[2].id, "pink_002");
        assert!(corpus.iter().all(|c| c.image.is_ok()));
        assert!(CorpusSpec::synthetic_pink(0, 32, 32, 7).is_err());
    }

    #[test]
    fn directory_corpus_keeps_failures_and_sorts_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let img = generate_pink_image(16, 16, 1).unwrap();
        crate::io::save_image(&img, &dir.path().join("b.png"), None).unwrap();
        crate::io::save_image(&img, &dir.path().join("a.pgm"), None).unwrap();
        std::fs::write(dir.path().join("broken.png"), b"not an image").unwrap();
        std::fs::write(dir.path().join("notes.txt"), b"skip me").unwrap();

        let corpus = load_corpus(&CorpusSpec::directory(dir.path())).unwrap();
        let ids: Vec<&str> = corpus.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "broken"]);
        assert!(corpus[0].image.is_ok());
        assert!(corpus[1].image.is_ok());
        assert!(corpus[2].image.is_err());

        let empty = tempfile::tempdir().unwrap();
        assert!(load_corpus(&CorpusSpec::directory(empty.path())).is_err());
    }

    #[test]
    fn sweep_yields_one_record_per_cell() {
        let spec = CorpusSpec::synthetic_pink(5, 32, 32, 11).unwrap();
        let records = run_experiment(
            &spec,
            &[2.0, 4.0],
            &[MetricKind::ssim_default()],
            &ExperimentConfig::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 10);
        assert!(records.iter().all(|r| r.status.is_ok()));
        // Sorted: image id first, then m.
        assert_eq!(records[0].image_id, "pink_000");
        assert_eq!(records[0].m, 2.0);
        assert_eq!(records[1].m, 4.0);
    }

    #[test]
    fn unit_factor_records_stay_near_zero_blur() {
        let spec = CorpusSpec::synthetic_pink(3, 32, 32, 13).unwrap();
        let records = run_experiment(
            &spec,
            &[1.0],
            &[MetricKind::ssim_default()],
            &ExperimentConfig::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert!(r.status.is_ok());
            assert!(r.sigma_star <= 0.1, "sigma* = {}", r.sigma_star);
        }
    }

    #[test]
    fn unreadable_images_become_tagged_records() {
        let dir = tempfile::tempdir().unwrap();
        let img = generate_pink_image(32, 32, 2).unwrap();
        crate::io::save_image(&img, &dir.path().join("good.png"), None).unwrap();
        std::fs::write(dir.path().join("bad.png"), b"garbage").unwrap();

        let records = run_experiment(
            &CorpusSpec::directory(dir.path()),
            &[2.0, 3.0],
            &[MetricKind::Mse],
            &ExperimentConfig::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 4);
        let failed: Vec<_> = records.iter().filter(|r| !r.status.is_ok()).collect();
        assert_eq!(failed.len(), 2);
        assert!(failed.iter().all(|r| r.image_id == "bad"));
        assert!(failed.iter().all(|r| r.sigma_star.is_nan()));
    }

    #[test]
    fn rejects_degenerate_sweep_parameters() {
        let spec = CorpusSpec::synthetic_pink(2, 32, 32, 1).unwrap();
        let config = ExperimentConfig::default();
        let ssim = [MetricKind::ssim_default()];
        assert!(run_experiment(&spec, &[], &ssim, &config).is_err());
        assert!(run_experiment(&spec, &[0.5], &ssim, &config).is_err());
        assert!(run_experiment(&spec, &[2.0], &[], &config).is_err());
        let no_modes = ExperimentConfig {
            modes: vec![],
            ..ExperimentConfig::default()
        };
        assert!(run_experiment(&spec, &[2.0], &ssim, &no_modes).is_err());
    }

    #[test]
    fn ols_matches_the_hand_computed_fit() {
        // Six points, worked through the closed-form OLS and t-interval
        // formulas independently at high precision.
        let x = [0.55, 1.02, 1.49, 2.10, 2.62, 3.05];
        let y = [1.20, 2.05, 2.95, 4.10, 5.00, 5.90];
        let fit = ols_with_ci(&x, &y).unwrap();
        assert!((fit.slope - 1.869766428921435).abs() < 1e-10);
        assert!((fit.intercept - 0.158404929130143).abs() < 1e-10);
        assert!((fit.slope_ci95.0 - 1.821923922785508).abs() < 1e-10);
        assert!((fit.slope_ci95.1 - 1.917608935057362).abs() < 1e-10);
        assert!((fit.intercept_ci95.0 - 0.062441440148378).abs() < 1e-10);
        assert!((fit.intercept_ci95.1 - 0.254368418111909).abs() < 1e-10);
    }

    #[test]
    fn ols_rejects_degenerate_inputs() {
        assert!(ols_with_ci(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(ols_with_ci(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(ols_with_ci(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mean_ci_matches_the_hand_computed_interval() {
        let values = [0.95, 1.00, 1.04, 1.10, 0.99];
        let (mean, lo, hi) = mean_ci95(&values).unwrap();
        assert!((mean - 1.016).abs() < 1e-12);
        assert!((lo - 0.945432399539688).abs() < 1e-10);
        assert!((hi - 1.086567600460312).abs() < 1e-10);
        assert!(mean_ci95(&[1.0]).is_err());
    }

    fn record(id: &str, m: f64, m_eff: f64, sigma: f64) -> ExperimentRecord {
        ExperimentRecord {
            image_id: id.to_string(),
            m,
            m_eff,
            metric: MetricKind::ssim_default(),
            mode: SearchMode::Protocol,
            sigma_star: sigma,
            score_star: 0.9,
            status: RecordStatus::Ok,
        }
    }

    #[test]
    fn exact_rule_of_thumb_records_fit_perfectly() {
        // sigma* = m/2 exactly: the m-per-sigma slope is 2, intercept 0,
        // and zero residuals collapse the confidence intervals.
        let mut records = Vec::new();
        for m in [2.0, 4.0] {
            for i in 0..3 {
                records.push(record(&format!("img_{i}"), m, m, m / 2.0));
            }
        }
        let summary = summarize(&records).unwrap();
        assert_eq!(summary.slope, 2.0);
        assert_eq!(summary.intercept, 0.0);
        assert_eq!(summary.slope_ci95, (2.0, 2.0));
        assert_eq!(summary.intercept_ci95, (0.0, 0.0));
        assert_eq!(summary.per_m_stats.len(), 2);
        assert_eq!(summary.per_m_stats[0].mean_sigma, 1.0);
        assert_eq!(summary.per_m_stats[1].mean_sigma, 2.0);
        assert_eq!(summary.rot_slope_ref, 2.0);
        assert_eq!(summary.theory_slope_ref, 1.9092);
    }

    #[test]
    fn summarize_names_the_deficient_cell() {
        let mut records = Vec::new();
        for i in 0..3 {
            records.push(record(&format!("img_{i}"), 2.0, 2.0, 1.0 + i as f64 * 0.01));
        }
        records.push(record("img_0", 4.0, 4.0, 2.0));
        records.push(record("img_1", 4.0, 4.0, 2.05));
        let err = summarize(&records).unwrap_err().to_string();
        assert!(err.contains("m = 4"), "message: {err}");

        let single_m = &records[0..3];
        assert!(summarize(single_m).is_err());
    }

    #[test]
    fn summarize_refuses_mixed_slices() {
        let mut records = Vec::new();
        for m in [2.0, 3.0] {
            for i in 0..3 {
                records.push(record(&format!("img_{i}"), m, m, m / 2.0 + i as f64 * 0.01));
            }
        }
        records[0].metric = MetricKind::Mse;
        let err = summarize(&records).unwrap_err().to_string();
        assert!(err.contains("separately"), "message: {err}");
    }

    #[test]
    fn per_m_stats_come_back_sorted_with_valid_intervals() {
        let mut records = Vec::new();
        for (i, m) in [4.0, 2.0, 3.0].iter().enumerate() {
            for j in 0..4 {
                records.push(record(
                    &format!("img_{j}"),
                    *m,
                    *m,
                    m / 2.0 + (i + j) as f64 * 0.01,
                ));
            }
        }
        let summary = summarize(&records).unwrap();
        let ms: Vec<f64> = summary.per_m_stats.iter().map(|s| s.m).collect();
        assert_eq!(ms, [2.0, 3.0, 4.0]);
        for stat in &summary.per_m_stats {
            assert!(stat.ci95_lo <= stat.mean_sigma && stat.mean_sigma <= stat.ci95_hi);
            assert_eq!(stat.n, 4);
        }
        assert!(summary.slope_ci95.0 <= summary.slope && summary.slope <= summary.slope_ci95.1);
        assert!(
            summary.intercept_ci95.0 <= summary.intercept
                && summary.intercept <= summary.intercept_ci95.1
        );
    }
}
