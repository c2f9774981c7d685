//! Finding sigma*: the blur level whose output best matches the decimated
//! image, by coarse grid scan plus golden-section refinement.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::blur;
use crate::metrics::{similarity_score, MetricKind};
use crate::plane::ImagePlane;
use crate::resample::{decimate, DecimationSpec};

/// How the two comparison arms are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Compare blur(img, sigma) against decimate(img, m) directly.
    Protocol,
    /// Compare blur(img, sigma) against blur(decimate(img, m), sigma), so
    /// the Gaussian hits both arms. Blurring both arms shrinks every
    /// frequency of their difference, so this objective keeps improving as
    /// sigma grows and the search usually saturates at the top of the
    /// range; treat its sigma* as a diagnostic, not a calibration.
    Symmetric,
}

impl SearchMode {
    /// Stable lowercase name used in CSV columns and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            SearchMode::Protocol => "protocol",
            SearchMode::Symmetric => "symmetric",
        }
    }
}

/// Search range and stopping rule for one sigma* hunt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub coarse_steps: usize,
    pub refine_tol: f64,
    pub mode: SearchMode,
}

impl SearchConfig {
    /// Defaults for reduction factor `m`: range [0.05, max(1.5 m, 3)],
    /// 60 coarse steps, refinement to 1e-3, protocol mode. The upper bound
    /// scales with m so the expected optimum near m/2 has headroom and
    /// saturation stays detectable.
    pub fn for_factor(m: f64) -> Self {
        Self {
            sigma_min: 0.05,
            sigma_max: (1.5 * m).max(3.0),
            coarse_steps: 60,
            refine_tol: 1e-3,
            mode: SearchMode::Protocol,
        }
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_min > 0.0 && self.sigma_min < self.sigma_max && self.sigma_max.is_finite())
        {
            return Err(Error::invalid(format!(
                "need 0 < sigma_min < sigma_max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.coarse_steps < 8 {
            return Err(Error::invalid(format!(
                "coarse grid needs at least 8 steps, got {}",
                self.coarse_steps
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::invalid(format!(
                "refinement tolerance must be > 0, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

/// Outcome of one sigma* search, with the coarse profile for diagnostics.
#[derive(Debug, Clone)]
pub struct SigmaSearchResult {
    pub sigma_star: f64,
    pub score_star: f64,
    pub metric: MetricKind,
    pub m: f64,
    pub m_eff: f64,
    pub mode: SearchMode,
    /// (sigma, score) at every coarse grid point, in ascending sigma order.
    pub coarse_profile: Vec<(f64, f64)>,
    /// True when sigma_star landed against the top of the search range,
    /// meaning the range was too small and the result is a lower bound.
    pub bracket_saturated: bool,
}

/// Similarity between the blur arm and the decimation arm at one sigma.
/// Convenience form that decimates internally; loops should decimate once
/// and use [`objective_with_decimated`].
pub fn objective(
    img: &ImagePlane,
    m: f64,
    sigma: f64,
    metric: &MetricKind,
    mode: SearchMode,
) -> Result<f64> {
    let spec = DecimationSpec::new(m)?;
    let decimated = decimate(img, &spec)?;
    objective_with_decimated(img, &decimated, sigma, metric, mode)
}

/// Same objective with the decimated arm precomputed.
pub fn objective_with_decimated(
    img: &ImagePlane,
    decimated: &ImagePlane,
    sigma: f64,
    metric: &MetricKind,
    mode: SearchMode,
) -> Result<f64> {
    let blurred = blur(img, sigma)?;
    match mode {
        SearchMode::Protocol => similarity_score(&blurred, decimated, metric),
        SearchMode::Symmetric => {
            let other = blur(decimated, sigma)?;
            similarity_score(&blurred, &other, metric)
        }
    }
}

/// Maximizes the objective over sigma for one (image, m, metric) cell.
pub fn find_sigma_star(
    img: &ImagePlane,
    m: f64,
    metric: &MetricKind,
    config: &SearchConfig,
) -> Result<SigmaSearchResult> {
    let spec = DecimationSpec::new(m)?;
    let decimated = decimate(img, &spec)?;
    let m_eff = spec.effective_factor(img.width());
    find_sigma_star_with_decimated(img, &decimated, m, m_eff, metric, config)
}

/// Search core, reusing an already-decimated arm.
///
/// Coarse pass: `coarse_steps` evaluations, evenly spaced over the range,
/// in parallel. Refinement: golden-section on the bracket around the best
/// coarse point until the interval is narrower than `refine_tol`. All ties
/// break toward smaller sigma, and the reported sigma* is always an
/// actually-evaluated point, so its score dominates the whole profile.
/// Deterministic: thread count never changes the arithmetic.
pub fn find_sigma_star_with_decimated(
    img: &ImagePlane,
    decimated: &ImagePlane,
    m: f64,
    m_eff: f64,
    metric: &MetricKind,
    config: &SearchConfig,
) -> Result<SigmaSearchResult> {
    config.validate()?;
    let steps = config.coarse_steps;
    let step = (config.sigma_max - config.sigma_min) / (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps)
        .map(|i| config.sigma_min + i as f64 * step)
        .collect();
    grid[steps - 1] = config.sigma_max;

    let scores: Vec<f64> = grid
        .par_iter()
        .map(|&sigma| objective_with_decimated(img, decimated, sigma, metric, config.mode))
        .collect::<Result<_>>()?;
    for (&sigma, &score) in grid.iter().zip(&scores) {
        if !score.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "objective is not finite at sigma = {sigma}"
            )));
        }
    }

    let mut best_idx = 0;
    for (i, &score) in scores.iter().enumerate() {
        if score > scores[best_idx] {
            best_idx = i;
        }
    }
    let mut best_sigma = grid[best_idx];
    let mut best_score = scores[best_idx];

    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(steps - 1)];
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let track = |sigma: f64, score: f64, best_sigma: &mut f64, best_score: &mut f64| {
        if score > *best_score || (score == *best_score && sigma < *best_sigma) {
            *best_sigma = sigma;
            *best_score = score;
        }
    };
    let eval = |sigma: f64| -> Result<f64> {
        let score = objective_with_decimated(img, decimated, sigma, metric, config.mode)?;
        if !score.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "objective is not finite at sigma = {sigma}"
            )));
        }
        Ok(score)
    };
    if b > a {
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        track(x1, f1, &mut best_sigma, &mut best_score);
        track(x2, f2, &mut best_sigma, &mut best_score);
        while b - a > config.refine_tol {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1)?;
                track(x1, f1, &mut best_sigma, &mut best_score);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2)?;
                track(x2, f2, &mut best_sigma, &mut best_score);
            }
        }
    }

    Ok(SigmaSearchResult {
        sigma_star: best_sigma,
        score_star: best_score,
        metric: *metric,
        m,
        m_eff,
        mode: config.mode,
        coarse_profile: grid.into_iter().zip(scores).collect(),
        bracket_saturated: best_sigma >= config.sigma_max - config.refine_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::generate_pink_image;

    #[test]
    fn config_validation_catches_bad_ranges() {
        let good = SearchConfig::for_factor(2.0);
        assert!(good.validate().is_ok());
        assert_eq!(good.sigma_max, 3.0);
        assert_eq!(SearchConfig::for_factor(4.0).sigma_max, 6.0);

        let mut c = good;
        c.sigma_min = 0.0;
        assert!(c.validate().is_err());
        c = good;
        c.sigma_min = c.sigma_max;
        assert!(c.validate().is_err());
        c = good;
        c.coarse_steps = 7;
        assert!(c.validate().is_err());
        c = good;
        c.refine_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn constant_image_scores_perfectly_at_every_sigma() {
        let img = ImagePlane::constant(24, 24, 0.5).unwrap();
        let config = SearchConfig::for_factor(3.0);

        // Blur and decimation both fix constants up to rounding residue, so
        // the score must be essentially perfect at whatever sigma wins. The
        // argmax position itself is meaningless: the profile is flat and
        // ordered only by cancellation noise in the window statistics.
        let ssim = find_sigma_star(&img, 3.0, &MetricKind::ssim_default(), &config).unwrap();
        assert!(ssim.score_star > 1.0 - 1e-10, "ssim on constants = {}", ssim.score_star);
        assert!(ssim.sigma_star >= config.sigma_min && ssim.sigma_star <= config.sigma_max);
        let again = find_sigma_star(&img, 3.0, &MetricKind::ssim_default(), &config).unwrap();
        assert_eq!(ssim.sigma_star.to_bits(), again.sigma_star.to_bits());

        let a = find_sigma_star(&img, 3.0, &MetricKind::Mse, &config).unwrap();
        let b = find_sigma_star(&img, 3.0, &MetricKind::Mse, &config).unwrap();
        assert!(a.score_star >= -1e-20, "mse on constants = {}", -a.score_star);
        assert_eq!(a.sigma_star.to_bits(), b.sigma_star.to_bits());
        assert!(a.sigma_star >= config.sigma_min && a.sigma_star <= config.sigma_max);
    }

    #[test]
    fn unit_factor_wants_minimal_blur() {
        let img = generate_pink_image(32, 32, 3).unwrap();
        let config = SearchConfig::for_factor(1.0);
        let result = find_sigma_star(&img, 1.0, &MetricKind::ssim_default(), &config).unwrap();
        assert!(result.sigma_star <= 0.1, "sigma* = {}", result.sigma_star);
        assert!((result.m_eff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pink_image_objective_peaks_near_half_the_factor() {
        let img = generate_pink_image(64, 64, 9).unwrap();
        let metric = MetricKind::ssim_default();
        let at = |sigma: f64| objective(&img, 4.0, sigma, &metric, SearchMode::Protocol).unwrap();
        let (s1, s2, s3) = (at(1.0), at(2.0), at(3.0));
        assert!(s2 > s1, "score(2) = {s2} vs score(1) = {s1}");
        assert!(s2 > s3, "score(2) = {s2} vs score(3) = {s3}");
    }

    #[test]
    fn result_dominates_its_own_coarse_profile() {
        let img = generate_pink_image(48, 48, 12).unwrap();
        let config = SearchConfig::for_factor(3.0);
        let result = find_sigma_star(&img, 3.0, &MetricKind::ssim_default(), &config).unwrap();
        assert_eq!(result.coarse_profile.len(), config.coarse_steps);
        for &(sigma, score) in &result.coarse_profile {
            assert!(
                result.score_star >= score,
                "profile point ({sigma}, {score}) beats the reported optimum"
            );
        }
        assert!(result.sigma_star >= config.sigma_min && result.sigma_star <= config.sigma_max);
        assert!(result.sigma_star > 1.0 && result.sigma_star < 2.4,
            "sigma* = {} for m = 3", result.sigma_star);
    }

    #[test]
    fn search_is_deterministic_bit_for_bit() {
        let img = generate_pink_image(48, 48, 4).unwrap();
        let config = SearchConfig::for_factor(2.0);
        let a = find_sigma_star(&img, 2.0, &MetricKind::ssim_default(), &config).unwrap();
        let b = find_sigma_star(&img, 2.0, &MetricKind::ssim_default(), &config).unwrap();
        assert_eq!(a.sigma_star.to_bits(), b.sigma_star.to_bits());
        assert_eq!(a.score_star.to_bits(), b.score_star.to_bits());
        for (p, q) in a.coarse_profile.iter().zip(&b.coarse_profile) {
            assert_eq!(p.1.to_bits(), q.1.to_bits());
        }
    }

    #[test]
    fn refinement_agrees_with_a_dense_grid() {
        let img = generate_pink_image(48, 48, 6).unwrap();
        let metric = MetricKind::ssim_default();
        let config = SearchConfig::for_factor(3.0);
        let result = find_sigma_star(&img, 3.0, &metric, &config).unwrap();

        let dense_steps = config.coarse_steps * 10;
        let dense_step = (config.sigma_max - config.sigma_min) / (dense_steps - 1) as f64;
        let spec = DecimationSpec::new(3.0).unwrap();
        let decimated = decimate(&img, &spec).unwrap();
        let mut best = (config.sigma_min, f64::NEG_INFINITY);
        for i in 0..dense_steps {
            let sigma = config.sigma_min + i as f64 * dense_step;
            let score =
                objective_with_decimated(&img, &decimated, sigma, &metric, SearchMode::Protocol)
                    .unwrap();
            if score > best.1 {
                best = (sigma, score);
            }
        }
        assert!(
            (result.sigma_star - best.0).abs() <= dense_step,
            "sigma* = {} vs dense argmax {} (step {dense_step})",
            result.sigma_star,
            best.0
        );
    }

    #[test]
    fn too_small_a_range_raises_the_saturation_flag() {
        let img = generate_pink_image(48, 48, 15).unwrap();
        let mut config = SearchConfig::for_factor(6.0);
        config.sigma_max = 1.0;
        let result = find_sigma_star(&img, 6.0, &MetricKind::ssim_default(), &config).unwrap();
        assert!(
            result.bracket_saturated,
            "optimum near 3 cannot fit inside [0.05, 1]: sigma* = {}",
            result.sigma_star
        );
    }

    #[test]
    fn symmetric_mode_saturates_while_protocol_stays_interior() {
        let img = generate_pink_image(64, 64, 18).unwrap();
        let metric = MetricKind::ssim_default();
        let config = SearchConfig::for_factor(3.0);
        let protocol = find_sigma_star(&img, 3.0, &metric, &config).unwrap();
        assert!(
            !protocol.bracket_saturated,
            "protocol peak should sit inside the range, got sigma* = {}",
            protocol.sigma_star
        );
        // Blurring both arms shrinks every frequency of the difference, so
        // the symmetric objective keeps improving with sigma and rides the
        // top of the range. The flag is how callers are told.
        let symmetric = find_sigma_star(
            &img,
            3.0,
            &metric,
            &config.with_mode(SearchMode::Symmetric),
        )
        .unwrap();
        assert!(
            symmetric.bracket_saturated,
            "symmetric mode should saturate, got sigma* = {} in [{}, {}]",
            symmetric.sigma_star, config.sigma_min, config.sigma_max
        );
        assert!(symmetric.sigma_star > protocol.sigma_star);
    }

    #[test]
    fn metric_errors_propagate() {
        let img = ImagePlane::constant(8, 8, 0.5).unwrap();
        let config = SearchConfig::for_factor(2.0);
        assert!(find_sigma_star(&img, 2.0, &MetricKind::ssim_default(), &config).is_err());
    }
}
