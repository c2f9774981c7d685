//! Core library for studying how decimation (downsample, then interpolate
//! back up, with no anti-alias prefilter) compares to a single Gaussian
//! blur, and for finding the blur level that matches it best.

pub mod error;
pub mod experiment;
pub mod io;
pub mod kernel;
pub mod metrics;
pub mod plane;
pub mod report;
pub mod resample;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
pub use experiment::{
    generate_pink_image, load_corpus, ols_with_ci, run_experiment, run_experiment_with_progress,
    summarize, CorpusImage, CorpusSource, CorpusSpec, ExperimentConfig, ExperimentRecord, OlsFit,
    PerMStat, RecordStatus, RegressionSummary, ROT_SLOPE_REF, THEORY_SLOPE_REF,
};
pub use io::{load_image, luminance_plane, quantize_to_u8, save_image, ImageFormatKind};
pub use kernel::{blur, convolve_separable, convolve_separable_unclamped, make_gaussian_kernel, Kernel1D};
pub use metrics::{mse, similarity_score, ssim, ssim_with_params, MetricKind, SsimParams};
pub use plane::ImagePlane;
pub use report::{emit_report, ReportPaths};
pub use resample::{
    decimate, m_from_distances, prefilter_cubic_bspline, sample_spline, Boundary, DecimationSpec,
    Interpolator, SplineCoefficients,
};
pub use search::{
    find_sigma_star, find_sigma_star_with_decimated, objective, objective_with_decimated,
    SearchConfig, SearchMode, SigmaSearchResult,
};
pub use spectral::{
    aliased_energy_fraction, decimated_spectrum, gaussian_ft, plane_spectrum, rot_slope,
    run_theory_checks, signed_bin_index, slope_for_support_factor, truncation_ratio, Spectrum1D,
    TheoryCheck, TheoryCheckGroup, TheoryConstants, SUPPORT_FACTOR_999, SUPPORT_FACTOR_9999,
};
