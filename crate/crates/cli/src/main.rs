//! decblur: blur, decimate, sigma matching, and batch experiments from the
//! command line. Stdout is key=value lines; diagnostics go to stderr.
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decblur_core::{
    blur, decimate, emit_report, find_sigma_star, load_image, m_from_distances, run_experiment,
    run_theory_checks, save_image, summarize, CorpusSpec, DecimationSpec, ExperimentConfig,
    ExperimentRecord, ImageFormatKind, Interpolator, MetricKind, SearchConfig, SearchMode,
    TheoryCheckGroup,
};

#[derive(Parser)]
#[command(
    name = "decblur",
    version,
    about = "Decimation vs. Gaussian blur: pipelines, sigma matching, and reports"
)]
struct Cli {
    /// Worker threads for sweeps (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for synthetic corpora.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output image encoding; by default the file extension decides.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Png,
    Pgm,
}

impl From<FormatArg> for ImageFormatKind {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Png => ImageFormatKind::Png,
            FormatArg::Pgm => ImageFormatKind::Pgm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpArg {
    #[value(name = "cubic_bspline")]
    CubicBspline,
    #[value(name = "bicubic_keys")]
    BicubicKeys,
}

impl From<InterpArg> for Interpolator {
    fn from(i: InterpArg) -> Self {
        match i {
            InterpArg::CubicBspline => Interpolator::CubicBSpline,
            InterpArg::BicubicKeys => Interpolator::BicubicKeys,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Mse,
    Ssim,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Mse => MetricKind::Mse,
            MetricArg::Ssim => MetricKind::ssim_default(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Protocol,
    Symmetric,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Protocol => SearchMode::Protocol,
            ModeArg::Symmetric => SearchMode::Symmetric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    All,
    Constants,
    Decimation,
    Ratio,
}

impl From<CheckArg> for TheoryCheckGroup {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::All => TheoryCheckGroup::All,
            CheckArg::Constants => TheoryCheckGroup::Constants,
            CheckArg::Decimation => TheoryCheckGroup::Decimation,
            CheckArg::Ratio => TheoryCheckGroup::Ratio,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian-blur an image; sigma 0 writes the luminance unchanged.
    Blur {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Downsample by m and interpolate back to the original size.
    Decimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: f64,
        #[arg(long, value_enum, default_value = "cubic_bspline")]
        interp: InterpArg,
        #[arg(long)]
        output: PathBuf,
    },
    /// Find the blur level that best matches the decimated image.
    FindSigma {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: f64,
        #[arg(long, value_enum, default_value = "ssim")]
        metric: MetricArg,
        #[arg(long, value_enum, default_value = "protocol")]
        mode: ModeArg,
    },
    /// Sweep a corpus over factors and metrics; write CSV + SVG reports.
    Experiment {
        /// "synthetic" or a directory of PNG/PGM images.
        #[arg(long, default_value = "synthetic")]
        corpus: String,
        /// Synthetic corpus size.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Synthetic image width.
        #[arg(long, default_value_t = 64)]
        width: usize,
        /// Synthetic image height.
        #[arg(long, default_value_t = 64)]
        height: usize,
        /// Comma-separated reduction factors.
        #[arg(long, default_value = "1.5,2,3,4,5,6,8")]
        m_list: String,
        /// Comma-separated metrics (mse, ssim).
        #[arg(long, default_value = "ssim,mse")]
        metrics: String,
        /// Comma-separated modes (protocol, symmetric).
        #[arg(long, default_value = "protocol")]
        modes: String,
        /// Report directory; multi-group runs get per-group subdirectories.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the frequency-domain self-checks; nonzero exit on any failure.
    Theory {
        #[arg(long, value_enum, default_value = "all")]
        check: CheckArg,
    },
    /// Viewing-distance helper: m = 1 + d/d', plus the m/2 blur equivalent.
    Distview {
        /// Extra distance moved away from the image.
        #[arg(long)]
        d: f64,
        /// Base viewing distance.
        #[arg(long)]
        d_prime: f64,
    },
}

/// Usage errors exit 2 like clap's own; everything else exits 1.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<decblur_core::Error> for CliError {
    fn from(e: decblur_core::Error) -> Self {
        match e {
            decblur_core::Error::InvalidParameter(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let format = cli.format.map(ImageFormatKind::from);
    match cli.command {
        Command::Blur {
            input,
            sigma,
            output,
        } => {
            if !sigma.is_finite() || sigma < 0.0 {
                return Err(CliError::Usage(format!(
                    "sigma must be finite and >= 0, got {sigma}"
                )));
            }
            let plane = load_image(&input)?;
            let result = if sigma == 0.0 {
                plane
            } else {
                blur(&plane, sigma)?
            };
            save_image(&result, &output, format)?;
            Ok(())
        }
        Command::Decimate {
            input,
            m,
            interp,
            output,
        } => {
            let spec = DecimationSpec::new(m)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .with_interpolator(interp.into());
            let plane = load_image(&input)?;
            let result = decimate(&plane, &spec)?;
            save_image(&result, &output, format)?;
            Ok(())
        }
        Command::FindSigma {
            input,
            m,
            metric,
            mode,
        } => {
            if !m.is_finite() || m < 1.0 {
                return Err(CliError::Usage(format!(
                    "reduction factor must be finite and >= 1, got {m}"
                )));
            }
            let plane = load_image(&input)?;
            let config = SearchConfig::for_factor(m).with_mode(mode.into());
            let result = find_sigma_star(&plane, m, &metric.into(), &config)?;
            if result.bracket_saturated {
                eprintln!(
                    "warning: sigma* sits at the top of [{}, {}]; the true optimum may be larger",
                    config.sigma_min, config.sigma_max
                );
            }
            println!(
                "sigma_star={} score={} m_eff={}",
                result.sigma_star, result.score_star, result.m_eff
            );
            Ok(())
        }
        Command::Experiment {
            corpus,
            count,
            width,
            height,
            m_list,
            metrics,
            modes,
            out,
        } => cmd_experiment(
            &corpus, count, width, height, cli.seed, &m_list, &metrics, &modes, &out,
        ),
        Command::Theory { check } => {
            let checks = run_theory_checks(check.into());
            let mut all_pass = true;
            for c in &checks {
                all_pass &= c.pass;
                println!(
                    "check={} pass={} value={} detail={}",
                    c.name, c.pass, c.value, c.detail
                );
            }
            if all_pass {
                Ok(())
            } else {
                Err(CliError::Runtime("one or more theory checks failed".into()))
            }
        }
        Command::Distview { d, d_prime } => {
            let m = m_from_distances(d, d_prime).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("m={} sigma={}", m, m / 2.0);
            Ok(())
        }
    }
}

fn parse_m_list(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let m: f64 = part
            .parse()
            .map_err(|_| CliError::Usage(format!("bad reduction factor: {part:?}")))?;
        if !m.is_finite() || m < 1.0 {
            return Err(CliError::Usage(format!(
                "reduction factor must be finite and >= 1, got {m}"
            )));
        }
        out.push(m);
    }
    if out.is_empty() {
        return Err(CliError::Usage("m list is empty".into()));
    }
    Ok(out)
}

fn parse_metrics(text: &str) -> Result<Vec<MetricKind>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        match part.trim() {
            "" => {}
            "mse" => out.push(MetricKind::Mse),
            "ssim" => out.push(MetricKind::ssim_default()),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown metric {other:?} (expected mse or ssim)"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("metric list is empty".into()));
    }
    Ok(out)
}

fn parse_modes(text: &str) -> Result<Vec<SearchMode>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        match part.trim() {
            "" => {}
            "protocol" => out.push(SearchMode::Protocol),
            "symmetric" => out.push(SearchMode::Symmetric),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown mode {other:?} (expected protocol or symmetric)"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("mode list is empty".into()));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    corpus: &str,
    count: usize,
    width: usize,
    height: usize,
    seed: u64,
    m_list: &str,
    metrics: &str,
    modes: &str,
    out: &PathBuf,
) -> Result<(), CliError> {
    let m_values = parse_m_list(m_list)?;
    let metrics = parse_metrics(metrics)?;
    let modes = parse_modes(modes)?;
    let spec = if corpus == "synthetic" {
        CorpusSpec::synthetic_pink(count, width, height, seed)
            .map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        CorpusSpec::directory(corpus)
    };
    let config = ExperimentConfig {
        modes: modes.clone(),
        ..ExperimentConfig::default()
    };
    let records = run_experiment(&spec, &m_values, &metrics, &config)?;

    let single_group = metrics.len() == 1 && modes.len() == 1;
    for metric in &metrics {
        for mode in &modes {
            let group: Vec<ExperimentRecord> = records
                .iter()
                .filter(|r| r.metric.name() == metric.name() && r.mode == *mode)
                .cloned()
                .collect();
            let failed = group.iter().filter(|r| !r.status.is_ok()).count();
            let summary = summarize(&group)?;
            let dir = if single_group {
                out.clone()
            } else {
                out.join(format!("{}_{}", metric.name(), mode.name()))
            };
            let paths = emit_report(&summary, &group, &dir)?;
            println!(
                "group={}_{} records={} failed={} slope={} slope_ci_lo={} slope_ci_hi={} intercept={} out={}",
                metric.name(),
                mode.name(),
                group.len(),
                failed,
                summary.slope,
                summary.slope_ci95.0,
                summary.slope_ci95.1,
                summary.intercept,
                paths.records_csv.parent().unwrap_or(dir.as_path()).display()
            );
        }
    }
    Ok(())
}
