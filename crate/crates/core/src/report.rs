//! Report files for one experiment run: records CSV, summary CSV, and an
//! SVG plot of sigma* against the reduction factor.
//!
//! Output is deterministic byte for byte: rows arrive pre-sorted from the
//! sweep, floats print in shortest round-trip form, and line endings are
//! always LF regardless of platform.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentRecord, RecordStatus, RegressionSummary};

/// Locations of the three files written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub records_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub plot_svg: PathBuf,
}

/// Writes records.csv, summary.csv, and plot.svg into `out_dir`.
///
/// The record list must be non-empty; the guard runs before any directory
/// or file is created, so a failed call leaves no partial output behind.
pub fn emit_report(
    summary: &RegressionSummary,
    records: &[ExperimentRecord],
    out_dir: &Path,
) -> Result<ReportPaths> {
    if records.is_empty() {
        return Err(Error::invalid(
            "refusing to write a report for zero records".to_string(),
        ));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    let paths = ReportPaths {
        records_csv: out_dir.join("records.csv"),
        summary_csv: out_dir.join("summary.csv"),
        plot_svg: out_dir.join("plot.svg"),
    };
    write_text(&paths.records_csv, &records_csv(records))?;
    write_text(&paths.summary_csv, &summary_csv(summary))?;
    write_text(&paths.plot_svg, &plot_svg(summary))?;
    Ok(paths)
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// One row per record; failed cells leave sigma and score empty and carry
/// the sanitized message in the status column.
fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("image_id,m,m_eff,metric,mode,sigma_star,score_star,status\n");
    for r in records {
        let (sigma, score, status) = match &r.status {
            RecordStatus::Ok => (
                r.sigma_star.to_string(),
                r.score_star.to_string(),
                "ok".to_string(),
            ),
            RecordStatus::Failed(msg) => {
                (String::new(), String::new(), format!("error: {}", sanitize_field(msg)))
            }
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sanitize_field(&r.image_id),
            r.m,
            r.m_eff,
            r.metric.name(),
            r.mode.name(),
            sigma,
            score,
            status
        );
    }
    out
}

/// CSV fields are not quoted, so separators and line breaks inside free
/// text have to be replaced rather than escaped.
fn sanitize_field(s: &str) -> String {
    s.replace(['\n', '\r'], " ").replace(',', ";")
}

/// Per-m block followed by the fit trailer.
fn summary_csv(summary: &RegressionSummary) -> String {
    let mut out = String::from("m,n,mean_sigma,ci95_lo,ci95_hi\n");
    for s in &summary.per_m_stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.m, s.n, s.mean_sigma, s.ci95_lo, s.ci95_hi
        );
    }
    out.push_str("slope,intercept,slope_ci_lo,slope_ci_hi,intercept_ci_lo,intercept_ci_hi\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        summary.slope,
        summary.intercept,
        summary.slope_ci95.0,
        summary.slope_ci95.1,
        summary.intercept_ci95.0,
        summary.intercept_ci95.1
    );
    out
}

struct PlotFrame {
    x_max: f64,
    y_max: f64,
}

impl PlotFrame {
    const WIDTH: f64 = 800.0;
    const HEIGHT: f64 = 600.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 25.0;
    const TOP: f64 = 25.0;
    const BOTTOM: f64 = 60.0;

    fn x(&self, m: f64) -> f64 {
        Self::LEFT + m / self.x_max * (Self::WIDTH - Self::LEFT - Self::RIGHT)
    }

    fn y(&self, sigma: f64) -> f64 {
        Self::HEIGHT - Self::BOTTOM - sigma / self.y_max * (Self::HEIGHT - Self::TOP - Self::BOTTOM)
    }
}

/// A straight sigma(m) reference line as an SVG polyline, clipped to the
/// non-negative quadrant of the frame.
fn line_points(frame: &PlotFrame, sigma_at: impl Fn(f64) -> f64) -> String {
    let mut pts = Vec::new();
    let n = 32;
    for i in 0..=n {
        let m = frame.x_max * i as f64 / n as f64;
        let s = sigma_at(m);
        if s.is_finite() && (0.0..=frame.y_max).contains(&s) {
            pts.push(format!("{:.2},{:.2}", frame.x(m), frame.y(s)));
        }
    }
    pts.join(" ")
}

/// Picks a round tick step giving roughly five divisions.
fn tick_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10.0_f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0, 10.0] {
        if mag * mult >= raw {
            return mag * mult;
        }
    }
    mag * 10.0
}

/// Scatter of per-m means with CI whiskers plus three reference lines:
/// the fit, the rule of thumb sigma = m/2, and the spectral-support rate.
fn plot_svg(summary: &RegressionSummary) -> String {
    let stats = &summary.per_m_stats;
    let max_m = stats.iter().map(|s| s.m).fold(1.0_f64, f64::max);
    let x_max = max_m * 1.1;
    let mut y_top = stats.iter().map(|s| s.ci95_hi).fold(0.0_f64, f64::max);
    y_top = y_top.max(x_max / summary.theory_slope_ref);
    y_top = y_top.max(x_max / summary.rot_slope_ref);
    if summary.slope.is_finite() && summary.slope.abs() > 1e-12 {
        let fit_end = (x_max - summary.intercept) / summary.slope;
        if fit_end.is_finite() && fit_end > 0.0 {
            y_top = y_top.max(fit_end.min(x_max));
        }
    }
    let frame = PlotFrame {
        x_max,
        y_max: (y_top * 1.12).max(0.5),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" font-family="sans-serif">"#
    );
    svg.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n");

    let x0 = PlotFrame::LEFT;
    let x1 = PlotFrame::WIDTH - PlotFrame::RIGHT;
    let y0 = PlotFrame::HEIGHT - PlotFrame::BOTTOM;
    let y1 = PlotFrame::TOP;
    let _ = writeln!(
        svg,
        r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#333333" stroke-width="1.5"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#333333" stroke-width="1.5"/>"##
    );

    let xstep = tick_step(frame.x_max);
    let mut m = 0.0;
    while m <= frame.x_max + 1e-9 {
        let px = frame.x(m);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="#333333"/>"##,
            y0 + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{}" font-size="14" text-anchor="middle">{m}</text>"#,
            y0 + 24.0
        );
        m += xstep;
    }
    let ystep = tick_step(frame.y_max);
    let mut s = 0.0;
    while s <= frame.y_max + 1e-9 {
        let py = frame.y(s);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="#333333"/>"##,
            x0 - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="14" text-anchor="end">{s}</text>"#,
            x0 - 10.0,
            py + 5.0
        );
        s += ystep;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{}" font-size="16" text-anchor="middle">reduction factor m</text>"#,
        (x0 + x1) / 2.0,
        PlotFrame::HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" font-size="16" text-anchor="middle" transform="rotate(-90 20 {:.2})">sigma*</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let slope = summary.slope;
    let intercept = summary.intercept;
    let fit = line_points(&frame, |m| {
        if slope.is_finite() && slope.abs() > 1e-12 {
            (m - intercept) / slope
        } else {
            f64::NAN
        }
    });
    let rot = line_points(&frame, |m| m / summary.rot_slope_ref);
    let theory = line_points(&frame, |m| m / summary.theory_slope_ref);
    let _ = writeln!(
        svg,
        r##"<polyline class="fit" points="{fit}" fill="none" stroke="#d62728" stroke-width="2"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<polyline class="rot" points="{rot}" fill="none" stroke="#2ca02c" stroke-width="2" stroke-dasharray="8 5"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<polyline class="theory" points="{theory}" fill="none" stroke="#9467bd" stroke-width="2" stroke-dasharray="3 4"/>"##
    );

    for st in stats {
        let px = frame.x(st.m);
        let (lo, hi) = (frame.y(st.ci95_lo), frame.y(st.ci95_hi));
        let _ = writeln!(
            svg,
            r##"<line class="whisker" x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="#1f77b4" stroke-width="2"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<circle class="mean" cx="{px:.2}" cy="{:.2}" r="5" fill="#1f77b4"/>"##,
            frame.y(st.mean_sigma)
        );
    }

    let legend_x = x0 + 18.0;
    let legend = [
        ("#d62728", format!("fit: m = {:.3} sigma + {:.3}", slope, intercept)),
        ("#2ca02c", format!("rule of thumb: m = {} sigma", summary.rot_slope_ref)),
        ("#9467bd", format!("spectral rate: m = {:.4} sigma", summary.theory_slope_ref)),
    ];
    for (i, (color, label)) in legend.iter().enumerate() {
        let ly = y1 + 16.0 + 22.0 * i as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{legend_x}" y="{:.2}" width="26" height="4" fill="{color}"/>"##,
            ly - 2.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="13">{label}</text>"#,
            legend_x + 34.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
