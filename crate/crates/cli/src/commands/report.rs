//! `prefault report`: flatten an evaluation report into plot-ready CSVs
//! and optionally render the run's curves as a static SVG.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;

use prefault_core::io::{load_json, read_rfe_trace_csv, ReportJson, ReportMetrics};
use prefault_core::select::RfeIteration;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct ReportArgs {
    /// Evaluation report JSON.
    #[arg(long)]
    pub report: PathBuf,
    /// Elimination trace CSV to chart alongside.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Horizon sweep CSV to chart alongside.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Render report.svg with the available curves.
    #[arg(long)]
    pub svg: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn metrics_record(scope: &str, m: &ReportMetrics) -> Vec<String> {
    vec![
        scope.to_string(),
        m.n_faults.to_string(),
        m.true_positives.to_string(),
        m.false_negatives.to_string(),
        m.false_positive_events.to_string(),
        m.precision.to_string(),
        m.recall.to_string(),
        m.f1.to_string(),
        opt_cell(m.lead_mean_h),
        opt_cell(m.lead_median_h),
        opt_cell(m.lead_q1_h),
        opt_cell(m.lead_q3_h),
    ]
}

fn read_sweep_csv(path: &Path) -> Result<Vec<(i64, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Failure::at(path, e))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Failure::at(path, e))?;
        let h = rec[0].parse().map_err(|e| Failure::at(path, format!("bad horizon: {e}")))?;
        let f1 = rec[1].parse().map_err(|e| Failure::at(path, format!("bad F1: {e}")))?;
        out.push((h, f1));
    }
    Ok(out)
}

pub fn run(args: ReportArgs, mut config: RunConfig) -> Result<()> {
    let dir = config::out_dir(&mut config, args.out)?;
    let report: ReportJson = load_json(&args.report).map_err(|e| Failure::at(&args.report, e))?;
    let trace: Option<Vec<RfeIteration>> = args
        .trace
        .as_deref()
        .map(|p| read_rfe_trace_csv(p).map_err(|e| Failure::at(p, e)))
        .transpose()?;
    let sweep: Option<Vec<(i64, f64)>> =
        args.sweep.as_deref().map(read_sweep_csv).transpose()?;

    let mut manifest = RunManifest::new("report", &config);
    manifest.input(&args.report)?;
    if let Some(p) = &args.trace {
        manifest.input(p)?;
    }
    if let Some(p) = &args.sweep {
        manifest.input(p)?;
    }

    let metrics_path = dir.join("metrics.csv");
    {
        let mut w = csv::Writer::from_path(&metrics_path).map_err(|e| Failure::at(&metrics_path, e))?;
        w.write_record([
            "scope",
            "n_faults",
            "true_positives",
            "false_negatives",
            "false_positive_events",
            "precision",
            "recall",
            "f1",
            "lead_mean_h",
            "lead_median_h",
            "lead_q1_h",
            "lead_q3_h",
        ])
        .map_err(|e| Failure::at(&metrics_path, e))?;
        w.write_record(metrics_record("combined", &report.combined))
            .map_err(|e| Failure::at(&metrics_path, e))?;
        for (station, m) in &report.per_station {
            w.write_record(metrics_record(station, m)).map_err(|e| Failure::at(&metrics_path, e))?;
        }
        w.flush().map_err(|e| Failure::at(&metrics_path, e))?;
    }
    manifest.output(&metrics_path)?;

    let leads_path = dir.join("lead_times.csv");
    {
        let mut w = csv::Writer::from_path(&leads_path).map_err(|e| Failure::at(&leads_path, e))?;
        w.write_record(["scope", "lead_h"]).map_err(|e| Failure::at(&leads_path, e))?;
        for (station, m) in &report.per_station {
            for lead in &m.lead_times_h {
                w.write_record([station.as_str(), &lead.to_string()])
                    .map_err(|e| Failure::at(&leads_path, e))?;
            }
        }
        w.flush().map_err(|e| Failure::at(&leads_path, e))?;
    }
    manifest.output(&leads_path)?;

    if args.svg {
        let svg_path = dir.join("report.svg");
        let svg = render_svg(&report, trace.as_deref(), sweep.as_deref());
        let mut f =
            std::fs::File::create(&svg_path).map_err(|e| Failure::at(&svg_path, e))?;
        f.write_all(svg.as_bytes()).map_err(|e| Failure::at(&svg_path, e))?;
        manifest.output(&svg_path)?;
    }
    manifest.save(&dir)?;

    println!(
        "combined F1 {:.4} over {} stations -> {}",
        report.combined.f1,
        report.per_station.len(),
        dir.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// SVG rendering: fixed-size panels, one per available curve.
// ---------------------------------------------------------------------------

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 170.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 34.0;

struct Panel {
    svg: String,
    /// Vertical offset of this panel within the document.
    y0: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Panel {
    fn new(y0: f64, title: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Panel {
        let mut svg = String::new();
        let _ = write!(
            svg,
            r#"<text x="{MARGIN_L}" y="{}" font-size="13" font-weight="bold">{title}</text>"#,
            y0 + 16.0
        );
        let (x0, y0px, x1, y1px) = (
            MARGIN_L,
            y0 + MARGIN_T,
            PANEL_W - MARGIN_R,
            y0 + PANEL_H - MARGIN_B,
        );
        let _ = write!(
            svg,
            r#"<rect x="{x0}" y="{y0px}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
            x1 - x0,
            y1px - y0px
        );
        Panel { svg, y0, x_range, y_range }
    }

    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        MARGIN_L + t * (PANEL_W - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        self.y0 + PANEL_H - MARGIN_B - t * (PANEL_H - MARGIN_T - MARGIN_B)
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        let path: Vec<String> =
            points.iter().map(|&(x, y)| format!("{:.1},{:.1}", self.x(x), self.y(y))).collect();
        let _ = write!(
            self.svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
    }

    fn dots(&mut self, points: &[(f64, f64)], color: &str) {
        for &(x, y) in points {
            let _ = write!(
                self.svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}" fill-opacity="0.7"/>"#,
                self.x(x),
                self.y(y)
            );
        }
    }

    fn axis_labels(&mut self, x_name: &str, y_name: &str) {
        let (xlo, xhi) = self.x_range;
        let (ylo, yhi) = self.y_range;
        let bottom = self.y0 + PANEL_H - MARGIN_B;
        let _ = write!(
            self.svg,
            concat!(
                r#"<text x="{cx:.0}" y="{by:.0}" font-size="11" text-anchor="middle">{xn}</text>"#,
                r#"<text x="{lx:.0}" y="{by2:.0}" font-size="10" text-anchor="middle">{xlo}</text>"#,
                r#"<text x="{rx:.0}" y="{by2:.0}" font-size="10" text-anchor="middle">{xhi}</text>"#,
                r#"<text x="{ly:.0}" y="{ty:.0}" font-size="10" text-anchor="end">{yhi}</text>"#,
                r#"<text x="{ly:.0}" y="{byy:.0}" font-size="10" text-anchor="end">{ylo}</text>"#,
                r#"<text x="{ly2:.0}" y="{my:.0}" font-size="11" text-anchor="middle" transform="rotate(-90 {ly2:.0} {my:.0})">{yn}</text>"#
            ),
            cx = (MARGIN_L + PANEL_W - MARGIN_R) / 2.0,
            by = bottom + 26.0,
            by2 = bottom + 13.0,
            lx = MARGIN_L,
            rx = PANEL_W - MARGIN_R,
            xlo = trim_num(xlo),
            xhi = trim_num(xhi),
            ly = MARGIN_L - 6.0,
            ty = self.y0 + MARGIN_T + 4.0,
            byy = bottom + 3.0,
            yhi = trim_num(yhi),
            ylo = trim_num(ylo),
            ly2 = 14.0,
            my = (self.y0 + MARGIN_T + bottom) / 2.0,
            xn = x_name,
            yn = y_name,
        );
    }
}

fn trim_num(v: f64) -> String {
    if v == v.trunc() {
        format!("{}", v as i64)
    } else {
        format!("{v:.2}")
    }
}

fn render_svg(
    report: &ReportJson,
    trace: Option<&[RfeIteration]>,
    sweep: Option<&[(i64, f64)]>,
) -> String {
    let mut panels: Vec<Panel> = Vec::new();
    let mut y0 = 0.0;

    let leads = &report.combined.lead_times_h;
    if !leads.is_empty() {
        let hi = leads.iter().cloned().fold(0.0, f64::max).max(1.0);
        let mut p = Panel::new(y0, "Lead times", (0.0, hi), (0.0, 1.0));
        let pts: Vec<(f64, f64)> = leads
            .iter()
            .enumerate()
            .map(|(i, &h)| (h, 0.25 + 0.5 * ((i % 5) as f64 / 4.0)))
            .collect();
        p.dots(&pts, "firebrick");
        if let Some(mean) = report.combined.lead_mean_h {
            let x = p.x(mean);
            let _ = write!(
                p.svg,
                r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="firebrick" stroke-dasharray="4 3"/>"#,
                p.y(1.0),
                p.y(0.0)
            );
        }
        p.axis_labels("hours before fault", "");
        panels.push(p);
        y0 += PANEL_H;
    }

    if let Some(iterations) = trace {
        if !iterations.is_empty() {
            let xmax = iterations.iter().map(|i| i.size).max().unwrap_or(1) as f64;
            let mut p = Panel::new(y0, "Elimination trace", (0.0, xmax), (0.0, 1.0));
            let pts: Vec<(f64, f64)> =
                iterations.iter().map(|i| (i.size as f64, i.mean_accuracy)).collect();
            p.polyline(&pts, "steelblue");
            p.dots(&pts, "steelblue");
            p.axis_labels("active features", "mean accuracy");
            panels.push(p);
            y0 += PANEL_H;
        }
    }

    if let Some(points) = sweep {
        if !points.is_empty() {
            let xmax = points.iter().map(|&(h, _)| h).max().unwrap_or(1) as f64;
            let mut p = Panel::new(y0, "Horizon sweep", (0.0, xmax), (0.0, 1.0));
            let pts: Vec<(f64, f64)> = points.iter().map(|&(h, f1)| (h as f64, f1)).collect();
            p.polyline(&pts, "seagreen");
            p.dots(&pts, "seagreen");
            p.axis_labels("horizon (hours)", "F1");
            panels.push(p);
            y0 += PANEL_H;
        }
    }

    let height = y0.max(PANEL_H);
    let mut svg = format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" "#,
            r#"viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
            r#"<rect width="{w}" height="{h}" fill="white"/>"#
        ),
        w = PANEL_W,
        h = height
    );
    if panels.is_empty() {
        svg.push_str(r#"<text x="20" y="40" font-size="13">nothing to chart</text>"#);
    }
    for p in panels {
        svg.push_str(&p.svg);
    }
    svg.push_str("</svg>\n");
    svg
}
