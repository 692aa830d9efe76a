//! `prefault eval` and `prefault sweep`: event-level scoring of
//! prediction timelines against fault logs, and the horizon sweep.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Duration;
use clap::Args;

use prefault_core::fp::{
    combine_reports, evaluate, horizon_sweep, standardize_per_station, EvalParams, EvalReport,
};
use prefault_core::io::{
    read_fault_log_csv, read_predictions_csv, save_json, ReportJson, ReportMetrics,
};
use prefault_core::learn::ForestParams;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct EvalArgs {
    /// Prediction CSVs, each `station=path`; a bare path is matched to
    /// the fault log's single station.
    #[arg(long, num_args = 1.., required = true)]
    pub preds: Vec<String>,
    /// Fault log CSV.
    #[arg(long)]
    pub faults: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Hourly aggregate CSV of the training period.
    #[arg(long)]
    pub train_hourly: PathBuf,
    /// Fault log CSV of the training period.
    #[arg(long)]
    pub train_faults: PathBuf,
    /// Hourly aggregate CSV of the test period.
    #[arg(long)]
    pub test_hourly: PathBuf,
    /// Fault log CSV of the test period.
    #[arg(long)]
    pub test_faults: PathBuf,
    /// Horizons to score, hours, comma-separated.
    #[arg(long, default_value = "24,48,96,168")]
    pub horizons: String,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rebuild the dense smoothed series of one prediction CSV.
fn smoothed_series(
    path: &Path,
) -> Result<(chrono::DateTime<chrono::Utc>, Vec<Option<f64>>)> {
    let rows = read_predictions_csv(path).map_err(|e| Failure::at(path, e))?;
    let first = rows.first().ok_or_else(|| Failure::at(path, "no rows"))?.hour;
    let last = rows.last().expect("nonempty").hour;
    if last < first {
        return Err(Failure::at(path, "hours out of order"));
    }
    let mut series = vec![None; (last - first).num_hours() as usize + 1];
    for row in &rows {
        let at = (row.hour - first).num_hours();
        if at < 0 || row.hour != first + Duration::hours(at) {
            return Err(Failure::at(path, format!("hour {} off the hourly grid", row.hour)));
        }
        series[at as usize] = row.smoothed;
    }
    Ok((first, series))
}

pub fn eval(args: EvalArgs, mut config: RunConfig) -> Result<()> {
    let dir = config::out_dir(&mut config, args.out)?;
    let log = read_fault_log_csv(&args.faults).map_err(|e| Failure::at(&args.faults, e))?;
    let mut by_station: BTreeMap<String, Vec<chrono::DateTime<chrono::Utc>>> = BTreeMap::new();
    for (station, t) in &log {
        by_station.entry(station.clone()).or_default().push(*t);
    }

    let mut manifest = RunManifest::new("eval", &config);
    manifest.input(&args.faults)?;

    let params = EvalParams::default();
    let mut reports: Vec<EvalReport> = Vec::new();
    let mut per_station: BTreeMap<String, ReportMetrics> = BTreeMap::new();
    for spec in &args.preds {
        let (station, path) = match spec.split_once('=') {
            Some((name, p)) => (name.to_string(), PathBuf::from(p)),
            None => {
                let name = match by_station.len() {
                    0 => "station-1".to_string(),
                    1 => by_station.keys().next().expect("len 1").clone(),
                    _ => {
                        return Err(Failure::Usage(format!(
                            "{spec}: name the station as station=path; the log has {}",
                            by_station.len()
                        )))
                    }
                };
                (name, PathBuf::from(spec))
            }
        };
        let (start, series) = smoothed_series(&path)?;
        let faults = by_station.get(&station).cloned().unwrap_or_default();
        let report = evaluate(start, &series, &faults, &params)?;
        per_station.insert(station, ReportMetrics::from_report(&report));
        reports.push(report);
        manifest.input(&path)?;
    }

    let combined = combine_reports(&reports);
    let report_json =
        ReportJson { combined: ReportMetrics::from_report(&combined), per_station };
    let report_path = dir.join("report.json");
    save_json(&report_path, &report_json).map_err(|e| Failure::at(&report_path, e))?;
    manifest.output(&report_path)?;
    manifest.save(&dir)?;

    let lead = report_json
        .combined
        .lead_mean_h
        .map(|h| format!("{h:.1} h mean lead"))
        .unwrap_or_else(|| "no lead times".into());
    println!(
        "F1 {:.4} (precision {:.4}, recall {:.4}, {} FP events, {lead}) -> {}",
        combined.f1,
        combined.precision,
        combined.recall,
        combined.false_positive_events.len(),
        report_path.display()
    );
    Ok(())
}

pub fn sweep(args: SweepArgs, mut config: RunConfig) -> Result<()> {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let horizons: Vec<i64> = args
        .horizons
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| Failure::Usage(format!("--horizons: {e}"))))
        .collect::<Result<_>>()?;
    if horizons.is_empty() || horizons.iter().any(|&h| h < 1) {
        return Err(Failure::Usage("--horizons needs positive hour counts".into()));
    }
    let dir = config::out_dir(&mut config, args.out)?;

    let (train_cols, mut train_rows, train_manifest) =
        super::train::load_hourly(&args.train_hourly)?;
    let (test_cols, mut test_rows, test_manifest) = super::train::load_hourly(&args.test_hourly)?;
    if train_manifest.registry_hash != test_manifest.registry_hash || train_cols != test_cols {
        return Err(Failure::Data(
            "train and test hourly matrices come from different extractions".into(),
        ));
    }
    let train_log =
        read_fault_log_csv(&args.train_faults).map_err(|e| Failure::at(&args.train_faults, e))?;
    let test_log =
        read_fault_log_csv(&args.test_faults).map_err(|e| Failure::at(&args.test_faults, e))?;
    let train_faults: Vec<_> = train_log.iter().map(|&(_, t)| t).collect();
    let test_faults: Vec<_> = test_log.iter().map(|&(_, t)| t).collect();

    let cutoff =
        train_rows.last().map(|r| r.hour + Duration::hours(1)).expect("reader rejects empty");
    let stats = standardize_per_station(&mut train_rows, cutoff)?;
    super::train::apply_stats(&mut test_rows, &stats)?;

    let params = ForestParams { seed: config.seed, ..ForestParams::default() };
    let scores = horizon_sweep(
        &train_rows,
        &test_rows,
        &train_faults,
        &test_faults,
        &horizons,
        params,
        &EvalParams::default(),
    )?;

    let sweep_path = dir.join("sweep.csv");
    let mut w = std::io::BufWriter::new(
        std::fs::File::create(&sweep_path).map_err(|e| Failure::at(&sweep_path, e))?,
    );
    writeln!(w, "horizon_h,f1").map_err(|e| Failure::at(&sweep_path, e))?;
    for (h, f1) in &scores {
        writeln!(w, "{h},{f1}").map_err(|e| Failure::at(&sweep_path, e))?;
    }
    w.flush().map_err(|e| Failure::at(&sweep_path, e))?;

    let mut manifest = RunManifest::new("sweep", &config);
    manifest.input(&args.train_hourly)?;
    manifest.input(&args.train_faults)?;
    manifest.input(&args.test_hourly)?;
    manifest.input(&args.test_faults)?;
    manifest.output(&sweep_path)?;
    manifest.save(&dir)?;

    let summary: Vec<String> =
        scores.iter().map(|(h, f1)| format!("{h}h={f1:.3}")).collect();
    println!("F1 by horizon: {} -> {}", summary.join(" "), sweep_path.display());
    Ok(())
}
