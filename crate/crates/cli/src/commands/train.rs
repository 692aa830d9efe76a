//! `prefault train` and `prefault predict`: the fault-prediction model
//! over hourly aggregates. The model file carries the forest together
//! with the scaling statistics and the exact column list, so prediction
//! refuses inputs from a different extraction.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use clap::Args;
use serde::{Deserialize, Serialize};

use prefault_core::fp::{
    label_with_horizon, moving_average, probability_timeline, standardize_per_station,
    usable_matrix, ColumnStats, EvalParams, HourlyRow,
};
use prefault_core::io::{
    load_json, read_fault_log_csv, read_hourly_csv, save_json, write_predictions_csv,
    HourlyManifest, PredictionRow,
};
use prefault_core::learn::{Dataset, ForestModel, ForestParams};

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct TrainArgs {
    /// Hourly aggregate CSV of the training period.
    #[arg(long)]
    pub hourly: PathBuf,
    /// Fault log CSV of the training period.
    #[arg(long)]
    pub faults: PathBuf,
    /// Only faults of this station count; default is every logged fault.
    #[arg(long)]
    pub station: Option<String>,
    /// Override the configured label horizon, hours.
    #[arg(long)]
    pub horizon: Option<i64>,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Trained model JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Hourly aggregate CSV of the period to score.
    #[arg(long)]
    pub hourly: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A trained fault-prediction model with everything prediction needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpModel {
    pub forest: ForestModel<f64>,
    /// Training-period scaling, applied verbatim at prediction time.
    pub stats: ColumnStats<f64>,
    /// Hourly column names the model was fit on, in order.
    pub columns: Vec<String>,
    pub registry_hash: String,
    pub horizon_hours: i64,
    pub station: String,
}

/// Read an hourly CSV plus its sidecar manifest.
pub fn load_hourly(path: &Path) -> Result<(Vec<String>, Vec<HourlyRow<f64>>, HourlyManifest)> {
    let (columns, rows) = read_hourly_csv(path).map_err(|e| Failure::at(path, e))?;
    let sc = super::select::sidecar(path);
    let manifest: HourlyManifest = load_json(&sc).map_err(|e| Failure::at(&sc, e))?;
    Ok((columns, rows, manifest))
}

/// Z-score rows with training statistics; constant columns map to 0.
pub fn apply_stats(rows: &mut [HourlyRow<f64>], stats: &ColumnStats<f64>) -> Result<()> {
    for row in rows.iter_mut() {
        if row.values.len() != stats.mean.len() {
            return Err(Failure::Data(format!(
                "{} hourly columns under {}-column statistics",
                row.values.len(),
                stats.mean.len()
            )));
        }
        for (f, v) in row.values.iter_mut().enumerate() {
            *v = if stats.std[f] == 0.0 { 0.0 } else { (*v - stats.mean[f]) / stats.std[f] };
        }
    }
    Ok(())
}

/// Fault times filtered to one station, or every fault when unnamed.
/// Returns the times plus the station name recorded in the model.
pub fn station_faults(
    log: &[(String, DateTime<Utc>)],
    station: Option<&str>,
) -> (Vec<DateTime<Utc>>, String) {
    match station {
        Some(name) => (
            log.iter().filter(|(s, _)| s == name).map(|&(_, t)| t).collect(),
            name.to_string(),
        ),
        None => {
            let mut names: Vec<&str> = log.iter().map(|(s, _)| s.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            let name = match names.as_slice() {
                [only] => (*only).to_string(),
                [] => "station-1".to_string(),
                _ => "all".to_string(),
            };
            (log.iter().map(|&(_, t)| t).collect(), name)
        }
    }
}

pub fn train(args: TrainArgs, mut config: RunConfig) -> Result<()> {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(h) = args.horizon {
        if h < 1 {
            return Err(Failure::Usage("--horizon must be at least 1 hour".into()));
        }
        config.horizon_hours = h;
    }
    let dir = config::out_dir(&mut config, args.out)?;

    let (columns, mut rows, hourly_manifest) = load_hourly(&args.hourly)?;
    let log = read_fault_log_csv(&args.faults).map_err(|e| Failure::at(&args.faults, e))?;
    let (faults, station) = station_faults(&log, args.station.as_deref());

    let cutoff = rows.last().map(|r| r.hour + Duration::hours(1)).expect("reader rejects empty");
    let stats = standardize_per_station(&mut rows, cutoff)?;
    let labels = label_with_horizon(&rows, &faults, config.horizon_hours);
    let (x, usable) = usable_matrix(&rows)?;
    let y: Vec<usize> = usable.iter().map(|&i| labels[i]).collect();
    let positives = y.iter().sum::<usize>();
    let data = Dataset::new(x, y, 2)?;

    let params = ForestParams { seed: config.seed, ..ForestParams::default() };
    let mut forest = prefault_core::learn::train_forest(&data, params)?;
    forest.registry_hash = Some(hourly_manifest.registry_hash.clone());

    let model = FpModel {
        forest,
        stats,
        columns,
        registry_hash: hourly_manifest.registry_hash,
        horizon_hours: config.horizon_hours,
        station,
    };
    let model_path = dir.join("model.json");
    save_json(&model_path, &model).map_err(|e| Failure::at(&model_path, e))?;

    let mut manifest = RunManifest::new("train", &config);
    manifest.input(&args.hourly)?;
    manifest.input(&super::select::sidecar(&args.hourly))?;
    manifest.input(&args.faults)?;
    manifest.output(&model_path)?;
    manifest.save(&dir)?;

    println!(
        "trained on {} usable hours ({positives} positive) -> {}",
        data.n(),
        model_path.display()
    );
    Ok(())
}

pub fn predict(args: PredictArgs, mut config: RunConfig) -> Result<()> {
    let dir = config::out_dir(&mut config, args.out)?;
    let model: FpModel = load_json(&args.model).map_err(|e| Failure::at(&args.model, e))?;
    let (columns, mut rows, hourly_manifest) = load_hourly(&args.hourly)?;

    if hourly_manifest.registry_hash != model.registry_hash {
        return Err(Failure::Data(format!(
            "registry hash mismatch: model {}, input {}",
            model.registry_hash, hourly_manifest.registry_hash
        )));
    }
    if columns != model.columns {
        return Err(Failure::Data(format!(
            "{}: hourly columns differ from the model's training columns",
            args.hourly.display()
        )));
    }

    apply_stats(&mut rows, &model.stats)?;
    let (x, _) = usable_matrix(&rows)?;
    let probs: Vec<f64> =
        model.forest.predict_proba(&x)?.into_iter().map(|row| row[1]).collect();
    let (start, timeline) = probability_timeline(&rows, &probs)?;
    let smoothed = moving_average(&timeline, 5);
    let threshold = EvalParams::default().threshold;

    let out_rows: Vec<PredictionRow> = (0..timeline.len())
        .map(|i| PredictionRow {
            hour: start + Duration::hours(i as i64),
            probability: timeline[i],
            smoothed: smoothed[i],
            decision: smoothed[i].map(|s| s >= threshold),
        })
        .collect();
    let preds_path = dir.join("predictions.csv");
    write_predictions_csv(&preds_path, &out_rows).map_err(|e| Failure::at(&preds_path, e))?;

    let mut manifest = RunManifest::new("predict", &config);
    manifest.input(&args.model)?;
    manifest.input(&args.hourly)?;
    manifest.input(&super::select::sidecar(&args.hourly))?;
    manifest.output(&preds_path)?;
    manifest.save(&dir)?;

    let alarms = out_rows.iter().filter(|r| r.decision == Some(true)).count();
    println!(
        "{} hours scored, {alarms} above threshold -> {}",
        out_rows.len(),
        preds_path.display()
    );
    Ok(())
}
