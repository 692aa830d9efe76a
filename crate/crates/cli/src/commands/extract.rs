//! `prefault extract`: run the feature bank over window streams, with
//! optional masking to a selected feature set and optional hourly
//! aggregation for the fault-prediction timeline.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use prefault_core::features::extract::{extract_window, FeatureVector};
use prefault_core::features::registry::build_registry;
use prefault_core::fp::hourly_aggregate;
use prefault_core::io::{
    load_json, read_window_stream_csv, save_json, write_feature_csv, write_hourly_csv,
    FeatureManifest, HourlyManifest, SelectedFeatures, EXTRACTION_VERSION,
};
use prefault_core::Result as CoreResult;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct ExtractArgs {
    /// Window-stream CSVs, in row order; a directory stands for its
    /// `windows_*.csv` shards sorted by name.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Selected-feature JSON; columns are masked to these registry ids.
    #[arg(long)]
    pub selected: Option<PathBuf>,
    /// Aggregate the rows per wall-clock hour (requires timestamps).
    #[arg(long)]
    pub hourly: bool,
    /// Basename for the matrix and its sidecar manifest.
    #[arg(long)]
    pub prefix: Option<String>,
    /// Override the configured sample rate.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Override the configured fundamental frequency.
    #[arg(long)]
    pub fund: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A directory input stands for its sorted `windows_*.csv` shards.
fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut shards: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| Failure::at(input, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("windows_") && n.ends_with(".csv"))
                })
                .collect();
            if shards.is_empty() {
                return Err(Failure::Data(format!(
                    "{}: no windows_*.csv shards",
                    input.display()
                )));
            }
            shards.sort();
            files.extend(shards);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

/// Load and validate a selected-feature mask against the registry.
pub fn load_mask(
    path: &Path,
    registry: &prefault_core::features::registry::FeatureRegistry,
) -> Result<Vec<usize>> {
    let selected: SelectedFeatures = load_json(path).map_err(|e| Failure::at(path, e))?;
    registry.check_hash(&selected.registry_hash).map_err(|e| Failure::at(path, e))?;
    let mut ids = selected.ids;
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(Failure::at(path, "empty feature set"));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= registry.len()) {
        return Err(Failure::at(path, format!("feature id {bad} outside the registry")));
    }
    Ok(ids)
}

pub fn run(args: ExtractArgs, mut config: RunConfig) -> Result<()> {
    if let Some(rate) = args.rate {
        config.sample_rate_hz = rate;
    }
    if let Some(fund) = args.fund {
        config.fundamental_hz = fund;
    }
    let dir = config::out_dir(&mut config, args.out)?;
    let files = expand_inputs(&args.input)?;
    let registry = build_registry();
    let mask = args.selected.as_deref().map(|p| load_mask(p, &registry)).transpose()?;

    let names: Vec<String> = match &mask {
        Some(ids) => {
            let all = registry.names();
            ids.iter().map(|&i| all[i].clone()).collect()
        }
        None => registry.names(),
    };

    let mut run_manifest =
        RunManifest::new(if args.hourly { "extract-hourly" } else { "extract" }, &config);
    if let Some(p) = &args.selected {
        run_manifest.input(p)?;
    }

    // One file at a time: a stream's windows dominate memory, so they
    // are dropped before the next file loads.
    let mut rows: Vec<FeatureVector<f64>> = Vec::new();
    for file in &files {
        let windows =
            read_window_stream_csv(file, config.sample_rate_hz, config.fundamental_hz)
                .map_err(|e| Failure::at(file, e))?;
        let extracted: Vec<FeatureVector<f64>> = windows
            .par_iter()
            .map(|(window, kind)| {
                let mut fv = extract_window(window, *kind, &registry)?;
                if let Some(ids) = &mask {
                    fv.values = ids.iter().map(|&i| fv.values[i]).collect();
                }
                Ok(fv)
            })
            .collect::<CoreResult<_>>()?;
        rows.extend(extracted);
        run_manifest.input(file)?;
    }

    if args.hourly {
        let prefix = args.prefix.as_deref().unwrap_or("hourly");
        let hourly_rows = hourly_aggregate(&rows, config.cadence_per_hour as usize)?;
        let csv_path = dir.join(format!("{prefix}.csv"));
        write_hourly_csv(&csv_path, &names, &hourly_rows).map_err(|e| Failure::at(&csv_path, e))?;
        let manifest = HourlyManifest {
            registry_hash: registry.hash().to_string(),
            sample_rate_hz: config.sample_rate_hz,
            fundamental_hz: config.fundamental_hz,
            extraction_version: EXTRACTION_VERSION.to_string(),
            selected: mask,
            cadence_per_hour: config.cadence_per_hour,
            rows: hourly_rows.len(),
        };
        let m_path = dir.join(format!("{prefix}.manifest.json"));
        save_json(&m_path, &manifest).map_err(|e| Failure::at(&m_path, e))?;
        run_manifest.output(&csv_path)?;
        run_manifest.output(&m_path)?;
        run_manifest.save(&dir)?;
        println!(
            "{} windows -> {} hours x {} columns -> {}",
            rows.len(),
            hourly_rows.len(),
            4 * names.len(),
            csv_path.display()
        );
    } else {
        let prefix = args.prefix.as_deref().unwrap_or("features");
        let csv_path = dir.join(format!("{prefix}.csv"));
        write_feature_csv(&csv_path, &names, &rows).map_err(|e| Failure::at(&csv_path, e))?;
        let manifest = FeatureManifest {
            registry_hash: registry.hash().to_string(),
            sample_rate_hz: config.sample_rate_hz,
            fundamental_hz: config.fundamental_hz,
            extraction_version: EXTRACTION_VERSION.to_string(),
            rows: rows.len(),
            selected: mask,
        };
        let m_path = dir.join(format!("{prefix}.manifest.json"));
        save_json(&m_path, &manifest).map_err(|e| Failure::at(&m_path, e))?;
        run_manifest.output(&csv_path)?;
        run_manifest.output(&m_path)?;
        run_manifest.save(&dir)?;
        println!("{} x {} -> {}", rows.len(), names.len(), csv_path.display());
    }
    Ok(())
}
