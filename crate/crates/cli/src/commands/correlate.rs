//! `prefault correlate`: score random feature subsets on the surrogate
//! classification task and on a fault-prediction task built from a
//! recording's window features, then correlate the two score columns.

use std::path::PathBuf;

use clap::Args;

use prefault_core::io::{read_fault_log_csv, read_feature_csv, save_json, FeatureManifest};
use prefault_core::learn::Dataset;
use prefault_core::select::correlation_study;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct CorrelateArgs {
    /// Surrogate-task feature matrix CSV.
    #[arg(long)]
    pub surrogate_features: PathBuf,
    /// Surrogate-task label CSV.
    #[arg(long)]
    pub surrogate_labels: PathBuf,
    /// Window-level feature matrix CSV of a recording (timestamped).
    #[arg(long)]
    pub fp_features: PathBuf,
    /// Fault log CSV of that recording.
    #[arg(long)]
    pub fp_faults: PathBuf,
    /// Override the configured label horizon, hours.
    #[arg(long)]
    pub horizon: Option<i64>,
    /// Override the configured subset count.
    #[arg(long)]
    pub subsets: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: CorrelateArgs, mut config: RunConfig) -> Result<()> {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(h) = args.horizon {
        if h < 1 {
            return Err(Failure::Usage("--horizon must be at least 1 hour".into()));
        }
        config.horizon_hours = h;
    }
    if let Some(n) = args.subsets {
        config.subset_study_count = n;
    }
    let dir = config::out_dir(&mut config, args.out)?;

    let (surrogate, sur_hash, sur_ids) =
        super::select::load_labeled_matrix(&args.surrogate_features, &args.surrogate_labels)?;

    // The FP side: window rows labeled by horizon proximity to a fault.
    let fp_table =
        read_feature_csv(&args.fp_features).map_err(|e| Failure::at(&args.fp_features, e))?;
    let fp_sidecar = super::select::sidecar(&args.fp_features);
    let fp_manifest: FeatureManifest =
        prefault_core::io::load_json(&fp_sidecar).map_err(|e| Failure::at(&fp_sidecar, e))?;
    if fp_manifest.registry_hash != sur_hash {
        return Err(Failure::Data(
            "surrogate and fault-prediction matrices come from different registries".into(),
        ));
    }
    let fp_ids = fp_manifest.selected.unwrap_or_else(|| (0..fp_table.x.cols()).collect());
    if fp_ids != sur_ids {
        return Err(Failure::Data(
            "surrogate and fault-prediction matrices carry different feature masks".into(),
        ));
    }

    let log = read_fault_log_csv(&args.fp_faults).map_err(|e| Failure::at(&args.fp_faults, e))?;
    let faults: Vec<_> = log.iter().map(|&(_, t)| t).collect();
    let horizon = chrono::Duration::hours(config.horizon_hours);
    let mut y = Vec::with_capacity(fp_table.stamps.len());
    let mut last = None;
    for (stamp, _) in &fp_table.stamps {
        let t = stamp.ok_or_else(|| {
            Failure::at(&args.fp_features, "rows must be timestamped for the FP task")
        })?;
        if last.is_some_and(|prev| t < prev) {
            return Err(Failure::at(&args.fp_features, "rows must be in time order"));
        }
        last = Some(t);
        y.push(usize::from(faults.iter().any(|&f| t < f && f <= t + horizon)));
    }
    let fp = Dataset::new(fp_table.x, y, 2)?;

    let study = correlation_study(&surrogate, &fp, config.subset_study_count, config.seed)?;
    let study_path = dir.join("study.json");
    save_json(&study_path, &study).map_err(|e| Failure::at(&study_path, e))?;

    let mut manifest = RunManifest::new("correlate", &config);
    manifest.input(&args.surrogate_features)?;
    manifest.input(&args.surrogate_labels)?;
    manifest.input(&args.fp_features)?;
    manifest.input(&args.fp_faults)?;
    manifest.output(&study_path)?;
    manifest.save(&dir)?;

    println!(
        "r = {:.4} (p = {:.2e}) over {} subsets -> {}",
        study.r,
        study.p,
        study.subsets.len(),
        study_path.display()
    );
    Ok(())
}
