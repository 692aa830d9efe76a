//! `prefault select`: recursive feature elimination with cross-validated
//! scoring over a feature matrix, producing the trace and the chosen set.

use std::path::{Path, PathBuf};

use clap::Args;

use prefault_core::io::{
    load_json, read_feature_csv, save_json, write_rfe_trace_csv, FeatureManifest,
    SelectedFeatures,
};
use prefault_core::learn::{Dataset, FoldKind, FoldPlan, ForestParams};
use prefault_core::select::{rfe_cv_with, RfeSchedule};

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct SelectArgs {
    /// Feature matrix CSV (its sidecar manifest must sit next to it).
    #[arg(long)]
    pub features: PathBuf,
    /// Label CSV aligned with the matrix rows.
    #[arg(long)]
    pub labels: PathBuf,
    /// Features eliminated per round.
    #[arg(long)]
    pub step: Option<usize>,
    /// Halve the surviving set each round down to a floor, then step by 1.
    #[arg(long)]
    pub accelerated: bool,
    /// Floor for the accelerated schedule.
    #[arg(long, default_value_t = 64)]
    pub floor: usize,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sidecar manifest path of a matrix CSV: same stem, `.manifest.json`.
pub fn sidecar(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Read a matrix CSV with its sidecar, returning the labeled dataset,
/// the registry hash, and the column-to-registry-id mapping.
pub fn load_labeled_matrix(
    features: &Path,
    labels: &Path,
) -> Result<(Dataset<f64>, String, Vec<usize>)> {
    let table = read_feature_csv(features).map_err(|e| Failure::at(features, e))?;
    let sc = sidecar(features);
    let manifest: FeatureManifest = load_json(&sc).map_err(|e| Failure::at(&sc, e))?;
    let y = prefault_core::io::read_labels_csv(labels).map_err(|e| Failure::at(labels, e))?;
    if y.len() != table.x.rows() {
        return Err(Failure::Data(format!(
            "{} labels for {} matrix rows",
            y.len(),
            table.x.rows()
        )));
    }
    let n_classes = y.iter().max().map_or(0, |m| m + 1);
    let column_ids = match manifest.selected {
        Some(ids) => ids,
        None => (0..table.x.cols()).collect(),
    };
    if column_ids.len() != table.x.cols() {
        return Err(Failure::Data(format!(
            "{}: manifest lists {} selected ids for {} columns",
            features.display(),
            column_ids.len(),
            table.x.cols()
        )));
    }
    let data = Dataset::new(table.x, y, n_classes)?;
    Ok((data, manifest.registry_hash, column_ids))
}

pub fn run(args: SelectArgs, mut config: RunConfig) -> Result<()> {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(step) = args.step {
        if step == 0 {
            return Err(Failure::Usage("--step must be at least 1".into()));
        }
        config.rfe_step = step;
    }
    let dir = config::out_dir(&mut config, args.out)?;
    let (data, registry_hash, column_ids) = load_labeled_matrix(&args.features, &args.labels)?;

    let schedule = if args.accelerated {
        RfeSchedule::Accelerated { floor: args.floor.max(1) }
    } else {
        RfeSchedule::Fixed(config.rfe_step)
    };
    let plan = FoldPlan {
        kind: FoldKind::StratifiedKfold,
        n_splits: args.folds,
        shuffle: true,
        seed: config.seed,
    };
    let params = ForestParams { seed: config.seed, ..ForestParams::default() };
    let mut trace = rfe_cv_with(&data, schedule, &plan, params)?;

    // Matrix columns may themselves be a mask of the registry; publish
    // registry ids, not column positions.
    for it in &mut trace.iterations {
        for id in &mut it.removed {
            *id = column_ids[*id];
        }
    }
    let mut chosen: Vec<usize> = trace.chosen.iter().map(|&c| column_ids[c]).collect();
    chosen.sort_unstable();
    trace.chosen = chosen.clone();

    let trace_path = dir.join("trace.csv");
    write_rfe_trace_csv(&trace_path, &trace).map_err(|e| Failure::at(&trace_path, e))?;
    let selected = SelectedFeatures { ids: chosen, registry_hash };
    let selected_path = dir.join("selected.json");
    save_json(&selected_path, &selected).map_err(|e| Failure::at(&selected_path, e))?;

    let mut manifest = RunManifest::new("select", &config);
    manifest.input(&args.features)?;
    manifest.input(&sidecar(&args.features))?;
    manifest.input(&args.labels)?;
    manifest.output(&trace_path)?;
    manifest.output(&selected_path)?;
    manifest.save(&dir)?;

    println!(
        "chose {} of {} features at accuracy {:.4} -> {}",
        selected.ids.len(),
        data.d(),
        trace.chosen_accuracy,
        selected_path.display()
    );
    Ok(())
}
