//! `prefault synth`: generate the surrogate event corpus or a
//! continuous fault-prediction recording, deterministically in the seed.

use std::path::PathBuf;

use chrono::{DateTime, Utc};
use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use prefault_core::io::{
    save_json, write_fault_log_csv, write_labels_csv, SynthManifest, WindowStreamWriter,
};
use prefault_core::signal::WindowKind;
use prefault_core::synth::{
    materialize_fp_window, plan_fp_recording, surrogate_window, SlotKind, N_EVENT_CLASSES,
};
use prefault_core::Result as CoreResult;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Subcommand)]
pub enum SynthWhat {
    /// Balanced 34-class event corpus, one window-stream shard per class.
    Events(EventsArgs),
    /// Multi-day recording with planted faults, precursors, and switching.
    Recording(RecordingArgs),
}

#[derive(Args)]
pub struct EventsArgs {
    /// Windows generated per class.
    #[arg(long)]
    pub per_class: usize,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RecordingArgs {
    /// Recording length in days.
    #[arg(long)]
    pub days: usize,
    /// Faults planted in the recording, at least 48 h apart.
    #[arg(long)]
    pub faults: usize,
    /// Station name written into the fault log.
    #[arg(long, default_value = "station-1")]
    pub station: String,
    /// Recording start (RFC 3339).
    #[arg(long, default_value = "2024-03-01T00:00:00Z")]
    pub start: String,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sidecar manifest of a generated recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingManifest {
    pub seed: u64,
    pub days: usize,
    pub n_faults: usize,
    pub station: String,
    pub start_iso8601: String,
    pub cadence_per_hour: u32,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub n_windows: usize,
}

pub fn run(what: SynthWhat, config: RunConfig) -> Result<()> {
    match what {
        SynthWhat::Events(args) => events(args, config),
        SynthWhat::Recording(args) => recording(args, config),
    }
}

fn events(args: EventsArgs, mut config: RunConfig) -> Result<()> {
    if args.per_class < 1 {
        return Err(Failure::Usage("--per-class must be at least 1".into()));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let dir = config::out_dir(&mut config, args.out)?;
    let spec = config.window_spec();
    let per_class = args.per_class;

    let mut manifest = RunManifest::new("synth-events", &config);
    let mut labels = Vec::with_capacity(N_EVENT_CLASSES * per_class);
    for class in 0..N_EVENT_CLASSES {
        let windows: Vec<_> = (0..per_class)
            .into_par_iter()
            .map(|j| surrogate_window(&spec, per_class, config.seed, class * per_class + j))
            .collect::<CoreResult<_>>()?;
        let path = dir.join(format!("windows_class_{class:02}.csv"));
        let mut w = WindowStreamWriter::create(&path).map_err(|e| Failure::at(&path, e))?;
        for (window, label) in &windows {
            w.write(window, WindowKind::Synthetic).map_err(|e| Failure::at(&path, e))?;
            labels.push(*label);
        }
        w.finish().map_err(|e| Failure::at(&path, e))?;
        manifest.output(&path)?;
    }

    let labels_path = dir.join("labels.csv");
    write_labels_csv(&labels_path, &labels).map_err(|e| Failure::at(&labels_path, e))?;
    manifest.output(&labels_path)?;

    let synth_manifest = SynthManifest {
        seed: config.seed,
        per_class,
        sample_rate_hz: spec.sample_rate_hz,
        fundamental_hz: spec.fundamental_hz,
        n_classes: N_EVENT_CLASSES,
        n_windows: labels.len(),
    };
    let sm_path = dir.join("synth.manifest.json");
    save_json(&sm_path, &synth_manifest).map_err(|e| Failure::at(&sm_path, e))?;
    manifest.output(&sm_path)?;
    manifest.save(&dir)?;

    println!(
        "{} windows in {} shards -> {}",
        labels.len(),
        N_EVENT_CLASSES,
        dir.display()
    );
    Ok(())
}

fn recording(args: RecordingArgs, mut config: RunConfig) -> Result<()> {
    let start: DateTime<Utc> = DateTime::parse_from_rfc3339(&args.start)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Failure::Usage(format!("--start {:?}: {e}", args.start)))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let dir = config::out_dir(&mut config, args.out)?;
    let spec = config.window_spec();

    // Plan errors are argument errors: the plan depends on nothing but
    // the flags.
    let plan = plan_fp_recording(&spec, args.days, args.faults, config.seed, start)
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let rec_path = dir.join("recording.csv");
    let mut writer = WindowStreamWriter::create(&rec_path).map_err(|e| Failure::at(&rec_path, e))?;
    let chunk = (24 * config.cadence_per_hour as usize).max(1);
    for chunk_start in (0..plan.slots.len()).step_by(chunk) {
        let end = (chunk_start + chunk).min(plan.slots.len());
        let windows: Vec<_> = (chunk_start..end)
            .into_par_iter()
            .map(|i| {
                let window = materialize_fp_window(&plan, i)?;
                let kind = match plan.slots[i].kind {
                    SlotKind::Quiet => WindowKind::Continuous,
                    _ => WindowKind::Transient,
                };
                Ok((window, kind))
            })
            .collect::<CoreResult<_>>()?;
        for (window, kind) in &windows {
            writer.write(window, *kind).map_err(|e| Failure::at(&rec_path, e))?;
        }
    }
    writer.finish().map_err(|e| Failure::at(&rec_path, e))?;

    let faults_path = dir.join("faults.csv");
    let rows: Vec<(String, DateTime<Utc>)> =
        plan.fault_times.iter().map(|&t| (args.station.clone(), t)).collect();
    write_fault_log_csv(&faults_path, &rows).map_err(|e| Failure::at(&faults_path, e))?;

    let rec_manifest = RecordingManifest {
        seed: config.seed,
        days: args.days,
        n_faults: args.faults,
        station: args.station.clone(),
        start_iso8601: args.start.clone(),
        cadence_per_hour: plan.cadence_per_hour,
        sample_rate_hz: spec.sample_rate_hz,
        fundamental_hz: spec.fundamental_hz,
        n_windows: plan.slots.len(),
    };
    let rm_path = dir.join("recording.manifest.json");
    save_json(&rm_path, &rec_manifest).map_err(|e| Failure::at(&rm_path, e))?;

    let mut manifest = RunManifest::new("synth-recording", &config);
    manifest.output(&rec_path)?;
    manifest.output(&faults_path)?;
    manifest.output(&rm_path)?;
    manifest.save(&dir)?;

    println!(
        "{} windows over {} days, {} faults -> {}",
        plan.slots.len(),
        args.days,
        plan.fault_times.len(),
        dir.display()
    );
    Ok(())
}
