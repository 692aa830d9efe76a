//! `prefault windows`: cut each minute of a waveform recording down to
//! its continuous and transient windows and index the choices.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use prefault_core::io::{
    load_json, read_waveform_csv, save_json, write_waveform_csv, WaveformManifest,
    WindowIndexEntry, WindowStreamWriter,
};
use prefault_core::signal::WindowKind;
use prefault_core::window_select::{cut_window, select_minute_windows, MinuteWindows};
use prefault_core::Result as CoreResult;

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct WindowsArgs {
    /// Waveform CSV covering at least one full minute.
    #[arg(long)]
    pub input: PathBuf,
    /// Waveform manifest JSON for the input.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: WindowsArgs, mut config: RunConfig) -> Result<()> {
    let dir = config::out_dir(&mut config, args.out)?;
    let wave_manifest: WaveformManifest =
        load_json(&args.manifest).map_err(|e| Failure::at(&args.manifest, e))?;
    let wave =
        read_waveform_csv(&args.input, &wave_manifest).map_err(|e| Failure::at(&args.input, e))?;

    let minute_len = (wave.sample_rate_hz() * 60.0).round() as usize;
    let n_minutes = wave.len() / minute_len;
    if n_minutes == 0 {
        return Err(Failure::Data(format!(
            "{}: {} samples is shorter than one minute ({minute_len})",
            args.input.display(),
            wave.len()
        )));
    }

    let selected: Vec<MinuteWindows<f64>> = (0..n_minutes)
        .into_par_iter()
        .map(|m| {
            let minute = cut_window(&wave, m * minute_len, minute_len)?;
            select_minute_windows(&minute)
        })
        .collect::<CoreResult<_>>()?;

    let stream_path = dir.join("selected.csv");
    let mut stream =
        WindowStreamWriter::create(&stream_path).map_err(|e| Failure::at(&stream_path, e))?;
    let mut index = Vec::with_capacity(n_minutes);
    let mut run_manifest = RunManifest::new("windows", &config);
    run_manifest.input(&args.input)?;
    run_manifest.input(&args.manifest)?;

    for (m, minute) in selected.iter().enumerate() {
        let cont_file = format!("minute_{m:05}_continuous.csv");
        let trans_file = format!("minute_{m:05}_transient.csv");
        let cont_path = dir.join(&cont_file);
        let trans_path = dir.join(&trans_file);
        write_waveform_csv(&cont_path, &minute.continuous_window)
            .map_err(|e| Failure::at(&cont_path, e))?;
        write_waveform_csv(&trans_path, &minute.transient_window)
            .map_err(|e| Failure::at(&trans_path, e))?;
        stream
            .write(&minute.continuous_window, WindowKind::Continuous)
            .and_then(|()| stream.write(&minute.transient_window, WindowKind::Transient))
            .map_err(|e| Failure::at(&stream_path, e))?;

        let minute_start = wave.start_time.map(|t| t + chrono::Duration::seconds(60 * m as i64));
        index.push(WindowIndexEntry {
            minute_iso8601: minute_start
                .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            continuous: minute.continuous,
            transient: minute.transient,
            continuous_file: cont_file,
            transient_file: trans_file,
        });
        run_manifest.output(&cont_path)?;
        run_manifest.output(&trans_path)?;
    }
    stream.finish().map_err(|e| Failure::at(&stream_path, e))?;

    let index_path = dir.join("windows_index.json");
    save_json(&index_path, &index).map_err(|e| Failure::at(&index_path, e))?;
    run_manifest.output(&index_path)?;
    run_manifest.output(&stream_path)?;
    run_manifest.save(&dir)?;

    let quiet = selected.iter().filter(|m| m.is_quiet()).count();
    println!(
        "{n_minutes} minutes -> {} windows ({quiet} quiet) -> {}",
        2 * n_minutes,
        dir.display()
    );
    Ok(())
}
