//! File formats shared across the pipeline tools: waveform and
//! window-stream CSV, feature matrices with sidecar manifests, fault
//! logs, prediction timelines, selection traces, trained models, and
//! evaluation reports.
//!
//! Everything here is f64-concrete: files are an exchange format, and
//! f64 CSV cells round-trip losslessly through the shortest-float
//! encoding the writer emits. Manifests carry no wall-clock fields, so
//! re-running a command on identical inputs reproduces identical bytes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};
use crate::features::extract::FeatureVector;
use crate::fp::{EvalReport, HourlyRow};
use crate::learn::dataset::Matrix;
use crate::select::RfeTrace;
use crate::signal::{derive_zero_sequence, ChannelId, WaveformWindow, WindowKind, N_CHANNELS};
use crate::window_select::WindowScore;

/// Bumped when the extraction layout changes incompatibly.
pub const EXTRACTION_VERSION: &str = "1";

fn load_err(path: &Path, detail: impl Into<String>) -> CoreError {
    CoreError::Load { path: path.display().to_string(), detail: detail.into() }
}

fn rfc3339(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn parse_rfc3339(s: &str, path: &Path) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| load_err(path, format!("bad timestamp {s:?}: {e}")))
}

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

/// Lowercase hex SHA-256 of a byte slice.
pub fn sha256_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Lowercase hex SHA-256 of a file's contents.
pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let mut f = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

/// Write any serializable value as pretty JSON plus a trailing newline.
pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Read a JSON file into a deserializable value.
pub fn load_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let f = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(f)?)
}

// ---------------------------------------------------------------------------
// Waveform CSV
// ---------------------------------------------------------------------------

/// Sidecar manifest of a waveform CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformManifest {
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub station: String,
    pub start_time_iso8601: Option<String>,
    /// Recompute v0/i0 from the phase columns instead of trusting them.
    pub derive_zero_sequence: bool,
}

impl WaveformManifest {
    pub fn start_time(&self) -> Result<Option<DateTime<Utc>>> {
        match &self.start_time_iso8601 {
            None => Ok(None),
            Some(s) => DateTime::parse_from_rfc3339(s)
                .map(|t| Some(t.with_timezone(&Utc)))
                .map_err(|e| CoreError::InvalidParam(format!("bad start time {s:?}: {e}"))),
        }
    }
}

const WAVEFORM_HEADER: [&str; 9] = ["t", "va", "vb", "vc", "v0", "ia", "ib", "ic", "i0"];

/// Write one window as `t,va,vb,vc,v0,ia,ib,ic,i0` with t in seconds.
pub fn write_waveform_csv(path: impl AsRef<Path>, window: &WaveformWindow<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(WAVEFORM_HEADER)?;
    let dt = 1.0 / window.sample_rate_hz();
    for t in 0..window.len() {
        let mut rec = Vec::with_capacity(9);
        rec.push(format_f64(t as f64 * dt));
        for ch in ChannelId::all() {
            rec.push(format_f64(window.at(ch, t)));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a waveform CSV under its manifest. The header must match the
/// canonical column order exactly.
pub fn read_waveform_csv(
    path: impl AsRef<Path>,
    manifest: &WaveformManifest,
) -> Result<WaveformWindow<f64>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &WAVEFORM_HEADER, path)?;
    let mut ch: [Vec<f64>; N_CHANNELS] = std::array::from_fn(|_| Vec::new());
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 9 {
            return Err(load_err(path, format!("row has {} fields, expected 9", rec.len())));
        }
        for c in 0..N_CHANNELS {
            ch[c].push(parse_f64(&rec[c + 1], path)?);
        }
    }
    finish_window(ch, manifest, path)
}

fn finish_window(
    mut ch: [Vec<f64>; N_CHANNELS],
    manifest: &WaveformManifest,
    path: &Path,
) -> Result<WaveformWindow<f64>> {
    if manifest.derive_zero_sequence {
        ch[3] = derive_zero_sequence(&ch[0], &ch[1], &ch[2])?;
        ch[7] = derive_zero_sequence(&ch[4], &ch[5], &ch[6])?;
    }
    if ch[0].is_empty() {
        return Err(load_err(path, "no samples"));
    }
    WaveformWindow::from_channels(
        ch,
        manifest.sample_rate_hz,
        manifest.fundamental_hz,
        manifest.start_time()?,
    )
}

fn check_header(got: &csv::StringRecord, want: &[&str], path: &Path) -> Result<()> {
    let matches = got.len() == want.len() && got.iter().zip(want).all(|(g, w)| g == *w);
    if !matches {
        return Err(load_err(
            path,
            format!("header {:?}, expected {:?}", got.iter().collect::<Vec<_>>(), want),
        ));
    }
    Ok(())
}

fn format_f64(v: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(v).to_string()
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.parse::<f64>().map_err(|e| load_err(path, format!("bad number {s:?}: {e}")))
}

// ---------------------------------------------------------------------------
// Window streams
// ---------------------------------------------------------------------------

const STREAM_HEADER: [&str; 12] =
    ["window", "kind", "start_time", "t", "va", "vb", "vc", "v0", "ia", "ib", "ic", "i0"];

/// Incremental writer for the stacked window-stream format: every row
/// carries its window index, the window's kind, and its start time
/// (empty when unstamped). Windows are numbered in write order.
pub struct WindowStreamWriter {
    w: csv::Writer<BufWriter<File>>,
    next: usize,
}

impl WindowStreamWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<WindowStreamWriter> {
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
        w.write_record(STREAM_HEADER)?;
        Ok(WindowStreamWriter { w, next: 0 })
    }

    pub fn write(&mut self, window: &WaveformWindow<f64>, kind: WindowKind) -> Result<()> {
        let stamp = window.start_time.map(rfc3339).unwrap_or_default();
        let dt = 1.0 / window.sample_rate_hz();
        for t in 0..window.len() {
            let mut rec = Vec::with_capacity(12);
            rec.push(self.next.to_string());
            rec.push(kind.as_str().to_string());
            rec.push(stamp.clone());
            rec.push(format_f64(t as f64 * dt));
            for ch in ChannelId::all() {
                rec.push(format_f64(window.at(ch, t)));
            }
            self.w.write_record(&rec)?;
        }
        self.next += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// Write a run of windows stacked into one CSV in one call.
pub fn write_window_stream_csv(
    path: impl AsRef<Path>,
    windows: &[(WaveformWindow<f64>, WindowKind)],
) -> Result<()> {
    let mut w = WindowStreamWriter::create(path)?;
    for (window, kind) in windows {
        w.write(window, *kind)?;
    }
    w.finish()
}

/// Read a stacked window stream. Window indices must be consecutive
/// runs starting at 0; rates come from the caller's manifest.
pub fn read_window_stream_csv(
    path: impl AsRef<Path>,
    sample_rate_hz: f64,
    fundamental_hz: f64,
) -> Result<Vec<(WaveformWindow<f64>, WindowKind)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &STREAM_HEADER, path)?;
    type Partial = (usize, WindowKind, Option<DateTime<Utc>>, [Vec<f64>; N_CHANNELS]);
    let mut windows = Vec::new();
    let mut current: Option<Partial> = None;
    let finish = |(_, kind, stamp, ch): Partial, out: &mut Vec<_>| -> Result<()> {
        let w = WaveformWindow::from_channels(ch, sample_rate_hz, fundamental_hz, stamp)?;
        out.push((w, kind));
        Ok(())
    };
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 12 {
            return Err(load_err(path, format!("row has {} fields, expected 12", rec.len())));
        }
        let idx: usize =
            rec[0].parse().map_err(|e| load_err(path, format!("bad window index: {e}")))?;
        let kind = WindowKind::from_str(&rec[1])
            .ok_or_else(|| load_err(path, format!("bad window kind {:?}", &rec[1])))?;
        let stamp =
            if rec[2].is_empty() { None } else { Some(parse_rfc3339(&rec[2], path)?) };
        match &mut current {
            Some((ci, ckind, cstamp, ch)) if *ci == idx => {
                if *cstamp != stamp || *ckind != kind {
                    return Err(load_err(path, format!("window {idx} changes kind or stamp")));
                }
                for c in 0..N_CHANNELS {
                    ch[c].push(parse_f64(&rec[c + 4], path)?);
                }
            }
            _ => {
                if let Some(done) = current.take() {
                    if idx != done.0 + 1 {
                        return Err(load_err(path, format!("window {idx} follows {}", done.0)));
                    }
                    finish(done, &mut windows)?;
                } else if idx != 0 {
                    return Err(load_err(path, format!("stream starts at window {idx}")));
                }
                let mut ch: [Vec<f64>; N_CHANNELS] = std::array::from_fn(|_| Vec::new());
                for c in 0..N_CHANNELS {
                    ch[c].push(parse_f64(&rec[c + 4], path)?);
                }
                current = Some((idx, kind, stamp, ch));
            }
        }
    }
    if let Some(done) = current.take() {
        finish(done, &mut windows)?;
    }
    if windows.is_empty() {
        return Err(load_err(path, "no windows"));
    }
    Ok(windows)
}

// ---------------------------------------------------------------------------
// Synthetic dataset manifests and labels
// ---------------------------------------------------------------------------

/// Manifest of a generated surrogate dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub per_class: usize,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub n_classes: usize,
    pub n_windows: usize,
}

/// Write `index,label,class` rows.
pub fn write_labels_csv(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["index", "label", "class"])?;
    for (i, &l) in labels.iter().enumerate() {
        let class = crate::synth::class_name(l).unwrap_or_else(|_| "unknown".into());
        w.write_record(&[i.to_string(), l.to_string(), class])?;
    }
    w.flush()?;
    Ok(())
}

/// Read labels back; the class column is informative only.
pub fn read_labels_csv(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &["index", "label", "class"], path)?;
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let idx: usize =
            rec[0].parse().map_err(|e| load_err(path, format!("bad index: {e}")))?;
        if idx != i {
            return Err(load_err(path, format!("index {idx} at row {i}")));
        }
        labels.push(rec[1].parse().map_err(|e| load_err(path, format!("bad label: {e}")))?);
    }
    Ok(labels)
}

// ---------------------------------------------------------------------------
// Feature matrices
// ---------------------------------------------------------------------------

/// Sidecar manifest of a feature matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub registry_hash: String,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub extraction_version: String,
    pub rows: usize,
    /// Registry ids the columns were masked to; `None` means the full bank.
    pub selected: Option<Vec<usize>>,
}

/// A feature matrix read back from disk: per-row window provenance, the
/// canonical column names, and the values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub stamps: Vec<(Option<DateTime<Utc>>, WindowKind)>,
    pub names: Vec<String>,
    pub x: Matrix<f64>,
}

fn window_cell(stamp: Option<DateTime<Utc>>, kind: WindowKind) -> String {
    match stamp {
        Some(t) => format!("{}|{}", rfc3339(t), kind.as_str()),
        None => format!("-|{}", kind.as_str()),
    }
}

fn parse_window_cell(cell: &str, path: &Path) -> Result<(Option<DateTime<Utc>>, WindowKind)> {
    let (stamp, kind) = cell
        .rsplit_once('|')
        .ok_or_else(|| load_err(path, format!("bad window cell {cell:?}")))?;
    let kind = WindowKind::from_str(kind)
        .ok_or_else(|| load_err(path, format!("bad window kind {kind:?}")))?;
    let stamp = if stamp == "-" { None } else { Some(parse_rfc3339(stamp, path)?) };
    Ok((stamp, kind))
}

/// Write extracted vectors as a feature matrix: first column `window`
/// (timestamp and kind), remaining columns named by `names` in order.
pub fn write_feature_csv(
    path: impl AsRef<Path>,
    names: &[String],
    rows: &[FeatureVector<f64>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = Vec::with_capacity(names.len() + 1);
    header.push("window".to_string());
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for row in rows {
        if row.values.len() != names.len() {
            return Err(CoreError::LengthMismatch(names.len(), row.values.len()));
        }
        let mut rec = Vec::with_capacity(names.len() + 1);
        rec.push(window_cell(row.start_time, row.kind));
        rec.extend(row.values.iter().map(|&v| format_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a feature matrix CSV.
pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = r.headers()?;
    if headers.is_empty() || &headers[0] != "window" {
        return Err(load_err(path, "first column must be `window`"));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if names.is_empty() {
        return Err(load_err(path, "no feature columns"));
    }
    let mut stamps = Vec::new();
    let mut data = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != names.len() + 1 {
            return Err(load_err(
                path,
                format!("row has {} fields, expected {}", rec.len(), names.len() + 1),
            ));
        }
        stamps.push(parse_window_cell(&rec[0], path)?);
        for c in 1..rec.len() {
            data.push(parse_f64(&rec[c], path)?);
        }
    }
    if stamps.is_empty() {
        return Err(load_err(path, "no rows"));
    }
    let x = Matrix::new(data, stamps.len(), names.len())?;
    Ok(FeatureTable { stamps, names, x })
}

// ---------------------------------------------------------------------------
// Hourly aggregates
// ---------------------------------------------------------------------------

/// The four aggregation statistics, in column order within one feature.
pub const HOURLY_STATS: [&str; 4] = ["min", "max", "mean", "std"];

/// Expand window-feature names into hourly column names, feature-major.
pub fn hourly_column_names(base_names: &[String]) -> Vec<String> {
    base_names
        .iter()
        .flat_map(|n| HOURLY_STATS.iter().map(move |s| format!("{n}|{s}")))
        .collect()
}

/// Sidecar manifest of an hourly aggregate CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyManifest {
    pub registry_hash: String,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    pub extraction_version: String,
    /// Registry ids the base features were masked to; `None` is the full bank.
    pub selected: Option<Vec<usize>>,
    pub cadence_per_hour: u32,
    pub rows: usize,
}

/// Write hourly rows as `hour,coverage,missing` plus four statistic
/// columns per base feature.
pub fn write_hourly_csv(
    path: impl AsRef<Path>,
    base_names: &[String],
    rows: &[HourlyRow<f64>],
) -> Result<()> {
    let columns = hourly_column_names(base_names);
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["hour".to_string(), "coverage".to_string(), "missing".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for row in rows {
        if row.values.len() != columns.len() {
            return Err(CoreError::LengthMismatch(columns.len(), row.values.len()));
        }
        let mut rec = Vec::with_capacity(columns.len() + 3);
        rec.push(rfc3339(row.hour));
        rec.push(format_f64(row.coverage));
        rec.push(u8::from(row.missing).to_string());
        rec.extend(row.values.iter().map(|&v| format_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read an hourly aggregate CSV back as (expanded column names, rows).
pub fn read_hourly_csv(
    path: impl AsRef<Path>,
) -> Result<(Vec<String>, Vec<HourlyRow<f64>>)> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = r.headers()?;
    let fixed = ["hour", "coverage", "missing"];
    if headers.len() < 4 || headers.iter().take(3).zip(fixed).any(|(g, w)| g != w) {
        return Err(load_err(path, "header must start with hour,coverage,missing"));
    }
    let columns: Vec<String> = headers.iter().skip(3).map(str::to_string).collect();
    if columns.len() % HOURLY_STATS.len() != 0 {
        return Err(load_err(
            path,
            format!("{} value columns do not group into fours", columns.len()),
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != columns.len() + 3 {
            return Err(load_err(
                path,
                format!("row has {} fields, expected {}", rec.len(), columns.len() + 3),
            ));
        }
        let missing = match &rec[2] {
            "0" => false,
            "1" => true,
            other => return Err(load_err(path, format!("bad missing flag {other:?}"))),
        };
        let mut values = Vec::with_capacity(columns.len());
        for c in 3..rec.len() {
            values.push(parse_f64(&rec[c], path)?);
        }
        rows.push(HourlyRow {
            hour: parse_rfc3339(&rec[0], path)?,
            values,
            coverage: parse_f64(&rec[1], path)?,
            missing,
        });
    }
    if rows.is_empty() {
        return Err(load_err(path, "no rows"));
    }
    Ok((columns, rows))
}

// ---------------------------------------------------------------------------
// Fault logs and prediction timelines
// ---------------------------------------------------------------------------

/// Write `station,fault_time_iso8601` rows.
pub fn write_fault_log_csv(
    path: impl AsRef<Path>,
    rows: &[(String, DateTime<Utc>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["station", "fault_time_iso8601"])?;
    for (station, t) in rows {
        w.write_record(&[station.clone(), rfc3339(*t)])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a fault log.
pub fn read_fault_log_csv(path: impl AsRef<Path>) -> Result<Vec<(String, DateTime<Utc>)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &["station", "fault_time_iso8601"], path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push((rec[0].to_string(), parse_rfc3339(&rec[1], path)?));
    }
    Ok(rows)
}

/// One hour of a prediction timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRow {
    pub hour: DateTime<Utc>,
    pub probability: Option<f64>,
    pub smoothed: Option<f64>,
    /// Threshold decision on the smoothed value; absent for missing hours.
    pub decision: Option<bool>,
}

/// Write `hour,probability,smoothed,decision`; missing hours leave their
/// cells empty.
pub fn write_predictions_csv(path: impl AsRef<Path>, rows: &[PredictionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["hour", "probability", "smoothed", "decision"])?;
    for row in rows {
        w.write_record(&[
            rfc3339(row.hour),
            row.probability.map(format_f64).unwrap_or_default(),
            row.smoothed.map(format_f64).unwrap_or_default(),
            row.decision.map(|d| u8::from(d).to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a prediction timeline.
pub fn read_predictions_csv(path: impl AsRef<Path>) -> Result<Vec<PredictionRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &["hour", "probability", "smoothed", "decision"], path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() { Ok(None) } else { parse_f64(s, path).map(Some) }
        };
        let decision = match &rec[3] {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => return Err(load_err(path, format!("bad decision {other:?}"))),
        };
        rows.push(PredictionRow {
            hour: parse_rfc3339(&rec[0], path)?,
            probability: opt(&rec[1])?,
            smoothed: opt(&rec[2])?,
            decision,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Selection outputs
// ---------------------------------------------------------------------------

/// Write an elimination trace as `iteration,size,mean_accuracy,removed`
/// with removed ids space-separated.
pub fn write_rfe_trace_csv(path: impl AsRef<Path>, trace: &RfeTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["iteration", "size", "mean_accuracy", "removed"])?;
    for (i, it) in trace.iterations.iter().enumerate() {
        let removed =
            it.removed.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        w.write_record(&[
            i.to_string(),
            it.size.to_string(),
            format_f64(it.mean_accuracy),
            removed,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read an elimination trace back as bare iterations.
pub fn read_rfe_trace_csv(path: impl AsRef<Path>) -> Result<Vec<crate::select::RfeIteration>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    check_header(r.headers()?, &["iteration", "size", "mean_accuracy", "removed"], path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let removed = rec[3]
            .split_whitespace()
            .map(|s| s.parse().map_err(|e| load_err(path, format!("bad removed id: {e}"))))
            .collect::<Result<Vec<usize>>>()?;
        out.push(crate::select::RfeIteration {
            size: rec[1].parse().map_err(|e| load_err(path, format!("bad size: {e}")))?,
            mean_accuracy: parse_f64(&rec[2], path)?,
            removed,
        });
    }
    Ok(out)
}

/// A chosen feature subset, pinned to the registry it indexes into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeatures {
    pub ids: Vec<usize>,
    pub registry_hash: String,
}

// ---------------------------------------------------------------------------
// Evaluation reports
// ---------------------------------------------------------------------------

/// Flattened event-level metrics of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetrics {
    pub n_faults: usize,
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positive_events: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n_lead_times: usize,
    pub lead_mean_h: Option<f64>,
    pub lead_median_h: Option<f64>,
    pub lead_q1_h: Option<f64>,
    pub lead_q3_h: Option<f64>,
    /// Raw lead-time samples, for distribution plots.
    pub lead_times_h: Vec<f64>,
}

impl ReportMetrics {
    pub fn from_report(report: &EvalReport) -> ReportMetrics {
        let stats = crate::fp::lead_time_stats(&report.lead_times_h);
        ReportMetrics {
            n_faults: report.n_faults,
            true_positives: report.true_positives,
            false_negatives: report.false_negatives,
            false_positive_events: report.false_positive_events.len(),
            precision: report.precision,
            recall: report.recall,
            f1: report.f1,
            n_lead_times: report.lead_times_h.len(),
            lead_mean_h: stats.as_ref().map(|s| s.mean_h),
            lead_median_h: stats.as_ref().map(|s| s.median_h),
            lead_q1_h: stats.as_ref().map(|s| s.q1_h),
            lead_q3_h: stats.as_ref().map(|s| s.q3_h),
            lead_times_h: report.lead_times_h.clone(),
        }
    }
}

/// Evaluation report: pooled metrics plus a per-station breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub combined: ReportMetrics,
    pub per_station: BTreeMap<String, ReportMetrics>,
}

// ---------------------------------------------------------------------------
// Window-selection index
// ---------------------------------------------------------------------------

/// One minute of a selection index: which offsets won, under which
/// scores, and where the cut windows were written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowIndexEntry {
    pub minute_iso8601: Option<String>,
    pub continuous: WindowScore<f64>,
    pub transient: WindowScore<f64>,
    pub continuous_file: String,
    pub transient_file: String,
}
