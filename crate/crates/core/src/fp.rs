//! Fault-prediction pipeline: hourly aggregation of window features,
//! horizon labeling, probability smoothing, event-level evaluation, and
//! the prediction-horizon sweep.
//!
//! All timeline logic is stamp-based at hourly resolution. An hour
//! stamped `t` counts toward a fault at `f` when `t < f`, never at or
//! after it; attribution reaches back 84 h, lead times up to the full
//! 168 h horizon.

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::features::FeatureVector;
use crate::learn::{train_forest, Dataset, ForestParams, Matrix};
use crate::scalar::Scalar;

/// Default forward horizon: a fault within the next 7 days makes an hour
/// positive.
pub const HORIZON_HOURS: i64 = 168;

/// One wall-clock hour of aggregated window features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct HourlyRow<S> {
    /// Start of the hour.
    pub hour: DateTime<Utc>,
    /// Four statistics per feature, feature-major: min, max, mean, std.
    pub values: Vec<S>,
    /// Windows present divided by windows expected for a full hour.
    pub coverage: f64,
    /// Coverage below 0.5: kept on the timeline but excluded from
    /// training and prediction.
    pub missing: bool,
}

fn hour_floor(t: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(t.timestamp().div_euclid(3600) * 3600, 0).expect("in range")
}

/// Group timestamped feature vectors by wall-clock hour and aggregate
/// each feature with min, max, mean and population std.
///
/// Vectors must be pre-masked to the selected feature set, timestamped,
/// equally wide, and in time order. Hours with fewer than half the
/// expected windows are emitted with `missing` set.
pub fn hourly_aggregate<S: Scalar>(
    vectors: &[FeatureVector<S>],
    expected_per_hour: usize,
) -> Result<Vec<HourlyRow<S>>> {
    if vectors.is_empty() {
        return Err(CoreError::Empty("no feature vectors to aggregate".into()));
    }
    if expected_per_hour == 0 {
        return Err(CoreError::InvalidParam("expected window count of zero".into()));
    }
    let width = vectors[0].values.len();
    let mut stamps = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.values.len() != width {
            return Err(CoreError::LengthMismatch(width, v.values.len()));
        }
        match v.start_time {
            Some(t) => stamps.push(t),
            None => {
                return Err(CoreError::InvalidDataset(
                    "feature vector without a timestamp".into(),
                ))
            }
        }
    }
    if let Some(w) = stamps.windows(2).find(|w| w[1] < w[0]) {
        return Err(CoreError::InvalidDataset(format!(
            "timestamps out of order: {} after {}",
            w[1], w[0]
        )));
    }

    let mut rows = Vec::new();
    let mut at = 0;
    while at < vectors.len() {
        let hour = hour_floor(stamps[at]);
        let mut end = at + 1;
        while end < vectors.len() && hour_floor(stamps[end]) == hour {
            end += 1;
        }
        let group = &vectors[at..end];
        let m = S::of_usize(group.len());
        let mut values = Vec::with_capacity(4 * width);
        for f in 0..width {
            let mut min = group[0].values[f];
            let mut max = min;
            let mut sum = S::zero();
            for v in group {
                let x = v.values[f];
                if x < min {
                    min = x;
                }
                if x > max {
                    max = x;
                }
                sum += x;
            }
            let mean = sum / m;
            let mut m2 = S::zero();
            for v in group {
                let d = v.values[f] - mean;
                m2 += d * d;
            }
            values.extend_from_slice(&[min, max, mean, (m2 / m).sqrt()]);
        }
        let coverage = group.len() as f64 / expected_per_hour as f64;
        rows.push(HourlyRow { hour, values, coverage, missing: coverage < 0.5 });
        at = end;
    }
    Ok(rows)
}

/// Per-column mean and population std of one station's training period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct ColumnStats<S> {
    pub mean: Vec<S>,
    pub std: Vec<S>,
}

/// Z-score every row of one station in place, using statistics from the
/// usable rows strictly before `train_until`. Constant columns map to 0.
///
/// Returns the statistics so callers can persist them and apply the same
/// scaling at prediction time.
pub fn standardize_per_station<S: Scalar>(
    rows: &mut [HourlyRow<S>],
    train_until: DateTime<Utc>,
) -> Result<ColumnStats<S>> {
    let width = match rows.first() {
        Some(r) => r.values.len(),
        None => return Err(CoreError::Empty("no rows to standardize".into())),
    };
    if let Some(r) = rows.iter().find(|r| r.values.len() != width) {
        return Err(CoreError::LengthMismatch(width, r.values.len()));
    }
    let train: Vec<usize> = (0..rows.len())
        .filter(|&i| !rows[i].missing && rows[i].hour < train_until)
        .collect();
    if train.is_empty() {
        return Err(CoreError::InvalidDataset(
            "no usable rows before the training cutoff".into(),
        ));
    }

    let m = S::of_usize(train.len());
    let mut mean = vec![S::zero(); width];
    for &i in &train {
        for (acc, &v) in mean.iter_mut().zip(&rows[i].values) {
            *acc += v;
        }
    }
    for v in mean.iter_mut() {
        *v /= m;
    }
    let mut std = vec![S::zero(); width];
    for &i in &train {
        for (f, acc) in std.iter_mut().enumerate() {
            let d = rows[i].values[f] - mean[f];
            *acc += d * d;
        }
    }
    for v in std.iter_mut() {
        *v = (*v / m).sqrt();
    }

    for row in rows.iter_mut() {
        for (f, v) in row.values.iter_mut().enumerate() {
            *v = if std[f] == S::zero() { S::zero() } else { (*v - mean[f]) / std[f] };
        }
    }
    Ok(ColumnStats { mean, std })
}

/// Positive iff some fault f satisfies t < f <= t + horizon.
pub fn label_with_horizon<S: Scalar>(
    rows: &[HourlyRow<S>],
    faults: &[DateTime<Utc>],
    horizon_hours: i64,
) -> Vec<usize> {
    let horizon = Duration::hours(horizon_hours);
    rows.iter()
        .map(|r| usize::from(faults.iter().any(|&f| r.hour < f && f <= r.hour + horizon)))
        .collect()
}

/// Trailing mean over the last `width` hours; absent hours are excluded
/// from the mean and produce no output of their own.
pub fn moving_average(probs: &[Option<f64>], width: usize) -> Vec<Option<f64>> {
    let width = width.max(1);
    (0..probs.len())
        .map(|i| {
            probs[i]?;
            let lo = i + 1 - width.min(i + 1);
            let window: Vec<f64> = probs[lo..=i].iter().flatten().copied().collect();
            Some(window.iter().sum::<f64>() / window.len() as f64)
        })
        .collect()
}

/// Event-level evaluation protocol constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    /// Smoothed probability at or above this value is a positive hour.
    pub threshold: f64,
    /// Positives this close before a fault are attributed to it.
    pub attribution_h: i64,
    /// A positive with no fault inside this lookahead is a false
    /// positive; with one, it is ignored as pending.
    pub fp_lookahead_h: i64,
    /// Lead times reach back this far before the fault.
    pub lead_window_h: i64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { threshold: 0.5, attribution_h: 84, fp_lookahead_h: 240, lead_window_h: 168 }
    }
}

/// Event-level evaluation of one station's smoothed probability series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_faults: usize,
    pub true_positives: usize,
    pub false_negatives: usize,
    /// Merged false-positive events as (first hour, last hour).
    pub false_positive_events: Vec<(DateTime<Utc>, DateTime<Utc>)>,
    /// Hours from first qualifying positive to the fault, one per TP.
    pub lead_times_h: Vec<f64>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Buckets of positive hour indices: attributed, pending, false positive.
/// Every positive hour lands in exactly one bucket, in that priority.
pub(crate) fn classify_positive_hours(
    start: DateTime<Utc>,
    smoothed: &[Option<f64>],
    faults: &[DateTime<Utc>],
    params: &EvalParams,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let attribution = Duration::hours(params.attribution_h);
    let lookahead = Duration::hours(params.fp_lookahead_h);
    let mut attributed = Vec::new();
    let mut pending = Vec::new();
    let mut false_pos = Vec::new();
    for (i, p) in smoothed.iter().enumerate() {
        match p {
            Some(p) if *p >= params.threshold => {
                let t = start + Duration::hours(i as i64);
                if faults.iter().any(|&f| f - attribution <= t && t < f) {
                    attributed.push(i);
                } else if faults.iter().any(|&f| t < f && f <= t + lookahead) {
                    pending.push(i);
                } else {
                    false_pos.push(i);
                }
            }
            _ => {}
        }
    }
    (attributed, pending, false_pos)
}

/// Apply the event-level protocol to one hourly smoothed series.
///
/// `smoothed[i]` is the value for the hour `start + i`; `None` marks
/// hours without a usable prediction. A fault is a true positive when a
/// positive hour falls inside its attribution window; its lead time is
/// measured from the earliest positive within the lead window. Positive
/// hours outside every attribution window with no fault inside the
/// lookahead merge into false-positive events across gaps under 24 h.
pub fn evaluate(
    start: DateTime<Utc>,
    smoothed: &[Option<f64>],
    faults: &[DateTime<Utc>],
    params: &EvalParams,
) -> Result<EvalReport> {
    if smoothed.is_empty() {
        return Err(CoreError::Empty("probability series".into()));
    }
    let hour = |i: usize| start + Duration::hours(i as i64);
    let positive: Vec<usize> = smoothed
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match p {
            Some(p) if *p >= params.threshold => Some(i),
            _ => None,
        })
        .collect();

    let attribution = Duration::hours(params.attribution_h);
    let lead_window = Duration::hours(params.lead_window_h);
    let mut true_positives = 0;
    let mut lead_times_h = Vec::new();
    for &f in faults {
        let hit = positive.iter().any(|&i| f - attribution <= hour(i) && hour(i) < f);
        if hit {
            true_positives += 1;
            let first = positive
                .iter()
                .map(|&i| hour(i))
                .find(|&t| f - lead_window <= t && t < f)
                .expect("attributed hour lies inside the lead window");
            lead_times_h.push((f - first).num_seconds() as f64 / 3600.0);
        }
    }

    let (_, _, fp_hours) = classify_positive_hours(start, smoothed, faults, params);
    let mut false_positive_events: Vec<(DateTime<Utc>, DateTime<Utc>)> = Vec::new();
    for &i in &fp_hours {
        let t = hour(i);
        match false_positive_events.last_mut() {
            Some((_, last)) if t - *last < Duration::hours(24) => *last = t,
            _ => false_positive_events.push((t, t)),
        }
    }

    let precision = safe_ratio(true_positives, true_positives + false_positive_events.len());
    let recall = safe_ratio(true_positives, faults.len());
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(EvalReport {
        n_faults: faults.len(),
        true_positives,
        false_negatives: faults.len() - true_positives,
        false_positive_events,
        lead_times_h,
        precision,
        recall,
        f1,
    })
}

/// Pool several stations' reports: counts add, events and lead times
/// concatenate, rates are recomputed from the pooled counts.
pub fn combine_reports(reports: &[EvalReport]) -> EvalReport {
    let mut combined = EvalReport {
        n_faults: 0,
        true_positives: 0,
        false_negatives: 0,
        false_positive_events: Vec::new(),
        lead_times_h: Vec::new(),
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
    for r in reports {
        combined.n_faults += r.n_faults;
        combined.true_positives += r.true_positives;
        combined.false_negatives += r.false_negatives;
        combined.false_positive_events.extend_from_slice(&r.false_positive_events);
        combined.lead_times_h.extend_from_slice(&r.lead_times_h);
    }
    combined.precision = safe_ratio(
        combined.true_positives,
        combined.true_positives + combined.false_positive_events.len(),
    );
    combined.recall = safe_ratio(combined.true_positives, combined.n_faults);
    combined.f1 = if combined.precision + combined.recall == 0.0 {
        0.0
    } else {
        2.0 * combined.precision * combined.recall / (combined.precision + combined.recall)
    };
    combined
}

/// Summary statistics over per-TP lead times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeStats {
    pub n: usize,
    pub mean_h: f64,
    pub median_h: f64,
    pub q1_h: f64,
    pub q3_h: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `None` when there are no true positives.
pub fn lead_time_stats(lead_times_h: &[f64]) -> Option<LeadTimeStats> {
    if lead_times_h.is_empty() {
        return None;
    }
    let mut sorted = lead_times_h.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(LeadTimeStats {
        n: sorted.len(),
        mean_h: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median_h: quantile(&sorted, 0.5),
        q1_h: quantile(&sorted, 0.25),
        q3_h: quantile(&sorted, 0.75),
    })
}

/// Design matrix over the usable rows, with their original indices.
pub fn usable_matrix<S: Scalar>(rows: &[HourlyRow<S>]) -> Result<(Matrix<S>, Vec<usize>)> {
    let usable: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].missing).collect();
    if usable.is_empty() {
        return Err(CoreError::Empty("no usable hourly rows".into()));
    }
    let width = rows[usable[0]].values.len();
    let mut data = Vec::with_capacity(usable.len() * width);
    for &i in &usable {
        if rows[i].values.len() != width {
            return Err(CoreError::LengthMismatch(width, rows[i].values.len()));
        }
        data.extend_from_slice(&rows[i].values);
    }
    Ok((Matrix::new(data, usable.len(), width)?, usable))
}

/// Dense hourly timeline from the first to the last row, with one
/// probability per usable row and `None` elsewhere.
///
/// `usable_probs` aligns with the usable rows in order, as produced by
/// predicting on [`usable_matrix`].
pub fn probability_timeline<S: Scalar>(
    rows: &[HourlyRow<S>],
    usable_probs: &[f64],
) -> Result<(DateTime<Utc>, Vec<Option<f64>>)> {
    if rows.is_empty() {
        return Err(CoreError::Empty("no hourly rows".into()));
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].hour <= w[0].hour) {
        return Err(CoreError::InvalidDataset(format!(
            "hourly rows out of order at {}",
            w[1].hour
        )));
    }
    let start = rows[0].hour;
    let span = (rows[rows.len() - 1].hour - start).num_hours() as usize;
    let mut timeline = vec![None; span + 1];
    let mut next_prob = 0;
    for row in rows {
        if !row.missing {
            let p = *usable_probs
                .get(next_prob)
                .ok_or(CoreError::LengthMismatch(usable_probs.len(), next_prob + 1))?;
            timeline[(row.hour - start).num_hours() as usize] = Some(p);
            next_prob += 1;
        }
    }
    if next_prob != usable_probs.len() {
        return Err(CoreError::LengthMismatch(usable_probs.len(), next_prob));
    }
    Ok((start, timeline))
}

/// Relabel, retrain and evaluate once per horizon; returns (horizon, F1)
/// pairs in input order.
pub fn horizon_sweep<S: Scalar>(
    train: &[HourlyRow<S>],
    test: &[HourlyRow<S>],
    train_faults: &[DateTime<Utc>],
    test_faults: &[DateTime<Utc>],
    horizons_h: &[i64],
    forest: ForestParams,
    eval_params: &EvalParams,
) -> Result<Vec<(i64, f64)>> {
    let (train_x, train_idx) = usable_matrix(train)?;
    let (test_x, _) = usable_matrix(test)?;
    let mut out = Vec::with_capacity(horizons_h.len());
    for &h in horizons_h {
        let labels = label_with_horizon(train, train_faults, h);
        let y: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
        let data = Dataset::new(train_x.clone(), y, 2)?;
        let model = train_forest(&data, forest)?;
        let probs: Vec<f64> =
            model.predict_proba(&test_x)?.into_iter().map(|row| row[1]).collect();
        let (start, timeline) = probability_timeline(test, &probs)?;
        let smoothed = moving_average(&timeline, 5);
        let report = evaluate(start, &smoothed, test_faults, eval_params)?;
        out.push((h, report.f1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::WindowKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn utc(secs: i64) -> DateTime<Utc> {
        DateTime::from_timestamp(secs, 0).unwrap()
    }

    fn vector(t_secs: i64, values: Vec<f64>) -> FeatureVector<f64> {
        FeatureVector {
            values,
            start_time: Some(utc(t_secs)),
            kind: WindowKind::Continuous,
            flags: BTreeMap::new(),
        }
    }

    fn row(hour_idx: i64, values: Vec<f64>) -> HourlyRow<f64> {
        HourlyRow { hour: utc(hour_idx * 3600), values, coverage: 1.0, missing: false }
    }

    #[test]
    fn hourly_aggregation_statistics() {
        let vectors = vec![
            vector(0, vec![1.0]),
            vector(600, vec![2.0]),
            vector(1200, vec![3.0]),
            vector(3600, vec![5.0]),
        ];
        let rows = hourly_aggregate(&vectors, 4).unwrap();
        assert_eq!(rows.len(), 2);

        let full = &rows[0];
        assert_eq!(full.hour, utc(0));
        assert_eq!(full.values[0], 1.0);
        assert_eq!(full.values[1], 3.0);
        assert_eq!(full.values[2], 2.0);
        assert!((full.values[3] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(full.coverage, 0.75);
        assert!(!full.missing);

        let lone = &rows[1];
        assert_eq!(lone.values, vec![5.0, 5.0, 5.0, 0.0]);
        assert_eq!(lone.coverage, 0.25);
        assert!(lone.missing);
    }

    #[test]
    fn hourly_row_dimension_matches_four_per_feature() {
        let vectors =
            vec![vector(0, vec![0.5; 374]), vector(60, vec![1.5; 374])];
        let rows = hourly_aggregate(&vectors, 4).unwrap();
        assert_eq!(rows[0].values.len(), 1496);
    }

    #[test]
    fn hourly_stats_are_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vectors: Vec<FeatureVector<f64>> = (0..40)
            .map(|i| vector(i * 900, (0..6).map(|_| rng.gen_range(-5.0..5.0)).collect()))
            .collect();
        for r in hourly_aggregate(&vectors, 4).unwrap() {
            for f in 0..6 {
                let (min, max, mean) = (r.values[4 * f], r.values[4 * f + 1], r.values[4 * f + 2]);
                assert!(min <= mean && mean <= max);
                assert!(r.values[4 * f + 3] >= 0.0);
            }
        }
    }

    #[test]
    fn aggregation_input_checks() {
        assert!(hourly_aggregate::<f64>(&[], 4).is_err());
        let unordered = vec![vector(3600, vec![1.0]), vector(0, vec![1.0])];
        assert!(hourly_aggregate(&unordered, 4).is_err());
        let mut untimed = vector(0, vec![1.0]);
        untimed.start_time = None;
        assert!(hourly_aggregate(&[untimed], 4).is_err());
        let ragged = vec![vector(0, vec![1.0]), vector(60, vec![1.0, 2.0])];
        assert!(hourly_aggregate(&ragged, 4).is_err());
        assert!(hourly_aggregate(&[vector(0, vec![1.0])], 0).is_err());
    }

    #[test]
    fn standardization_uses_training_statistics_only() {
        // Two periods with different distributions; the cutoff splits them.
        let mut rows: Vec<HourlyRow<f64>> = (0..8)
            .map(|i| {
                let v = if i < 4 { i as f64 } else { 100.0 + i as f64 };
                row(i, vec![v, 7.0])
            })
            .collect();
        let stats = standardize_per_station(&mut rows, utc(4 * 3600)).unwrap();

        // Training columns: mean 1.5, population std of [0,1,2,3].
        assert_eq!(stats.mean[0], 1.5);
        let expected_std = (5.0f64 / 4.0).sqrt();
        assert!((stats.std[0] - expected_std).abs() < 1e-12);

        // Training rows are centered and unit-scaled.
        let train_vals: Vec<f64> = rows[..4].iter().map(|r| r.values[0]).collect();
        let mean: f64 = train_vals.iter().sum::<f64>() / 4.0;
        let var: f64 = train_vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);

        // Test rows use the training statistics, not their own.
        assert!((rows[4].values[0] - (104.0 - 1.5) / expected_std).abs() < 1e-12);

        // Constant column to zero everywhere.
        assert!(rows.iter().all(|r| r.values[1] == 0.0));

        // Rows flagged missing do not influence the statistics.
        let mut with_gap: Vec<HourlyRow<f64>> =
            (0..4).map(|i| row(i, vec![i as f64])).collect();
        with_gap[1].missing = true;
        let gap_stats = standardize_per_station(&mut with_gap, utc(4 * 3600)).unwrap();
        assert_eq!(gap_stats.mean[0], (0.0 + 2.0 + 3.0) / 3.0);

        assert!(standardize_per_station::<f64>(&mut [], utc(0)).is_err());
        let mut all_late = vec![row(10, vec![1.0])];
        assert!(standardize_per_station(&mut all_late, utc(0)).is_err());
    }

    #[test]
    fn horizon_labels_match_direct_fault_scan() {
        let rows: Vec<HourlyRow<f64>> = (0..500).map(|i| row(i, vec![0.0])).collect();
        let faults = vec![utc(100 * 3600), utc(320 * 3600 + 1800)];
        let labels = label_with_horizon(&rows, &faults, 168);

        // A fault at f marks stamps in [f - 168 h, f): the interval
        // formulation of the row-side rule t < f <= t + 168 h.
        for (i, r) in rows.iter().enumerate() {
            let expect = faults
                .iter()
                .any(|&f| r.hour >= f - Duration::hours(168) && r.hour < f);
            assert_eq!(labels[i] == 1, expect, "row {i}");
        }

        // Boundaries from the rule itself.
        assert_eq!(labels[95], 1);
        assert_eq!(labels[100], 0);
        assert_eq!(labels[101], 0);
        // Horizon edge of the half-hour fault at 320.5 h: stamp 152 sits
        // 168.5 h ahead of it, stamp 153 exactly 167.5 h.
        assert_eq!(labels[152], 0);
        assert_eq!(labels[153], 1);
        // The half-hour fault stamp still counts for the hour before it.
        assert_eq!(labels[320], 1);
        assert_eq!(labels[321], 0);
    }

    #[test]
    fn moving_average_trailing_window() {
        let series: Vec<Option<f64>> = vec![Some(0.6); 10];
        assert!(moving_average(&series, 5).iter().all(|p| *p == Some(0.6)));

        let pulse = vec![Some(1.0), Some(0.0), Some(0.0), Some(0.0), Some(0.0)];
        let smoothed = moving_average(&pulse, 5);
        assert_eq!(smoothed[4], Some(0.2));
        assert_eq!(smoothed[0], Some(1.0));
        assert_eq!(smoothed[1], Some(0.5));

        let identity = moving_average(&pulse, 1);
        assert_eq!(identity, pulse);

        let gappy = vec![Some(1.0), None, Some(0.0)];
        let smoothed = moving_average(&gappy, 3);
        assert_eq!(smoothed[0], Some(1.0));
        assert_eq!(smoothed[1], None);
        assert_eq!(smoothed[2], Some(0.5));
    }

    /// Independent event matcher: per-fault interval scans over every
    /// hour, no shared code with evaluate().
    fn oracle_eval(
        start: DateTime<Utc>,
        smoothed: &[Option<f64>],
        faults: &[DateTime<Utc>],
        p: &EvalParams,
    ) -> (usize, Vec<f64>, Vec<(usize, usize)>) {
        let hour = |i: usize| start + Duration::hours(i as i64);
        let is_pos =
            |i: usize| matches!(smoothed[i], Some(v) if v >= p.threshold);
        let mut tp = 0;
        let mut leads = Vec::new();
        for &f in faults {
            let mut hit = false;
            for i in 0..smoothed.len() {
                let t = hour(i);
                if is_pos(i) && t >= f - Duration::hours(p.attribution_h) && t < f {
                    hit = true;
                }
            }
            if hit {
                tp += 1;
                for i in 0..smoothed.len() {
                    let t = hour(i);
                    if is_pos(i) && t >= f - Duration::hours(p.lead_window_h) && t < f {
                        leads.push((f - t).num_seconds() as f64 / 3600.0);
                        break;
                    }
                }
            }
        }
        let mut fp_hours = Vec::new();
        for i in 0..smoothed.len() {
            if !is_pos(i) {
                continue;
            }
            let t = hour(i);
            let attributed = faults
                .iter()
                .any(|&f| t >= f - Duration::hours(p.attribution_h) && t < f);
            let pending = faults
                .iter()
                .any(|&f| f > t && f <= t + Duration::hours(p.fp_lookahead_h));
            if !attributed && !pending {
                fp_hours.push(i);
            }
        }
        let mut events: Vec<(usize, usize)> = Vec::new();
        for &i in &fp_hours {
            match events.last_mut() {
                Some((_, last)) if i - *last < 24 => *last = i,
                _ => events.push((i, i)),
            }
        }
        (tp, leads, events)
    }

    #[test]
    fn evaluate_reproduces_paper_style_fixture() {
        // 5 faults, 4 predicted, plus one stray alarm long after the
        // last fault: precision, recall and F1 all land on 0.80. Faults
        // sit more than a lead window apart so each alarm belongs to one
        // fault only.
        let faults: Vec<DateTime<Utc>> =
            [240, 440, 640, 840, 1040].iter().map(|&h| utc(h * 3600)).collect();
        let mut smoothed = vec![Some(0.0); 1440];
        for &f_h in &[240i64, 440, 640, 840] {
            smoothed[(f_h - 10) as usize] = Some(0.8);
        }
        smoothed[1350] = Some(0.9);

        let report = evaluate(utc(0), &smoothed, &faults, &EvalParams::default()).unwrap();
        assert_eq!(report.true_positives, 4);
        assert_eq!(report.false_negatives, 1);
        assert_eq!(report.false_positive_events.len(), 1);
        assert_eq!(report.precision, 0.8);
        assert_eq!(report.recall, 0.8);
        assert!((report.f1 - 0.8).abs() < 1e-12);
        assert_eq!(report.lead_times_h, vec![10.0; 4]);
    }

    #[test]
    fn evaluate_all_zero_probabilities() {
        let faults = vec![utc(100 * 3600)];
        let smoothed = vec![Some(0.0); 200];
        let report = evaluate(utc(0), &smoothed, &faults, &EvalParams::default()).unwrap();
        assert_eq!(report.true_positives, 0);
        assert_eq!(report.recall, 0.0);
        assert_eq!(report.precision, 0.0);
        assert_eq!(report.f1, 0.0);
        assert!(report.false_positive_events.is_empty());
        assert!(evaluate(utc(0), &[], &faults, &EvalParams::default()).is_err());
    }

    #[test]
    fn evaluate_matches_brute_force_matcher() {
        let params = EvalParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..50 {
            // 30-day series with random alarm spikes and 2-4 faults.
            let len = 720;
            let mut smoothed: Vec<Option<f64>> = vec![Some(0.1); len];
            for _ in 0..rng.gen_range(3..12) {
                let at = rng.gen_range(0..len);
                let run = rng.gen_range(1..30);
                for i in at..(at + run).min(len) {
                    smoothed[i] = Some(rng.gen_range(0.5..1.0));
                }
            }
            for _ in 0..rng.gen_range(0..40) {
                let at = rng.gen_range(0..len);
                smoothed[at] = None;
            }
            let n_faults = rng.gen_range(2..5);
            let mut faults: Vec<DateTime<Utc>> = (0..n_faults)
                .map(|_| utc(rng.gen_range(100..len as i64) * 3600 + rng.gen_range(0..3600)))
                .collect();
            faults.sort();

            let report = evaluate(utc(0), &smoothed, &faults, &params).unwrap();
            let (tp, leads, events) = oracle_eval(utc(0), &smoothed, &faults, &params);

            assert_eq!(report.true_positives, tp, "case {case}");
            assert_eq!(report.lead_times_h, leads, "case {case}");
            assert_eq!(report.false_positive_events.len(), events.len(), "case {case}");
            for (got, want) in report.false_positive_events.iter().zip(&events) {
                assert_eq!(got.0, utc(want.0 as i64 * 3600), "case {case}");
                assert_eq!(got.1, utc(want.1 as i64 * 3600), "case {case}");
            }
            for &lead in &report.lead_times_h {
                assert!(lead > 0.0 && lead <= params.lead_window_h as f64);
            }

            // Tri-state exclusivity: every positive hour in exactly one
            // bucket.
            let (a, p, f) = classify_positive_hours(utc(0), &smoothed, &faults, &params);
            let n_pos = smoothed
                .iter()
                .filter(|s| matches!(s, Some(v) if *v >= params.threshold))
                .count();
            assert_eq!(a.len() + p.len() + f.len(), n_pos, "case {case}");
            let mut all: Vec<usize> = a.into_iter().chain(p).chain(f).collect();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), n_pos, "case {case}");
        }
    }

    #[test]
    fn lead_time_quartiles() {
        let stats = lead_time_stats(&[84.8]).unwrap();
        assert_eq!(stats.mean_h, 84.8);
        assert_eq!(stats.median_h, 84.8);

        let stats = lead_time_stats(&[30.0, 10.0, 20.0]).unwrap();
        assert_eq!(stats.n, 3);
        assert_eq!(stats.mean_h, 20.0);
        assert_eq!(stats.median_h, 20.0);
        assert_eq!(stats.q1_h, 15.0);
        assert_eq!(stats.q3_h, 25.0);

        assert!(lead_time_stats(&[]).is_none());
    }

    #[test]
    fn combined_report_pools_counts() {
        let faults_a = vec![utc(200 * 3600)];
        let mut series_a = vec![Some(0.0); 300];
        series_a[190] = Some(0.9);
        let a = evaluate(utc(0), &series_a, &faults_a, &EvalParams::default()).unwrap();

        let faults_b = vec![utc(200 * 3600), utc(260 * 3600)];
        let series_b = vec![Some(0.0); 300];
        let b = evaluate(utc(0), &series_b, &faults_b, &EvalParams::default()).unwrap();

        let combined = combine_reports(&[a, b]);
        assert_eq!(combined.n_faults, 3);
        assert_eq!(combined.true_positives, 1);
        assert_eq!(combined.false_negatives, 2);
        assert_eq!(combined.recall, 1.0 / 3.0);
        assert_eq!(combined.precision, 1.0);
        assert_eq!(combined.lead_times_h, vec![10.0]);
    }

    #[test]
    fn timeline_and_usable_matrix_align() {
        let mut rows: Vec<HourlyRow<f64>> =
            (0..6).map(|i| row(i, vec![i as f64, 1.0])).collect();
        rows[2].missing = true;
        rows.remove(4);

        let (x, idx) = usable_matrix(&rows).unwrap();
        assert_eq!(x.rows(), 4);
        assert_eq!(idx, vec![0, 1, 3, 4]);

        let (start, timeline) = probability_timeline(&rows, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(start, utc(0));
        assert_eq!(
            timeline,
            vec![Some(0.1), Some(0.2), None, Some(0.3), None, Some(0.4)]
        );
        assert!(probability_timeline(&rows, &[0.1]).is_err());
        assert!(probability_timeline(&rows, &[0.1; 9]).is_err());
    }

    #[test]
    fn horizon_sweep_shapes_and_degenerate_zero() {
        // Feature tracks fault proximity in the training period, so a
        // sensible model is learnable; the shape checks only need the
        // plumbing to run end to end.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let train_faults = vec![utc(300 * 3600), utc(600 * 3600)];
        let test_faults = vec![utc(1200 * 3600)];
        let precursor = |i: i64, faults: &[DateTime<Utc>]| {
            let t = utc(i * 3600);
            faults
                .iter()
                .any(|&f| t < f && f <= t + Duration::hours(72))
                .then_some(3.0)
                .unwrap_or(0.0)
        };
        let train: Vec<HourlyRow<f64>> = (0..720)
            .map(|i| {
                row(i, vec![precursor(i, &train_faults) + rng.gen_range(-0.5..0.5)])
            })
            .collect();
        let test: Vec<HourlyRow<f64>> = (900..1300)
            .map(|i| {
                row(i, vec![precursor(i, &test_faults) + rng.gen_range(-0.5..0.5)])
            })
            .collect();

        let sweep = horizon_sweep(
            &train,
            &test,
            &train_faults,
            &test_faults,
            &[0, 72, 168],
            ForestParams::default(),
            &EvalParams::default(),
        )
        .unwrap();
        assert_eq!(sweep.len(), 3);
        assert_eq!(sweep[0], (0, 0.0));
        assert!(sweep.iter().all(|(_, f1)| (0.0..=1.0).contains(f1)));
        // The planted 72 h precursor is learnable at the matching horizon.
        assert!(sweep[1].1 > 0.0);
    }
}
