//! Window-to-vector extraction: runs every kernel over a window and lays
//! the results out in registry order.
//!
//! The assembly loop walks the same per-family layout table the registry is
//! built from, so value positions and registry entries cannot drift apart.
//! Every sentinel fired by a kernel is counted in the vector's diagnostics
//! map under a `kernel|channel` key; aggregation-level sentinels (constant
//! series) use an `agg:` prefix.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::signal::{window_rms, ChannelId, Phasor, WaveformWindow, WindowKind, N_CHANNELS};

use super::cycle_stats::{per_cycle_stats, six_stats, CycleStats};
use super::harmonics::{harmonic_amplitudes, harmonic_phasors, phase_diff, phasor_eps, thd};
use super::registry::{family_layout, Family, FeatureRegistry};
use super::swt::{swt_bands, PAD_BLOCK};
use super::sym::{impedance_rx, power_pq, symmetric_components};
use super::whole::whole_window_features;

/// Voltage/current channel pairs for the impedance and power families, in
/// registry channel order (Za..Z0, Sa..S0).
const VI_PAIRS: [(usize, usize); 4] = [(0, 4), (1, 5), (2, 6), (3, 7)];

/// One extracted window: values aligned index-for-index with the registry,
/// provenance, and a count of every sentinel that fired.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<S: Scalar> {
    pub values: Vec<S>,
    pub start_time: Option<DateTime<Utc>>,
    pub kind: WindowKind,
    /// Sentinel counts keyed `kernel|channel` (kernel level) or
    /// `agg:family.variant|channel` (constant series at aggregation).
    pub flags: BTreeMap<String, usize>,
}

fn bump(flags: &mut BTreeMap<String, usize>, key: String) {
    *flags.entry(key).or_insert(0) += 1;
}

/// Extract the full registry-ordered feature vector of one window.
///
/// Requires at least two whole cycles (the aggregations need two points)
/// and at least [`PAD_BLOCK`] samples (the wavelet depth needs them).
pub fn extract_window<S: Scalar>(
    window: &WaveformWindow<S>,
    kind: WindowKind,
    registry: &FeatureRegistry,
) -> Result<FeatureVector<S>> {
    let cycles = window.cycles();
    if cycles < 2 {
        return Err(CoreError::TooShort { need: 2 * window.samples_per_cycle(), got: window.len() });
    }
    if window.len() < PAD_BLOCK {
        return Err(CoreError::TooShort { need: PAD_BLOCK, got: window.len() });
    }

    let mut flags: BTreeMap<String, usize> = BTreeMap::new();

    // Channel amplitude floors, relative to each channel's full-window RMS.
    let mut eps = [S::zero(); N_CHANNELS];
    for ch in ChannelId::all() {
        eps[ch.index()] = phasor_eps(window_rms(window.channel(ch))?);
    }

    // Per-cycle kernel outputs, channel-major.
    let mut phasors: Vec<Vec<[Phasor<S>; 8]>> =
        (0..N_CHANNELS).map(|_| Vec::with_capacity(cycles)).collect();
    let mut stats: Vec<Vec<CycleStats<S>>> =
        (0..N_CHANNELS).map(|_| Vec::with_capacity(cycles)).collect();
    let mut thd_series: Vec<Vec<S>> = (0..N_CHANNELS).map(|_| Vec::with_capacity(cycles)).collect();
    let mut dphi_series: Vec<Vec<S>> = (0..N_CHANNELS).map(|_| Vec::with_capacity(cycles)).collect();
    let mut sym_series: Vec<Vec<S>> = (0..6).map(|_| Vec::with_capacity(cycles)).collect();
    let mut imp_r: Vec<Vec<S>> = (0..4).map(|_| Vec::with_capacity(cycles)).collect();
    let mut imp_x: Vec<Vec<S>> = (0..4).map(|_| Vec::with_capacity(cycles)).collect();
    let mut pow_p: Vec<Vec<S>> = (0..4).map(|_| Vec::with_capacity(cycles)).collect();
    let mut pow_q: Vec<Vec<S>> = (0..4).map(|_| Vec::with_capacity(cycles)).collect();

    for frame in window.cycle_frames() {
        let mut frame_ph = [[Phasor::zero(); 8]; N_CHANNELS];
        for ch in ChannelId::all() {
            frame_ph[ch.index()] = harmonic_phasors(&frame, ch)?;
        }
        let va_fund = frame_ph[ChannelId::VA.index()][0];

        for ch in ChannelId::all() {
            let c = ch.index();
            let ph = frame_ph[c];

            let (t, t_flag) = thd(&harmonic_amplitudes(&ph), eps[c]);
            if t_flag {
                bump(&mut flags, format!("thd.thd|{}", ch.name()));
            }
            thd_series[c].push(t);

            let (d, d_flag) = phase_diff(ph[0], va_fund, eps[c], eps[ChannelId::VA.index()]);
            if d_flag {
                bump(&mut flags, format!("phase_diff.dphi|{}", ch.name()));
            }
            dphi_series[c].push(d);

            let (cs, cs_flags) = per_cycle_stats(frame.channel(ch))?;
            if cs_flags.moments {
                bump(&mut flags, format!("cycle_stat.moments|{}", ch.name()));
            }
            if cs_flags.crest {
                bump(&mut flags, format!("cycle_stat.crest|{}", ch.name()));
            }
            if cs_flags.form {
                bump(&mut flags, format!("cycle_stat.form|{}", ch.name()));
            }
            stats[c].push(cs);

            phasors[c].push(ph);
        }

        let u = symmetric_components(
            frame_ph[ChannelId::VA.index()][0],
            frame_ph[ChannelId::VB.index()][0],
            frame_ph[ChannelId::VC.index()][0],
        );
        let i = symmetric_components(
            frame_ph[ChannelId::IA.index()][0],
            frame_ph[ChannelId::IB.index()][0],
            frame_ph[ChannelId::IC.index()][0],
        );
        for k in 0..3 {
            sym_series[k].push(u[k]);
            sym_series[3 + k].push(i[k]);
        }

        for (pair, (vi, ii)) in VI_PAIRS.iter().enumerate() {
            let v = frame_ph[*vi][0];
            let iph = frame_ph[*ii][0];
            let ((r, x), z_flag) = impedance_rx(v, iph, eps[*ii]);
            if z_flag {
                bump(&mut flags, format!("impedance.rx|{}", family_layout(Family::Impedance).1[pair]));
            }
            imp_r[pair].push(r);
            imp_x[pair].push(x);
            let (p, q) = power_pq(v, iph);
            pow_p[pair].push(p);
            pow_q[pair].push(q);
        }
    }

    // Whole-window kernels, autocorrelation at one-cycle lag.
    let mut whole_vals = [[S::zero(); 4]; N_CHANNELS];
    for ch in ChannelId::all() {
        let (vals, w_flags) = whole_window_features(window.channel(ch), window.samples_per_cycle())?;
        if w_flags.autocorr {
            bump(&mut flags, format!("whole_window.autocorr|{}", ch.name()));
        }
        if w_flags.fourier {
            bump(&mut flags, format!("whole_window.fourier_entropy|{}", ch.name()));
        }
        whole_vals[ch.index()] = vals;
    }

    // Wavelet coefficient series, d1..d8 then a8 per channel.
    let mut bands: Vec<Vec<Vec<S>>> = Vec::with_capacity(N_CHANNELS);
    for ch in ChannelId::all() {
        bands.push(swt_bands(window.channel(ch))?);
    }

    // Assembly in registry order.
    let mut values = Vec::with_capacity(registry.len());
    let mut scratch: Vec<S> = Vec::with_capacity(cycles);
    for family in Family::ALL {
        let (variants, channels, _aggs) = family_layout(family);
        for (vi, &variant) in variants.iter().enumerate() {
            for (ci, &channel) in channels.iter().enumerate() {
                if family == Family::WholeWindow {
                    values.push(whole_vals[ci][vi]);
                    continue;
                }
                let series: &[S] = match family {
                    Family::FftHarmonic => {
                        scratch.clear();
                        scratch.extend(phasors[ci].iter().map(|p| p[vi].magnitude));
                        &scratch
                    }
                    Family::Thd => &thd_series[ci],
                    Family::PhaseDiff => &dphi_series[ci],
                    Family::CycleStat => {
                        scratch.clear();
                        scratch.extend(stats[ci].iter().map(|s| s.as_array()[vi]));
                        &scratch
                    }
                    Family::SymComponent => &sym_series[ci],
                    Family::Impedance => {
                        if vi == 0 {
                            &imp_r[ci]
                        } else {
                            &imp_x[ci]
                        }
                    }
                    Family::Power => {
                        if vi == 0 {
                            &pow_p[ci]
                        } else {
                            &pow_q[ci]
                        }
                    }
                    Family::Swt => &bands[ci][vi],
                    Family::WholeWindow => unreachable!(),
                };
                let (six, flagged) = six_stats(series)?;
                if flagged {
                    bump(&mut flags, format!("agg:{}.{variant}|{channel}", family.as_str()));
                }
                values.extend_from_slice(&six);
            }
        }
    }
    assert_eq!(values.len(), registry.len(), "extraction misaligned with registry");

    Ok(FeatureVector { values, start_time: window.start_time, kind, flags })
}

/// Extract a batch in parallel. Output order follows input order and every
/// value is identical across thread counts.
pub fn extract_windows<S: Scalar>(
    windows: &[(WaveformWindow<S>, WindowKind)],
    registry: &FeatureRegistry,
) -> Result<Vec<FeatureVector<S>>> {
    windows.par_iter().map(|(w, kind)| extract_window(w, *kind, registry)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::registry::build_registry;
    use crate::signal::derive_zero_sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, TAU};

    const RATE: f64 = 4000.0;
    const FUND: f64 = 50.0;
    const LEN: usize = 2000;
    const SPC: usize = 80;

    fn tone(amp: f64, phase: f64, k: f64) -> Vec<f64> {
        (0..LEN).map(|t| amp * (k * TAU * (t % SPC) as f64 / SPC as f64 + phase).sin()).collect()
    }

    fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    /// Balanced 2 V three-phase voltages; 1 A currents lagging by 30 degrees
    /// with a 10% third harmonic riding on ia only.
    fn analytic_window() -> WaveformWindow<f64> {
        let va = tone(2.0, 0.0, 1.0);
        let vb = tone(2.0, -2.0 * FRAC_PI_3, 1.0);
        let vc = tone(2.0, 2.0 * FRAC_PI_3, 1.0);
        let v0 = derive_zero_sequence(&va, &vb, &vc).unwrap();
        let ia = add(&tone(1.0, -FRAC_PI_6, 1.0), &tone(0.1, -3.0 * FRAC_PI_6, 3.0));
        let ib = tone(1.0, -FRAC_PI_6 - 2.0 * FRAC_PI_3, 1.0);
        let ic = tone(1.0, -FRAC_PI_6 + 2.0 * FRAC_PI_3, 1.0);
        let i0 = derive_zero_sequence(&ia, &ib, &ic).unwrap();
        WaveformWindow::from_channels([va, vb, vc, v0, ia, ib, ic, i0], RATE, FUND, None).unwrap()
    }

    fn value(fv: &FeatureVector<f64>, registry: &FeatureRegistry, name: &str) -> f64 {
        fv.values[registry.index_of(name).unwrap_or_else(|| panic!("no feature {name}"))]
    }

    #[test]
    fn analytic_window_expected_values() {
        let registry = build_registry();
        let w = analytic_window();
        let fv = extract_window(&w, WindowKind::Continuous, &registry).unwrap();

        assert_eq!(fv.values.len(), 1556);
        assert!(fv.values.iter().all(|v| v.is_finite()));
        assert_eq!(fv.kind, WindowKind::Continuous);
        assert_eq!(fv.start_time, None);

        let v = |name: &str| value(&fv, &registry, name);

        // Harmonic amplitudes: 2 V fundamental on va, the 0.1 A third
        // harmonic only on ia.
        assert!((v("fft_harmonic.h1|va|mean") - 2.0).abs() < 1e-9);
        assert!(v("fft_harmonic.h1|va|std") < 1e-9);
        assert!((v("fft_harmonic.h3|ia|mean") - 0.1).abs() < 1e-9);
        assert!(v("fft_harmonic.h3|ib|mean") < 1e-9);
        assert!(v("fft_harmonic.h2|va|mean") < 1e-9);

        // THD: h3/h1 on ia, clean elsewhere.
        assert!((v("thd.thd|ia|mean") - 0.1).abs() < 1e-9);
        assert!(v("thd.thd|va|mean") < 1e-9);

        // Phase differences against va.
        assert!((v("phase_diff.dphi|vb|mean") + 2.0 * FRAC_PI_3).abs() < 1e-9);
        assert!((v("phase_diff.dphi|vc|mean") - 2.0 * FRAC_PI_3).abs() < 1e-9);
        assert!((v("phase_diff.dphi|ia|mean") + FRAC_PI_6).abs() < 1e-9);
        assert!(v("phase_diff.dphi|va|mean").abs() < 1e-12);

        // Cycle statistics: the 80-sample grid hits the sine peak exactly.
        assert!((v("cycle_stat.rms|va|mean") - 2.0 / 2f64.sqrt()).abs() < 1e-9);
        assert!((v("cycle_stat.max|va|mean") - 2.0).abs() < 1e-9);
        assert!((v("cycle_stat.crest|va|mean") - 2f64.sqrt()).abs() < 1e-9);
        assert!(v("cycle_stat.std|va|std") < 1e-9);

        // Symmetric components: balanced sets are pure positive sequence.
        assert!((v("sym_component.mag|U1|mean") - 2.0).abs() < 1e-9);
        assert!(v("sym_component.mag|U0|mean") < 1e-6);
        assert!(v("sym_component.mag|U2|mean") < 1e-6);
        assert!((v("sym_component.mag|I1|mean") - 1.0).abs() < 1e-9);

        // Impedance: V/I = 2 at +30 degrees.
        assert!((v("impedance.r|Za|mean") - 3f64.sqrt()).abs() < 1e-9);
        assert!((v("impedance.x|Za|mean") - 1.0).abs() < 1e-9);

        // Power: P = cos(30deg), Q = +sin(30deg) for the lagging current.
        assert!((v("power.p|Sa|mean") - FRAC_PI_6.cos()).abs() < 1e-9);
        assert!((v("power.q|Sa|mean") - 0.5).abs() < 1e-9);

        // Whole-window: periodic signal autocorrelates perfectly at one
        // cycle; outlier ratio approaches the arcsine-law value.
        assert!((v("whole_window.autocorr|va|none") - 1.0).abs() < 1e-6);
        let arcsine = 1.0 - 2.0 / std::f64::consts::PI * (1.1 / 2f64.sqrt()).asin();
        assert!((v("whole_window.outlier_ratio|va|none") - arcsine).abs() < 0.02);

        // Clean channels fired no kernel sentinels.
        assert!(!fv.flags.contains_key("thd.thd|va"));
        assert!(!fv.flags.contains_key("cycle_stat.crest|ia"));
        assert!(!fv.flags.contains_key("impedance.rx|Za"));
    }

    #[test]
    fn values_match_direct_kernel_calls() {
        // Alignment check: sampled features across all families must equal
        // the kernel output computed directly at the claimed position.
        let registry = build_registry();
        let w = analytic_window();
        let fv = extract_window(&w, WindowKind::Transient, &registry).unwrap();

        let h5_ic: Vec<f64> = w
            .cycle_frames()
            .map(|f| harmonic_phasors(&f, ChannelId::IC).unwrap()[5].magnitude)
            .collect();
        // Slot 5 is harmonic 7.
        assert_eq!(
            value(&fv, &registry, "fft_harmonic.h7|ic|skew"),
            six_stats(&h5_ic).unwrap().0[4]
        );

        let kurt_vb: Vec<f64> =
            w.cycle_frames().map(|f| per_cycle_stats(f.channel(ChannelId::VB)).unwrap().0.kurt).collect();
        assert_eq!(value(&fv, &registry, "cycle_stat.kurt|vb|max"), six_stats(&kurt_vb).unwrap().0[1]);

        let i2: Vec<f64> = w
            .cycle_frames()
            .map(|f| {
                symmetric_components(
                    harmonic_phasors(&f, ChannelId::IA).unwrap()[0],
                    harmonic_phasors(&f, ChannelId::IB).unwrap()[0],
                    harmonic_phasors(&f, ChannelId::IC).unwrap()[0],
                )[2]
            })
            .collect();
        assert_eq!(value(&fv, &registry, "sym_component.mag|I2|min"), six_stats(&i2).unwrap().0[0]);

        let d3_v0 = &swt_bands(w.channel(ChannelId::V0)).unwrap()[2];
        assert_eq!(value(&fv, &registry, "swt.d3|v0|std"), six_stats(d3_v0).unwrap().0[3]);
        let a8_i0 = &swt_bands(w.channel(ChannelId::I0)).unwrap()[8];
        assert_eq!(value(&fv, &registry, "swt.a8|i0|mean"), six_stats(a8_i0).unwrap().0[2]);

        let (whole_ib, _) = whole_window_features(w.channel(ChannelId::IB), SPC).unwrap();
        assert_eq!(value(&fv, &registry, "whole_window.binned_entropy|ib|none"), whole_ib[1]);
        assert_eq!(value(&fv, &registry, "whole_window.outlier_ratio|ib|none"), whole_ib[3]);
    }

    #[test]
    fn zero_window_is_all_zero_and_flagged() {
        let registry = build_registry();
        let w = WaveformWindow::new(vec![0.0f64; 8 * LEN], LEN, RATE, FUND, None).unwrap();
        let fv = extract_window(&w, WindowKind::Synthetic, &registry).unwrap();

        assert!(fv.values.iter().all(|&v| v == 0.0));

        // Kernel sentinels fire once per cycle on every channel.
        assert_eq!(fv.flags.get("thd.thd|va"), Some(&25));
        assert_eq!(fv.flags.get("phase_diff.dphi|i0"), Some(&25));
        assert_eq!(fv.flags.get("cycle_stat.crest|vb"), Some(&25));
        assert_eq!(fv.flags.get("cycle_stat.form|ic"), Some(&25));
        assert_eq!(fv.flags.get("impedance.rx|Z0"), Some(&25));
        assert_eq!(fv.flags.get("whole_window.autocorr|va"), Some(&1));
        assert_eq!(fv.flags.get("whole_window.fourier_entropy|i0"), Some(&1));
        // Constant series flag at aggregation level.
        assert_eq!(fv.flags.get("agg:fft_harmonic.h1|va"), Some(&1));
        assert_eq!(fv.flags.get("agg:swt.a8|i0"), Some(&1));
    }

    #[test]
    fn phase_swap_permutes_channel_features() {
        // Swapping phases b and c (voltage and current together) must move
        // per-channel features between the b and c slots untouched, and
        // exchange the positive and negative sequence magnitudes.
        let registry = build_registry();
        let va = tone(2.0, 0.1, 1.0);
        let vb = add(&tone(1.9, -2.1, 1.0), &tone(0.2, 0.3, 5.0));
        let vc = tone(2.2, 2.0, 1.0);
        let v0 = derive_zero_sequence(&va, &vb, &vc).unwrap();
        let ia = tone(1.0, -0.4, 1.0);
        let ib = add(&tone(1.3, -2.4, 1.0), &tone(0.15, 1.0, 2.0));
        let ic = tone(0.8, 1.7, 1.0);
        let i0 = derive_zero_sequence(&ia, &ib, &ic).unwrap();

        let orig = WaveformWindow::from_channels(
            [va.clone(), vb.clone(), vc.clone(), v0.clone(), ia.clone(), ib.clone(), ic.clone(), i0.clone()],
            RATE,
            FUND,
            None,
        )
        .unwrap();
        let swapped =
            WaveformWindow::from_channels([va, vc, vb, v0, ia, ic, ib, i0], RATE, FUND, None).unwrap();

        let f0 = extract_window(&orig, WindowKind::Continuous, &registry).unwrap();
        let f1 = extract_window(&swapped, WindowKind::Continuous, &registry).unwrap();
        let v0f = |name: &str| value(&f0, &registry, name);
        let v1f = |name: &str| value(&f1, &registry, name);

        // Per-channel families move bitwise.
        for agg in ["min", "max", "mean", "std", "skew", "kurt"] {
            assert_eq!(v0f(&format!("fft_harmonic.h1|vb|{agg}")), v1f(&format!("fft_harmonic.h1|vc|{agg}")));
            assert_eq!(v0f(&format!("cycle_stat.rms|ib|{agg}")), v1f(&format!("cycle_stat.rms|ic|{agg}")));
            assert_eq!(v0f(&format!("thd.thd|vb|{agg}")), v1f(&format!("thd.thd|vc|{agg}")));
            assert_eq!(v0f(&format!("phase_diff.dphi|ib|{agg}")), v1f(&format!("phase_diff.dphi|ic|{agg}")));
            assert_eq!(v0f(&format!("swt.d2|vb|{agg}")), v1f(&format!("swt.d2|vc|{agg}")));
            assert_eq!(v0f(&format!("impedance.r|Zb|{agg}")), v1f(&format!("impedance.r|Zc|{agg}")));
            assert_eq!(v0f(&format!("power.q|Sb|{agg}")), v1f(&format!("power.q|Sc|{agg}")));
        }
        assert_eq!(v0f("whole_window.autocorr|ib|none"), v1f("whole_window.autocorr|ic|none"));
        // Untouched channels are identical.
        assert_eq!(v0f("fft_harmonic.h1|va|mean"), v1f("fft_harmonic.h1|va|mean"));
        assert_eq!(v0f("cycle_stat.rms|i0|std"), v1f("cycle_stat.rms|i0|std"));

        // A phase swap reverses rotation: positive and negative sequence
        // magnitudes exchange (up to summation order).
        assert!((v0f("sym_component.mag|U1|mean") - v1f("sym_component.mag|U2|mean")).abs() < 1e-12);
        assert!((v0f("sym_component.mag|U2|mean") - v1f("sym_component.mag|U1|mean")).abs() < 1e-12);
        assert!((v0f("sym_component.mag|I1|mean") - v1f("sym_component.mag|I2|mean")).abs() < 1e-12);
        assert!((v0f("sym_component.mag|U0|mean") - v1f("sym_component.mag|U0|mean")).abs() < 1e-12);
    }

    #[test]
    fn batch_is_deterministic_across_thread_counts() {
        let registry = build_registry();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0ff1ce);
        let mut windows = Vec::new();
        for w in 0..6 {
            let mut chans: [Vec<f64>; 8] = Default::default();
            for ch in chans.iter_mut() {
                *ch = (0..LEN)
                    .map(|t| {
                        let th = TAU * (t % SPC) as f64 / SPC as f64;
                        (1.0 + w as f64) * th.sin() + rng.gen_range(-0.3..0.3)
                    })
                    .collect();
            }
            let kind = if w % 2 == 0 { WindowKind::Continuous } else { WindowKind::Transient };
            windows.push((WaveformWindow::from_channels(chans, RATE, FUND, None).unwrap(), kind));
        }

        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| extract_windows(&windows, &registry).unwrap())
        };
        let one = run(1);
        let eight = run(8);
        assert_eq!(one.len(), 6);
        for (a, b) in one.iter().zip(eight.iter()) {
            assert_eq!(a.values, b.values);
            assert_eq!(a.flags, b.flags);
            assert_eq!(a.kind, b.kind);
        }
    }

    #[test]
    fn degenerate_windows_are_rejected() {
        let registry = build_registry();

        // One cycle: nothing to aggregate.
        let w = WaveformWindow::new(vec![0.0f64; 8 * SPC], SPC, RATE, FUND, None).unwrap();
        assert!(matches!(
            extract_window(&w, WindowKind::Synthetic, &registry),
            Err(CoreError::TooShort { .. })
        ));

        // Two cycles but fewer samples than the wavelet padding block.
        let w = WaveformWindow::new(vec![0.0f64; 8 * 160], 160, RATE, FUND, None).unwrap();
        assert!(matches!(
            extract_window(&w, WindowKind::Synthetic, &registry),
            Err(CoreError::TooShort { .. })
        ));

        // Too few samples per cycle to resolve harmonic 13.
        let w = WaveformWindow::new(vec![0.0f64; 8 * 260], 260, 1000.0, 50.0, None).unwrap();
        assert!(extract_window(&w, WindowKind::Synthetic, &registry).is_err());
    }

    #[test]
    fn f32_extraction_smoke() {
        let registry = build_registry();
        let chans: [Vec<f32>; 8] = std::array::from_fn(|c| {
            (0..LEN)
                .map(|t| (c + 1) as f32 * (TAU as f32 * (t % SPC) as f32 / SPC as f32 - FRAC_PI_2 as f32).cos())
                .collect()
        });
        let w = WaveformWindow::from_channels(chans, RATE, FUND, None).unwrap();
        let fv = extract_window(&w, WindowKind::Continuous, &registry).unwrap();
        assert_eq!(fv.values.len(), 1556);
        assert!(fv.values.iter().all(|v| v.is_finite()));
        let h1 = value_f32(&fv, &registry, "fft_harmonic.h1|va|mean");
        assert!((h1 - 1.0).abs() < 1e-3, "h1 {h1}");
    }

    fn value_f32(fv: &FeatureVector<f32>, registry: &FeatureRegistry, name: &str) -> f32 {
        fv.values[registry.index_of(name).unwrap()]
    }
}
