//! Canonical registry of the 1556 candidate features.
//!
//! Ordering is fixed: families in table order, then variants, then channels
//! in measurement order, then aggregations in (min, max, mean, std, skew,
//! kurt) order. The registry hash pins this layout; models persist it and
//! refuse to load against a registry with a different hash.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};

/// Feature family, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    FftHarmonic,
    Thd,
    PhaseDiff,
    CycleStat,
    SymComponent,
    Impedance,
    Power,
    WholeWindow,
    Swt,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::FftHarmonic,
        Family::Thd,
        Family::PhaseDiff,
        Family::CycleStat,
        Family::SymComponent,
        Family::Impedance,
        Family::Power,
        Family::WholeWindow,
        Family::Swt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::FftHarmonic => "fft_harmonic",
            Family::Thd => "thd",
            Family::PhaseDiff => "phase_diff",
            Family::CycleStat => "cycle_stat",
            Family::SymComponent => "sym_component",
            Family::Impedance => "impedance",
            Family::Power => "power",
            Family::WholeWindow => "whole_window",
            Family::Swt => "swt",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Aggregation applied to a per-cycle or per-band series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agg {
    Min,
    Max,
    Mean,
    Std,
    Skew,
    Kurt,
    /// Whole-window features carry no aggregation.
    None,
}

impl Agg {
    /// The six aggregations, in registry order.
    pub const SIX: [Agg; 6] = [Agg::Min, Agg::Max, Agg::Mean, Agg::Std, Agg::Skew, Agg::Kurt];

    pub fn as_str(self) -> &'static str {
        match self {
            Agg::Min => "min",
            Agg::Max => "max",
            Agg::Mean => "mean",
            Agg::Std => "std",
            Agg::Skew => "skew",
            Agg::Kurt => "kurt",
            Agg::None => "none",
        }
    }
}

/// Identity of one registry entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureId {
    pub family: Family,
    pub variant: &'static str,
    pub channel: &'static str,
    pub agg: Agg,
}

impl FeatureId {
    /// Canonical text form `family.variant|channel|agg`.
    pub fn canonical(&self) -> String {
        format!("{}.{}|{}|{}", self.family.as_str(), self.variant, self.channel, self.agg.as_str())
    }
}

impl std::fmt::Display for FeatureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}|{}|{}", self.family.as_str(), self.variant, self.channel, self.agg.as_str())
    }
}

/// The eight measured channels, in registry order.
pub const WAVE_CHANNELS: [&str; 8] = ["va", "vb", "vc", "v0", "ia", "ib", "ic", "i0"];

/// Harmonic orders of the fft_harmonic family.
pub const HARMONIC_KS: [usize; 8] = [1, 2, 3, 4, 5, 7, 11, 13];

const HARMONIC_VARIANTS: [&str; 8] = ["h1", "h2", "h3", "h4", "h5", "h7", "h11", "h13"];
const CYCLE_STAT_VARIANTS: [&str; 10] =
    ["max", "min", "mean", "std", "skew", "kurt", "crest", "form", "largest_delta", "rms"];
const SYM_CHANNELS: [&str; 6] = ["U0", "U1", "U2", "I0", "I1", "I2"];
const IMPEDANCE_CHANNELS: [&str; 4] = ["Za", "Zb", "Zc", "Z0"];
const POWER_CHANNELS: [&str; 4] = ["Sa", "Sb", "Sc", "S0"];
const WHOLE_VARIANTS: [&str; 4] = ["autocorr", "binned_entropy", "fourier_entropy", "outlier_ratio"];
const SWT_VARIANTS: [&str; 9] = ["d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8", "a8"];

/// Per-family (variants, channels, aggregations) layout. Extraction walks
/// the same table, so registry order and value order stay aligned by
/// construction.
pub(crate) fn family_layout(
    family: Family,
) -> (&'static [&'static str], &'static [&'static str], &'static [Agg]) {
    match family {
        Family::FftHarmonic => (&HARMONIC_VARIANTS, &WAVE_CHANNELS, &Agg::SIX),
        Family::Thd => (&["thd"], &WAVE_CHANNELS, &Agg::SIX),
        Family::PhaseDiff => (&["dphi"], &WAVE_CHANNELS, &Agg::SIX),
        Family::CycleStat => (&CYCLE_STAT_VARIANTS, &WAVE_CHANNELS, &Agg::SIX),
        Family::SymComponent => (&["mag"], &SYM_CHANNELS, &Agg::SIX),
        Family::Impedance => (&["r", "x"], &IMPEDANCE_CHANNELS, &Agg::SIX),
        Family::Power => (&["p", "q"], &POWER_CHANNELS, &Agg::SIX),
        Family::WholeWindow => (&WHOLE_VARIANTS, &WAVE_CHANNELS, &[Agg::None]),
        Family::Swt => (&SWT_VARIANTS, &WAVE_CHANNELS, &Agg::SIX),
    }
}

/// Immutable, deterministic feature registry.
#[derive(Debug, Clone)]
pub struct FeatureRegistry {
    entries: Vec<FeatureId>,
    by_name: HashMap<String, usize>,
    hash: String,
}

impl FeatureRegistry {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FeatureId] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> FeatureId {
        self.entries[index]
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.canonical()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// SHA-256 over the newline-joined canonical names; pins layout.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn family_count(&self, family: Family) -> usize {
        self.entries.iter().filter(|e| e.family == family).count()
    }

    /// Check a persisted hash against this registry's.
    pub fn check_hash(&self, expected: &str) -> Result<()> {
        if self.hash == expected {
            Ok(())
        } else {
            Err(CoreError::RegistryMismatch {
                expected: expected.to_string(),
                got: self.hash.clone(),
            })
        }
    }
}

/// Build the canonical 1556-entry registry.
pub fn build_registry() -> FeatureRegistry {
    let mut entries = Vec::with_capacity(1556);
    for family in Family::ALL {
        let (variants, channels, aggs) = family_layout(family);
        for &variant in variants {
            for &channel in channels {
                for &agg in aggs {
                    entries.push(FeatureId { family, variant, channel, agg });
                }
            }
        }
    }
    let mut by_name = HashMap::with_capacity(entries.len());
    let mut hasher = Sha256::new();
    for (i, e) in entries.iter().enumerate() {
        let name = e.canonical();
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(name.as_bytes());
        let dup = by_name.insert(name, i);
        debug_assert!(dup.is_none(), "duplicate canonical feature name");
    }
    let hash = format!("{:x}", hasher.finalize());
    FeatureRegistry { entries, by_name, hash }
}
