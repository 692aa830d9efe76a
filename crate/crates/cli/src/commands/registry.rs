//! `prefault registry`: dump the feature registry, or cut a family out
//! of it as a selected-feature set for masked extraction.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use prefault_core::features::registry::{build_registry, Family};
use prefault_core::io::{save_json, SelectedFeatures};

use crate::config::{self, RunConfig, RunManifest};
use crate::failure::{Failure, Result};

#[derive(Args)]
pub struct RegistryArgs {
    /// Emit a selected-feature set for one family instead of the dump
    /// (fft_harmonic, thd, phase_diff, cycle_stat, sym_component,
    /// impedance, power, whole_window, swt).
    #[arg(long)]
    pub family: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct RegistryDump {
    hash: String,
    features: usize,
    families: Vec<FamilyCount>,
    entries: Vec<EntryDump>,
}

#[derive(Serialize, Deserialize)]
struct FamilyCount {
    family: String,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct EntryDump {
    id: usize,
    name: String,
    family: String,
}

pub fn run(args: RegistryArgs, mut config: RunConfig) -> Result<()> {
    let dir = config::out_dir(&mut config, args.out)?;
    let registry = build_registry();
    let mut manifest = RunManifest::new("registry", &config);

    match args.family {
        Some(name) => {
            let family = *Family::ALL
                .iter()
                .find(|f| f.as_str() == name)
                .ok_or_else(|| Failure::Usage(format!("unknown feature family {name:?}")))?;
            let ids: Vec<usize> = registry
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.family == family)
                .map(|(i, _)| i)
                .collect();
            let selected =
                SelectedFeatures { ids, registry_hash: registry.hash().to_string() };
            let path = dir.join(format!("selected_{name}.json"));
            save_json(&path, &selected).map_err(|e| Failure::at(&path, e))?;
            manifest.output(&path)?;
            manifest.save(&dir)?;
            println!(
                "{} {name} features -> {}",
                selected.ids.len(),
                path.display()
            );
        }
        None => {
            let dump = RegistryDump {
                hash: registry.hash().to_string(),
                features: registry.len(),
                families: Family::ALL
                    .iter()
                    .map(|&f| FamilyCount {
                        family: f.as_str().to_string(),
                        count: registry.family_count(f),
                    })
                    .collect(),
                entries: registry
                    .entries()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| EntryDump {
                        id: i,
                        name: e.canonical(),
                        family: e.family.as_str().to_string(),
                    })
                    .collect(),
            };
            let path = dir.join("registry.json");
            save_json(&path, &dump).map_err(|e| Failure::at(&path, e))?;
            manifest.output(&path)?;
            manifest.save(&dir)?;
            println!("{} features, hash {} -> {}", dump.features, dump.hash, path.display());
        }
    }
    Ok(())
}
