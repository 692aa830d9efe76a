//! Run configuration and the per-command manifest. Every command writes
//! a manifest embedding the effective configuration and the SHA-256 of
//! each file it read and wrote, so a run can be audited and replayed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use prefault_core::io::{save_json, sha256_file};
use prefault_core::synth::WindowSpec;

use crate::failure::{Failure, Result};

/// Run-wide parameters. A JSON config file mirrors this struct; command
/// flags override single fields; `PREFAULT_OUT_DIR` overrides `out_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Master seed: synthesis, fold shuffling, forests, subset draws.
    pub seed: u64,
    pub sample_rate_hz: f64,
    pub fundamental_hz: f64,
    /// Samples per recorded window.
    pub window_samples: usize,
    /// Fault-prediction label horizon, hours.
    pub horizon_hours: i64,
    /// Features eliminated per RFE round.
    pub rfe_step: usize,
    /// Random subsets drawn by the correlation study.
    pub subset_study_count: usize,
    /// Windows recorded per hour.
    pub cadence_per_hour: u32,
    /// Base directory for outputs when `--out` is not given.
    pub out_dir: PathBuf,
    /// How the train and test periods relate; recorded, not interpreted.
    pub station_split: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            sample_rate_hz: 4000.0,
            fundamental_hz: 50.0,
            window_samples: 2000,
            horizon_hours: 168,
            rfe_step: 40,
            subset_study_count: 100,
            cadence_per_hour: 4,
            out_dir: PathBuf::from("."),
            station_split: "single synthetic station, disjoint train and test periods".into(),
        }
    }
}

impl RunConfig {
    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            samples: self.window_samples,
            sample_rate_hz: self.sample_rate_hz,
            fundamental_hz: self.fundamental_hz,
        }
    }
}

/// Load the config file if given, then apply environment overrides.
pub fn load(path: Option<&Path>) -> Result<RunConfig> {
    let mut config: RunConfig = match path {
        Some(p) => prefault_core::io::load_json(p).map_err(|e| Failure::at(p, e))?,
        None => RunConfig::default(),
    };
    if let Some(dir) = std::env::var_os("PREFAULT_OUT_DIR") {
        config.out_dir = PathBuf::from(dir);
    }
    Ok(config)
}

/// One command's provenance record: what ran, under which effective
/// configuration, over which exact input and output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    /// Path as given on the command line, to SHA-256 of the file read.
    pub inputs: BTreeMap<String, String>,
    /// Output path to SHA-256 of the file written.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config: config.clone(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let hash = sha256_file(path).map_err(|e| Failure::at(path, e))?;
        self.inputs.insert(path.display().to_string(), hash);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        let hash = sha256_file(path).map_err(|e| Failure::at(path, e))?;
        self.outputs.insert(path.display().to_string(), hash);
        Ok(())
    }

    /// Write `<command>.manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.manifest.json", self.command));
        save_json(&path, self).map_err(|e| Failure::at(&path, e))?;
        Ok(path)
    }
}

/// Resolve a command's output directory and make sure it exists.
pub fn out_dir(config: &mut RunConfig, flag: Option<PathBuf>) -> Result<PathBuf> {
    if let Some(dir) = flag {
        config.out_dir = dir;
    }
    let dir = config.out_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Failure::at(&dir, e))?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_recording_standard() {
        let c = RunConfig::default();
        assert_eq!(c.seed, 42);
        assert_eq!(c.sample_rate_hz, 4000.0);
        assert_eq!(c.window_samples, 2000);
        assert_eq!(c.horizon_hours, 168);
        assert_eq!(c.window_spec().duration_s(), 0.5);
    }

    #[test]
    fn partial_config_files_fill_from_defaults() {
        let dir = std::env::temp_dir().join("prefault-cli-config");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("partial.json");
        std::fs::write(&p, r#"{"seed": 7, "horizon_hours": 24}"#).unwrap();
        let c = load(Some(&p)).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.horizon_hours, 24);
        assert_eq!(c.rfe_step, RunConfig::default().rfe_step);
    }
}
