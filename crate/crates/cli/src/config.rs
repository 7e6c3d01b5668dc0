//! Resolved run configuration: every knob of the pipeline in one
//! serializable struct, embedded (with its hash) in every report.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use thermoedge_core::dissipation::AnalysisSchemes;
use thermoedge_core::entropy::PhysicalConstants;
use thermoedge_core::nn::{AdamConfig, FitConfig, NetworkTopology};
use thermoedge_core::PatchDataset;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub input_size: usize,
    pub hidden_size: usize,
    pub output_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Uniform bins per pixel for gray-scale inputs (binary inputs use the
    /// identity scheme).
    pub input_bins: usize,
    /// Uniform bins per hidden neuron over its observed range.
    pub hidden_bins: usize,
    /// Output binarization threshold.
    pub output_threshold: f64,
    pub temperature_kelvin: f64,
    /// Epochs covered by the cumulative dissipation ledger.
    pub ledger_epochs: usize,
    /// Image-granular split sizes for manifests with `auto` roles.
    pub train_images: usize,
    pub val_images: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            input_size: 9,
            hidden_size: 12,
            output_size: 1,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 128,
            max_epochs: 100,
            patience: 5,
            input_bins: 8,
            hidden_bins: 16,
            output_threshold: 0.5,
            temperature_kelvin: 300.0,
            ledger_epochs: 10,
            train_images: 16,
            val_images: 4,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::config(format!("invalid config: {what}")))
            }
        };
        check(self.input_size == 9, "input_size must be 9 (3x3 patches)")?;
        check(self.hidden_size >= 1, "hidden_size must be at least 1")?;
        check(self.output_size == 1, "output_size must be 1")?;
        check(self.learning_rate > 0.0, "learning_rate must be positive")?;
        check((0.0..1.0).contains(&self.beta1), "beta1 must be in [0, 1)")?;
        check((0.0..1.0).contains(&self.beta2), "beta2 must be in [0, 1)")?;
        check(self.epsilon > 0.0, "epsilon must be positive")?;
        check(self.batch_size >= 1, "batch_size must be at least 1")?;
        check(self.max_epochs >= 1, "max_epochs must be at least 1")?;
        check(self.patience >= 1, "patience must be at least 1")?;
        check(self.input_bins >= 2, "input_bins must be at least 2")?;
        check(self.hidden_bins >= 2, "hidden_bins must be at least 2")?;
        check(
            self.output_threshold.is_finite(),
            "output_threshold must be finite",
        )?;
        check(
            self.temperature_kelvin > 0.0,
            "temperature_kelvin must be positive",
        )?;
        check(self.ledger_epochs >= 1, "ledger_epochs must be at least 1")?;
        check(self.val_images >= 1, "val_images must be at least 1")?;
        check(self.train_images >= 1, "train_images must be at least 1")?;
        Ok(())
    }

    /// Short hex digest of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn topology(&self) -> Result<NetworkTopology, CliError> {
        NetworkTopology::new(self.input_size, self.hidden_size, self.output_size)
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            patience: self.patience,
            adam: self.adam(),
            seed: self.seed,
        }
    }

    pub fn schemes_for(&self, dataset: &PatchDataset) -> AnalysisSchemes {
        AnalysisSchemes::for_dataset(
            dataset,
            self.input_bins,
            self.hidden_bins,
            self.output_threshold,
        )
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::with_temperature(self.temperature_kelvin)
    }
}

/// Flag/env overrides applied on top of a config file (or the defaults).
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub scheme_bins: Option<usize>,
    pub temperature: Option<f64>,
    /// `train`/`synth` read this as max_epochs, `analyze` as ledger_epochs.
    pub epochs: Option<usize>,
}

/// Loads the config file if given, then applies overrides and validates.
pub fn resolve(
    config_path: Option<&std::path::Path>,
    overrides: &Overrides,
    epochs_into_ledger: bool,
) -> Result<RunConfig, CliError> {
    let mut config = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::config(format!("cannot parse config {}: {e}", path.display()))
            })?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(bins) = overrides.scheme_bins {
        config.hidden_bins = bins;
    }
    if let Some(t) = overrides.temperature {
        config.temperature_kelvin = t;
    }
    if let Some(epochs) = overrides.epochs {
        if epochs_into_ledger {
            config.ledger_epochs = epochs;
        } else {
            config.max_epochs = epochs;
        }
    }
    config.validate()?;
    Ok(config)
}
