//! `thermoedge synth`: train one network per synthetic pattern from an
//! identical seed and initialization, ledger each run, and rank the patterns
//! by cumulative erasure.
//!
//! Each preset trains on its own 36 patches (validation = training set;
//! early stopping is disabled so every run contributes the full ledger
//! window). `--epochs` sets both the training length and the ledger length.

use std::path::Path;

use serde::{Deserialize, Serialize};

use thermoedge_core::data::{extract_patches, SyntheticPattern, SyntheticPreset};
use thermoedge_core::dissipation::{analyze_network, epoch_ledger};
use thermoedge_core::nn::{fit, he_init, FitConfig};
use thermoedge_core::report::{ledger_csv, synth_summary_csv, PresetSummaryRow, ACCOUNTING_NOTE};

use super::{artifact_version, report_meta, to_pretty_json, write_atomic};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize, Deserialize)]
struct SynthSummary {
    artifact_version: String,
    config_hash: String,
    seed: u64,
    scheme: String,
    note: String,
    epochs: usize,
    config: RunConfig,
    /// Sorted by cumulative bits, ascending.
    rows: Vec<PresetSummaryRow>,
}

pub fn run(config: &RunConfig, preset_names: &[String], out_dir: &Path) -> Result<(), CliError> {
    if preset_names.len() < 2 {
        return Err(CliError::config(format!(
            "synth compares patterns, give at least 2 presets (got {})",
            preset_names.len()
        )));
    }
    let mut presets = Vec::with_capacity(preset_names.len());
    for name in preset_names {
        let preset = SyntheticPreset::parse(name).ok_or_else(|| {
            CliError::config(format!(
                "unknown preset {name:?}; expected merged, separated, random1, random2 or random3"
            ))
        })?;
        if presets.contains(&preset) {
            return Err(CliError::config(format!("preset {name:?} given twice")));
        }
        presets.push(preset);
    }

    let topology = config.topology()?;
    let epochs = config.ledger_epochs;
    let mut rows = Vec::with_capacity(presets.len());
    let mut scheme_descriptor = String::new();

    for preset in &presets {
        let pattern = SyntheticPattern::preset(*preset);
        let (image, gt) = pattern.generate().map_err(|e| CliError::data(e.to_string()))?;
        let dataset = extract_patches(&image, &gt, preset.name())
            .map_err(|e| CliError::data(e.to_string()))?;

        // Identical initialization and shuffle seed across presets.
        let mut net =
            he_init(topology, config.seed).map_err(|e| CliError::config(e.to_string()))?;
        let fit_config = FitConfig {
            batch_size: config.batch_size,
            max_epochs: epochs,
            patience: epochs,
            adam: config.adam(),
            seed: config.seed,
        };
        let history = fit(&mut net, &dataset, &dataset, &fit_config)
            .map_err(|e| CliError::data(e.to_string()))?;

        let schemes = config.schemes_for(&dataset);
        scheme_descriptor = schemes.descriptor();
        let ledger = epoch_ledger(&history, &dataset, &schemes, epochs)
            .map_err(|e| CliError::data(e.to_string()))?;
        let task = analyze_network(history.best_network(), &dataset, &schemes)
            .map_err(|e| CliError::data(e.to_string()))?;

        let meta = report_meta(config, config.seed, schemes.descriptor());
        write_atomic(
            &out_dir.join(format!("synth_{}_ledger.csv", preset.name())),
            ledger_csv(&ledger, &meta).as_bytes(),
        )?;

        rows.push(PresetSummaryRow {
            preset: preset.name().to_string(),
            mean_pairwise_separation: pattern
                .mean_pairwise_separation()
                .map_err(|e| CliError::data(e.to_string()))?,
            task_bits: task.total_bits,
            cumulative_bits: ledger.cumulative_bits(),
        });
    }

    rows.sort_by(|a, b| {
        a.cumulative_bits
            .total_cmp(&b.cumulative_bits)
            .then_with(|| a.preset.cmp(&b.preset))
    });

    let meta = report_meta(config, config.seed, scheme_descriptor.clone());
    write_atomic(
        &out_dir.join("synth_summary.csv"),
        synth_summary_csv(&rows, &meta).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("synth_summary.json"),
        &to_pretty_json(&SynthSummary {
            artifact_version: artifact_version(),
            config_hash: config.hash(),
            seed: config.seed,
            scheme: scheme_descriptor,
            note: ACCOUNTING_NOTE.to_string(),
            epochs,
            config: config.clone(),
            rows: rows.clone(),
        })?,
    )?;

    println!("preset ranking over {epochs} epochs (seed {}):", config.seed);
    for row in &rows {
        println!(
            "  {:<10} separation {:>6.3} px  task {:>7.4} bits  cumulative {:>8.4} bits",
            row.preset, row.mean_pairwise_separation, row.task_bits, row.cumulative_bits
        );
    }
    println!(
        "wrote per-preset ledgers and {} / {}",
        out_dir.join("synth_summary.csv").display(),
        out_dir.join("synth_summary.json").display()
    );
    Ok(())
}
