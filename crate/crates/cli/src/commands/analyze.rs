//! `thermoedge analyze`: replay a checkpoint's epoch snapshots against an
//! analysis set, producing the dissipation ledger and a task/training
//! summary in bits and joules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use thermoedge_core::checkpoint;
use thermoedge_core::data::{extract_patches, SyntheticPattern, SyntheticPreset};
use thermoedge_core::dissipation::{analyze_network, epoch_ledger, TransitionRecord};
use thermoedge_core::entropy::landauer_energy;
use thermoedge_core::report::{ledger_csv, ACCOUNTING_NOTE};
use thermoedge_core::seeding;
use thermoedge_core::PatchDataset;

use super::{artifact_version, report_meta, to_pretty_json, write_atomic, SPLIT_STREAM};
use crate::config::RunConfig;
use crate::manifest;
use crate::CliError;

/// Published single-pass bound for an ANN implementation of this 64-pixel
/// task, in multiples of kT ln 2. Reported side by side with the measured
/// value; exact reproduction is not expected since the publication fixes
/// neither quantization nor seed.
pub const PUBLISHED_ANN_TASK_BITS: f64 = 2.0574;

#[derive(Serialize, Deserialize)]
pub struct TaskSection {
    pub best_epoch: usize,
    pub bits: f64,
    pub joules: f64,
    /// Published coefficient for the same task, for side-by-side reading.
    pub published_reference_bits: f64,
    pub transitions: Vec<TransitionRecord>,
}

#[derive(Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub epoch_bits: f64,
    pub cumulative_bits: f64,
    pub transitions: Vec<TransitionRecord>,
}

#[derive(Serialize, Deserialize)]
pub struct TrainingSection {
    pub epochs_analyzed: usize,
    pub cumulative_bits: f64,
    pub cumulative_joules: f64,
    pub per_epoch: Vec<EpochRow>,
}

#[derive(Serialize, Deserialize)]
pub struct AnalysisReport {
    pub artifact_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub scheme: String,
    pub note: String,
    pub temperature_kelvin: f64,
    pub joules_per_bit: f64,
    pub config: RunConfig,
    pub task: TaskSection,
    pub training: TrainingSection,
    /// Cumulative training bits divided by single-task bits.
    pub training_to_task_ratio: f64,
}

pub fn synth_dataset(preset_name: &str) -> Result<PatchDataset, CliError> {
    let preset = SyntheticPreset::parse(preset_name).ok_or_else(|| {
        CliError::config(format!(
            "unknown preset {preset_name:?}; expected one of merged, separated, random1, random2, random3"
        ))
    })?;
    let (image, gt) = SyntheticPattern::preset(preset)
        .generate()
        .map_err(|e| CliError::data(e.to_string()))?;
    extract_patches(&image, &gt, preset.name()).map_err(|e| CliError::data(e.to_string()))
}

pub fn run(
    config: &RunConfig,
    checkpoint_path: &Path,
    manifest_path: Option<&Path>,
    synth_preset: Option<&str>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let checkpoint =
        checkpoint::load(checkpoint_path).map_err(|e| CliError::data(e.to_string()))?;
    if checkpoint.topology() != config.topology()? {
        return Err(CliError::config(format!(
            "checkpoint topology {:?} does not match the configured topology",
            checkpoint.topology()
        )));
    }

    let dataset = match (manifest_path, synth_preset) {
        (Some(path), None) => {
            let entries = manifest::parse(path)?;
            manifest::load_analysis_set(
                &entries,
                config.train_images,
                config.val_images,
                seeding::derive(checkpoint.seed, SPLIT_STREAM),
            )?
        }
        (None, Some(name)) => synth_dataset(name)?,
        _ => {
            return Err(CliError::config(
                "analyze needs exactly one of --manifest or --synth".to_string(),
            ))
        }
    };

    let schemes = config.schemes_for(&dataset);
    let ledger = epoch_ledger(
        &checkpoint.history,
        &dataset,
        &schemes,
        config.ledger_epochs,
    )
    .map_err(|e| CliError::data(e.to_string()))?;
    let task_analysis = analyze_network(checkpoint.history.best_network(), &dataset, &schemes)
        .map_err(|e| CliError::data(e.to_string()))?;

    let constants = config.constants();
    let cumulative_bits = ledger.cumulative_bits();
    let report = AnalysisReport {
        artifact_version: artifact_version(),
        config_hash: config.hash(),
        seed: checkpoint.seed,
        scheme: schemes.descriptor(),
        note: ACCOUNTING_NOTE.to_string(),
        temperature_kelvin: constants.temperature,
        joules_per_bit: constants.joules_per_bit(),
        config: config.clone(),
        task: TaskSection {
            best_epoch: checkpoint.history.best_epoch(),
            bits: task_analysis.total_bits,
            joules: landauer_energy(task_analysis.total_bits, &constants),
            published_reference_bits: PUBLISHED_ANN_TASK_BITS,
            transitions: task_analysis.records.clone(),
        },
        training: TrainingSection {
            epochs_analyzed: ledger.entries.len(),
            cumulative_bits,
            cumulative_joules: landauer_energy(cumulative_bits, &constants),
            per_epoch: ledger
                .entries
                .iter()
                .map(|entry| EpochRow {
                    epoch: entry.epoch,
                    epoch_bits: entry.epoch_bits,
                    cumulative_bits: entry.cumulative_bits,
                    transitions: entry.records.clone(),
                })
                .collect(),
        },
        training_to_task_ratio: cumulative_bits / task_analysis.total_bits,
    };

    let meta = report_meta(config, checkpoint.seed, schemes.descriptor());
    write_atomic(
        &out_dir.join("ledger.csv"),
        ledger_csv(&ledger, &meta).as_bytes(),
    )?;
    write_atomic(&out_dir.join("analysis.json"), &to_pretty_json(&report)?)?;

    println!(
        "task bound ({} samples): {:.4} bits = {:.4e} J at {} K (published reference {})",
        dataset.len(),
        report.task.bits,
        report.task.joules,
        constants.temperature,
        PUBLISHED_ANN_TASK_BITS
    );
    println!(
        "training, first {} epochs: {:.4} bits cumulative = {:.4e} J ({:.1}x the task)",
        report.training.epochs_analyzed,
        cumulative_bits,
        report.training.cumulative_joules,
        report.training_to_task_ratio
    );
    println!(
        "wrote {} and {}",
        out_dir.join("ledger.csv").display(),
        out_dir.join("analysis.json").display()
    );
    Ok(())
}
