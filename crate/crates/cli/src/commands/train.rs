//! `thermoedge train`: fit the network on a manifest's images and persist
//! the full per-epoch history.

use std::path::Path;

use serde::Serialize;

use thermoedge_core::checkpoint::{self, Checkpoint};
use thermoedge_core::nn::he_init;
use thermoedge_core::report::training_curve_csv;
use thermoedge_core::seeding;

use super::{report_meta, to_pretty_json, write_atomic, SPLIT_STREAM};
use crate::config::RunConfig;
use crate::manifest;
use crate::CliError;

#[derive(Serialize)]
struct ConfigFile<'a> {
    artifact_version: String,
    config_hash: String,
    config: &'a RunConfig,
}

pub fn run(config: &RunConfig, manifest_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let entries = manifest::parse(manifest_path)?;
    if entries.len() < 2 {
        return Err(CliError::config(format!(
            "manifest resolves to {} image(s), need at least 2",
            entries.len()
        )));
    }

    let split_seed = seeding::derive(config.seed, SPLIT_STREAM);
    let (train, val) = manifest::load_datasets(
        &entries,
        config.train_images,
        config.val_images,
        split_seed,
    )?;
    println!(
        "dataset: {} training / {} validation patches from {} images",
        train.len(),
        val.len(),
        entries.len()
    );

    let mut net = he_init(config.topology()?, config.seed)
        .map_err(|e| CliError::config(e.to_string()))?;
    let history = thermoedge_core::nn::fit(&mut net, &train, &val, &config.fit_config())
        .map_err(|e| CliError::data(e.to_string()))?;

    let stopped = history.stopped_epoch();
    if stopped < config.max_epochs {
        println!(
            "early stopping at epoch {stopped}: validation MSE had not improved for {} epochs",
            config.patience
        );
    } else {
        println!("completed all {} epochs", config.max_epochs);
    }
    println!(
        "best validation epoch {} (val MSE {:.6})",
        history.best_epoch(),
        history.records()[history.best_epoch() - 1].val_mse
    );

    let scheme = config.schemes_for(&train).descriptor();
    let meta = report_meta(config, config.seed, scheme);

    let checkpoint = Checkpoint::new(config.seed, history);
    write_atomic(
        &out_dir.join("checkpoint.txt"),
        checkpoint::to_string(&checkpoint).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("training_curve.csv"),
        training_curve_csv(&checkpoint.history, &meta).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("run_config.json"),
        &to_pretty_json(&ConfigFile {
            artifact_version: super::artifact_version(),
            config_hash: config.hash(),
            config,
        })?,
    )?;

    println!(
        "wrote {}, {}, {}",
        out_dir.join("checkpoint.txt").display(),
        out_dir.join("training_curve.csv").display(),
        out_dir.join("run_config.json").display()
    );
    Ok(())
}
