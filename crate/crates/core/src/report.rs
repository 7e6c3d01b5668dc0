//! Stable CSV serialization of ledgers and training curves.
//!
//! Every file opens with `#`-prefixed metadata lines (artifact version,
//! config hash, seed, scheme descriptor, accounting note) followed by a
//! header row and data rows. Nothing time- or path-dependent is embedded, so
//! identical runs produce byte-identical files. Bits use shortest
//! round-trip decimal formatting; joules use scientific notation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dissipation::DissipationLedger;
use crate::nn::TrainingHistory;

/// Accounting caveat carried in every dissipation report.
pub const ACCOUNTING_NOTE: &str =
    "forward-pass transition erasure only; backward-pass erasure is not modeled";

/// Metadata stamped into every emitted file.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub artifact_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub scheme: String,
}

impl ReportMeta {
    fn comment_block(&self) -> String {
        format!(
            "# artifact_version={}\n# config_hash={}\n# seed={}\n# scheme={}\n# note={}\n",
            self.artifact_version, self.config_hash, self.seed, self.scheme, ACCOUNTING_NOTE
        )
    }
}

/// Ledger CSV: one row per (epoch, transition).
pub fn ledger_csv(ledger: &DissipationLedger, meta: &ReportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("epoch,transition,h_x_bits,h_y_bits,h_x_given_y_bits,epoch_bits,cumulative_bits\n");
    for entry in &ledger.entries {
        for record in &entry.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                entry.epoch,
                record.transition.name(),
                record.h_x,
                record.h_y,
                record.h_x_given_y,
                entry.epoch_bits,
                entry.cumulative_bits
            );
        }
    }
    out
}

/// Training curve CSV: one row per completed epoch.
pub fn training_curve_csv(history: &TrainingHistory, meta: &ReportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("epoch,train_mse,val_mse\n");
    for record in history.records() {
        let _ = writeln!(out, "{},{},{}", record.epoch, record.train_mse, record.val_mse);
    }
    out
}

/// One row per synthetic preset for the ordering summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetSummaryRow {
    pub preset: String,
    pub mean_pairwise_separation: f64,
    pub task_bits: f64,
    pub cumulative_bits: f64,
}

/// Summary CSV of the synthetic-pattern experiment, rows as given (callers
/// sort by cumulative bits).
pub fn synth_summary_csv(rows: &[PresetSummaryRow], meta: &ReportMeta) -> String {
    let mut out = meta.comment_block();
    out.push_str("preset,mean_pairwise_separation,task_bits,cumulative_bits\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.preset, row.mean_pairwise_separation, row.task_bits, row.cumulative_bits
        );
    }
    out
}
