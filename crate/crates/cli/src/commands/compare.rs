//! `thermoedge compare`: measured bound against the published von Neumann
//! and cellular-array bounds, as the three-bar dataset.

use std::path::Path;

use serde::{Deserialize, Serialize};

use thermoedge_core::dissipation::compare_references;
use thermoedge_core::entropy::landauer_energy;

use super::{artifact_version, to_pretty_json, write_atomic};
use crate::commands::analyze::AnalysisReport;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize, Deserialize)]
struct Bar {
    label: String,
    bits: f64,
    joules: f64,
}

#[derive(Serialize, Deserialize)]
struct ComparisonFile {
    artifact_version: String,
    config_hash: String,
    temperature_kelvin: f64,
    ann_bits: f64,
    vnp_bits: f64,
    cap_bits: f64,
    ratio_vnp: f64,
    ratio_cap: f64,
    /// Plot input for the architecture comparison chart.
    bars: Vec<Bar>,
}

pub fn run(
    config: &RunConfig,
    bits: Option<f64>,
    summary: Option<&Path>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let ann_bits = match (bits, summary) {
        (Some(value), None) => value,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
            let report: AnalysisReport = serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("cannot parse {}: {e}", path.display())))?;
            report.task.bits
        }
        _ => {
            return Err(CliError::config(
                "compare needs exactly one of --bits or --summary".to_string(),
            ))
        }
    };

    let report = compare_references(ann_bits).map_err(|e| CliError::config(e.to_string()))?;
    let constants = config.constants();
    let file = ComparisonFile {
        artifact_version: artifact_version(),
        config_hash: config.hash(),
        temperature_kelvin: constants.temperature,
        ann_bits: report.ann_bits,
        vnp_bits: report.vnp_bits,
        cap_bits: report.cap_bits,
        ratio_vnp: report.ratio_vnp,
        ratio_cap: report.ratio_cap,
        bars: vec![
            Bar {
                label: "vnp".to_string(),
                bits: report.vnp_bits,
                joules: landauer_energy(report.vnp_bits, &constants),
            },
            Bar {
                label: "cap".to_string(),
                bits: report.cap_bits,
                joules: landauer_energy(report.cap_bits, &constants),
            },
            Bar {
                label: "ann".to_string(),
                bits: report.ann_bits,
                joules: landauer_energy(report.ann_bits, &constants),
            },
        ],
    };

    write_atomic(&out_dir.join("comparison.json"), &to_pretty_json(&file)?)?;

    println!(
        "ann {:.4} bits | cap {} bits ({:.1}x ann) | vnp {} bits ({:.1}x ann)",
        report.ann_bits, report.cap_bits, report.ratio_cap, report.vnp_bits, report.ratio_vnp
    );
    println!("wrote {}", out_dir.join("comparison.json").display());
    Ok(())
}
