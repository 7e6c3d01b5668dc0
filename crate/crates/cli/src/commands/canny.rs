//! `thermoedge canny`: the conventional baseline detector on one image.

use std::path::Path;

use thermoedge_core::canny::{canny, CannyError, CannyParams};
use thermoedge_core::data::netpbm;

use crate::CliError;

pub fn run(
    input: &Path,
    output: &Path,
    sigma: f64,
    low: f64,
    high: f64,
) -> Result<(), CliError> {
    let params = CannyParams { sigma, low, high };
    let image = netpbm::load_image(input).map_err(|e| CliError::data(e.to_string()))?;
    let edges = canny(&image, &params).map_err(|e| match e {
        CannyError::NonPositiveSigma(_) | CannyError::ThresholdOrder { .. } => {
            CliError::config(e.to_string())
        }
        CannyError::ImageTooSmall { .. } => CliError::data(e.to_string()),
    })?;
    netpbm::save_image(&edges, output).map_err(|e| CliError::data(e.to_string()))?;

    let edge_pixels = edges.pixels().iter().filter(|&&v| v == 1.0).count();
    println!(
        "{} -> {} ({}x{}, {} edge pixels, sigma {sigma}, thresholds {low}/{high})",
        input.display(),
        output.display(),
        edges.width(),
        edges.height(),
        edge_pixels
    );
    Ok(())
}
