//! Landauer dissipation accounting for the two information-flow steps of the
//! network: input -> hidden and hidden -> output.
//!
//! Each transition is treated as a deterministic map applied to every sample;
//! the conditional entropy H(X|Y) of its quantized empirical joint measures
//! the information irreversibly erased per pass, in bits (multiples of
//! `k_B T ln 2`). Only forward-pass erasure is accounted; any erasure inside
//! backpropagation itself is out of scope and flagged in report headers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::PatchDataset;
use crate::entropy::{
    EntropyError, JointDistribution, QuantizationScheme, Quantizer, RangePolicy,
};
use crate::nn::{Mlp, NnError, TrainingHistory};

/// Tolerance of the deterministic-map self-check on every record.
pub const SELF_CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DissipationError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("training history has no snapshots")]
    EmptyHistory,
    #[error("reference comparison needs positive bits, got {0}")]
    NonPositiveBits(f64),
    #[error(
        "deterministic-map self-check failed for {transition}: H(X|Y)={h_x_given_y} but \
         H(X)-H(Y)={difference}; the {side} quantization is too coarse to keep the \
         transition a function of its quantized input"
    )]
    SelfCheckFailed {
        transition: &'static str,
        h_x_given_y: f64,
        difference: f64,
        side: &'static str,
    },
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Network(#[from] NnError),
}

/// The two accounted information-flow steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionId {
    InputToHidden,
    HiddenToOutput,
}

impl TransitionId {
    pub fn all() -> [TransitionId; 2] {
        [TransitionId::InputToHidden, TransitionId::HiddenToOutput]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransitionId::InputToHidden => "input_to_hidden",
            TransitionId::HiddenToOutput => "hidden_to_output",
        }
    }
}

/// Quantization choices for the three layer states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSchemes {
    pub input: QuantizationScheme,
    pub hidden: QuantizationScheme,
    pub output: QuantizationScheme,
}

impl Default for AnalysisSchemes {
    fn default() -> Self {
        Self {
            input: QuantizationScheme::Identity,
            hidden: QuantizationScheme::UniformBins {
                bins: 16,
                range: RangePolicy::Observed,
            },
            output: QuantizationScheme::BinaryThreshold { threshold: 0.5 },
        }
    }
}

impl AnalysisSchemes {
    /// Default schemes adapted to the dataset: identity on binary patches,
    /// `input_bins` uniform bins over [0, 1] for gray-scale ones.
    pub fn for_dataset(
        dataset: &PatchDataset,
        input_bins: usize,
        hidden_bins: usize,
        output_threshold: f64,
    ) -> Self {
        let input = if dataset.is_binary() {
            QuantizationScheme::Identity
        } else {
            QuantizationScheme::UniformBins {
                bins: input_bins,
                range: RangePolicy::Fixed { lo: 0.0, hi: 1.0 },
            }
        };
        Self {
            input,
            hidden: QuantizationScheme::UniformBins {
                bins: hidden_bins,
                range: RangePolicy::Observed,
            },
            output: QuantizationScheme::BinaryThreshold {
                threshold: output_threshold,
            },
        }
    }

    /// Canonical descriptor embedded in every report; reports with different
    /// descriptors must never be merged.
    pub fn descriptor(&self) -> String {
        format!(
            "input={};hidden={};output={}",
            self.input.descriptor(),
            self.hidden.descriptor(),
            self.output.descriptor()
        )
    }
}

/// Entropies of one transition over one dataset pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub transition: TransitionId,
    /// Shannon entropy of the quantized input states, bits.
    pub h_x: f64,
    /// Shannon entropy of the quantized output states, bits.
    pub h_y: f64,
    /// Conditional entropy H(X|Y): bits irreversibly erased per pass.
    pub h_x_given_y: f64,
    pub sample_count: usize,
    /// Scheme descriptor for this transition's (X, Y) quantizers.
    pub scheme: String,
}

impl TransitionRecord {
    /// Deviation from the deterministic-map identity
    /// `H(X|Y) = H(X) - H(Y)`. Nonzero beyond rounding means the quantized
    /// output was not a function of the quantized input on this dataset,
    /// i.e. the X-side quantization was too coarse.
    pub fn self_check_residual(&self) -> f64 {
        self.h_x_given_y - (self.h_x - self.h_y)
    }

    /// Whether the transition behaved as a deterministic map after
    /// quantization, to within `tolerance` bits.
    pub fn is_functional(&self, tolerance: f64) -> bool {
        self.self_check_residual().abs() <= tolerance
    }
}

/// Dissipation of a single network over one dataset: both transitions plus
/// their total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDissipation {
    pub records: Vec<TransitionRecord>,
    pub total_bits: f64,
}

/// Erasure of one epoch snapshot and the running total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochDissipation {
    pub epoch: usize,
    pub records: Vec<TransitionRecord>,
    pub epoch_bits: f64,
    pub cumulative_bits: f64,
}

/// Per-epoch dissipation of a training run, evaluated with end-of-epoch
/// weights on a fixed analysis set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationLedger {
    pub scheme: String,
    pub entries: Vec<EpochDissipation>,
}

impl DissipationLedger {
    /// Final cumulative bits over all entries.
    pub fn cumulative_bits(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.cumulative_bits)
    }
}

/// Published architecture-level bounds this artifact compares against, in
/// bits (multiples of `k_B T ln 2`) for the same 64-pixel edge-detection
/// task: a general-purpose von Neumann processor and a special-purpose
/// cellular array processor. Consumed as constants, never recomputed here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBounds {
    pub vnp_bits: f64,
    pub cap_bits: f64,
}

impl Default for ReferenceBounds {
    fn default() -> Self {
        Self {
            vnp_bits: 1856.0,
            cap_bits: 71.0,
        }
    }
}

/// The three-bar comparison: measured network bits against both references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ann_bits: f64,
    pub vnp_bits: f64,
    pub cap_bits: f64,
    /// How many times the von Neumann bound exceeds the measured bound.
    pub ratio_vnp: f64,
    /// How many times the cellular-array bound exceeds the measured bound.
    pub ratio_cap: f64,
}

/// Measures one transition: forwards every patch, quantizes the transition's
/// (X, Y) states, accumulates the joint, and returns its entropies.
///
/// Input -> hidden pairs the input patch with the post-ReLU hidden vector;
/// hidden -> output pairs that vector with the sigmoid output. The returned
/// plug-in entropies are valid for any quantization; whether the transition
/// stayed a deterministic map after quantization is visible through
/// [`TransitionRecord::self_check_residual`] and is enforced on the ledger
/// paths ([`analyze_network`], [`epoch_ledger`]).
pub fn transition_dissipation(
    net: &Mlp,
    dataset: &PatchDataset,
    transition: TransitionId,
    schemes: &AnalysisSchemes,
) -> Result<TransitionRecord, DissipationError> {
    if dataset.is_empty() {
        return Err(DissipationError::EmptyDataset);
    }

    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(dataset.len());
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(dataset.len());
    for index in 0..dataset.len() {
        let trace = net.forward(dataset.patch(index))?;
        match transition {
            TransitionId::InputToHidden => {
                xs.push(trace.input);
                ys.push(trace.hidden_post);
            }
            TransitionId::HiddenToOutput => {
                xs.push(trace.hidden_post);
                ys.push(vec![trace.output]);
            }
        }
    }

    let (scheme_x, scheme_y) = match transition {
        TransitionId::InputToHidden => (&schemes.input, &schemes.hidden),
        TransitionId::HiddenToOutput => (&schemes.hidden, &schemes.output),
    };
    let dims_x = xs[0].len();
    let dims_y = ys[0].len();
    let quantizer_x = Quantizer::resolve(scheme_x, dims_x, xs.iter().map(|v| v.as_slice()))?;
    let quantizer_y = Quantizer::resolve(scheme_y, dims_y, ys.iter().map(|v| v.as_slice()))?;

    let mut joint = JointDistribution::default();
    for (x, y) in xs.iter().zip(&ys) {
        joint.record(quantizer_x.quantize(x)?, quantizer_y.quantize(y)?);
    }

    let h_x = joint.marginal_x().entropy()?;
    let h_y = joint.marginal_y().entropy()?;
    let h_x_given_y = joint.conditional_entropy()?;

    Ok(TransitionRecord {
        transition,
        h_x,
        h_y,
        h_x_given_y,
        sample_count: dataset.len(),
        scheme: format!("x={};y={}", scheme_x.descriptor(), scheme_y.descriptor()),
    })
}

/// Both transition records of one network over one dataset, with the
/// deterministic-map self-check `H(X|Y) = H(X) - H(Y)` enforced at
/// [`SELF_CHECK_TOLERANCE`] on each record. Every report and ledger goes
/// through here, so no published number can silently rest on a quantization
/// too coarse to keep the transitions functional.
pub fn analyze_network(
    net: &Mlp,
    dataset: &PatchDataset,
    schemes: &AnalysisSchemes,
) -> Result<NetworkDissipation, DissipationError> {
    let mut records = Vec::with_capacity(2);
    for transition in TransitionId::all() {
        let record = transition_dissipation(net, dataset, transition, schemes)?;
        if !record.is_functional(SELF_CHECK_TOLERANCE) {
            return Err(DissipationError::SelfCheckFailed {
                transition: transition.name(),
                h_x_given_y: record.h_x_given_y,
                difference: record.h_x - record.h_y,
                side: match transition {
                    TransitionId::InputToHidden => "input",
                    TransitionId::HiddenToOutput => "hidden",
                },
            });
        }
        records.push(record);
    }
    let total_bits = records.iter().map(|r| r.h_x_given_y).sum();
    Ok(NetworkDissipation {
        records,
        total_bits,
    })
}

/// Total bits erased by one inference pass: the sum of H(X|Y) over both
/// transitions.
pub fn inference_dissipation(
    net: &Mlp,
    dataset: &PatchDataset,
    schemes: &AnalysisSchemes,
) -> Result<f64, DissipationError> {
    Ok(analyze_network(net, dataset, schemes)?.total_bits)
}

/// Replays the first `first_n_epochs` snapshots of a training run against
/// `dataset` and accumulates their per-epoch erasure. Asking for more epochs
/// than were trained truncates to the available snapshots.
pub fn epoch_ledger(
    history: &TrainingHistory,
    dataset: &PatchDataset,
    schemes: &AnalysisSchemes,
    first_n_epochs: usize,
) -> Result<DissipationLedger, DissipationError> {
    if history.records().is_empty() {
        return Err(DissipationError::EmptyHistory);
    }
    let n = first_n_epochs.min(history.records().len());
    let mut entries = Vec::with_capacity(n);
    let mut cumulative_bits = 0.0;
    for record in &history.records()[..n] {
        let analysis = analyze_network(&record.snapshot, dataset, schemes)?;
        cumulative_bits += analysis.total_bits;
        entries.push(EpochDissipation {
            epoch: record.epoch,
            records: analysis.records,
            epoch_bits: analysis.total_bits,
            cumulative_bits,
        });
    }
    Ok(DissipationLedger {
        scheme: schemes.descriptor(),
        entries,
    })
}

/// Ratios of the published reference bounds to a measured bound.
pub fn compare_references(ann_bits: f64) -> Result<ComparisonReport, DissipationError> {
    if !(ann_bits > 0.0) {
        return Err(DissipationError::NonPositiveBits(ann_bits));
    }
    let refs = ReferenceBounds::default();
    Ok(ComparisonReport {
        ann_bits,
        vnp_bits: refs.vnp_bits,
        cap_bits: refs.cap_bits,
        ratio_vnp: refs.vnp_bits / ann_bits,
        ratio_cap: refs.cap_bits / ann_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{extract_patches, SyntheticPattern, SyntheticPreset};
    use crate::nn::{he_init, AdamConfig, FitConfig, Mlp, NetworkTopology};

    fn synthetic_dataset() -> PatchDataset {
        let (image, gt) = SyntheticPattern::preset(SyntheticPreset::Separated)
            .generate()
            .unwrap();
        extract_patches(&image, &gt, "separated").unwrap()
    }

    #[test]
    fn zero_first_layer_erases_all_input_entropy() {
        // All-zero w1 makes the hidden state constant: H(Y) = 0, so
        // everything the input carried is erased.
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        let dataset = synthetic_dataset();
        let record = transition_dissipation(
            &net,
            &dataset,
            TransitionId::InputToHidden,
            &AnalysisSchemes::default(),
        )
        .unwrap();
        assert_eq!(record.h_y, 0.0);
        assert!(record.h_x > 0.0);
        assert!((record.h_x_given_y - record.h_x).abs() < 1e-12);
    }

    #[test]
    fn injective_transition_erases_nothing() {
        // A generic random net keeps distinct patches distinct in the
        // 16-bin hidden quantization on this small dataset.
        let net = he_init(NetworkTopology::default(), 42).unwrap();
        let dataset = synthetic_dataset();
        let record = transition_dissipation(
            &net,
            &dataset,
            TransitionId::InputToHidden,
            &AnalysisSchemes::default(),
        )
        .unwrap();
        assert!(record.h_x_given_y.abs() < 1e-12);
        assert!((record.h_x - record.h_y).abs() < 1e-12);
    }

    #[test]
    fn records_satisfy_deterministic_map_identity() {
        let dataset = synthetic_dataset();
        for seed in [1, 2, 3, 4, 5] {
            let net = he_init(NetworkTopology::default(), seed).unwrap();
            for transition in TransitionId::all() {
                let record = transition_dissipation(
                    &net,
                    &dataset,
                    transition,
                    &AnalysisSchemes::default(),
                )
                .unwrap();
                assert!(
                    (record.h_x_given_y - (record.h_x - record.h_y)).abs() <= SELF_CHECK_TOLERANCE
                );
                assert!(record.h_x_given_y >= 0.0);
                assert!(record.h_x_given_y <= record.h_x + 1e-12);
            }
        }
    }

    #[test]
    fn hidden_entropy_is_consistent_across_transitions() {
        let net = he_init(NetworkTopology::default(), 7).unwrap();
        let dataset = synthetic_dataset();
        let schemes = AnalysisSchemes::default();
        let t1 =
            transition_dissipation(&net, &dataset, TransitionId::InputToHidden, &schemes).unwrap();
        let t2 =
            transition_dissipation(&net, &dataset, TransitionId::HiddenToOutput, &schemes).unwrap();
        // The hidden state is Y of the first transition and X of the second;
        // both passes resolve the same observed ranges over the same data.
        assert_eq!(t1.h_y.to_bits(), t2.h_x.to_bits());
    }

    #[test]
    fn total_is_sum_of_transitions() {
        let net = he_init(NetworkTopology::default(), 11).unwrap();
        let dataset = synthetic_dataset();
        let analysis = analyze_network(&net, &dataset, &AnalysisSchemes::default()).unwrap();
        assert_eq!(analysis.records.len(), 2);
        let sum: f64 = analysis.records.iter().map(|r| r.h_x_given_y).sum();
        assert_eq!(analysis.total_bits, sum);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        assert!(matches!(
            inference_dissipation(&net, &PatchDataset::default(), &AnalysisSchemes::default()),
            Err(DissipationError::EmptyDataset)
        ));
    }

    fn short_history(epochs: usize, seed: u64) -> (TrainingHistory, PatchDataset) {
        let dataset = synthetic_dataset();
        let mut net = he_init(NetworkTopology::default(), seed).unwrap();
        let config = FitConfig {
            batch_size: 8,
            max_epochs: epochs,
            patience: epochs,
            adam: AdamConfig::default(),
            seed,
        };
        let history = crate::nn::fit(&mut net, &dataset, &dataset, &config).unwrap();
        (history, dataset)
    }

    #[test]
    fn ledger_accumulates_and_truncates() {
        let (history, dataset) = short_history(4, 3);
        let schemes = AnalysisSchemes::default();
        let ledger = epoch_ledger(&history, &dataset, &schemes, 10).unwrap();
        assert_eq!(ledger.entries.len(), 4); // truncated to available epochs

        let mut running = 0.0;
        let mut last = f64::NEG_INFINITY;
        for entry in &ledger.entries {
            running += entry.epoch_bits;
            assert!((entry.cumulative_bits - running).abs() < 1e-9);
            assert!(entry.cumulative_bits >= last);
            last = entry.cumulative_bits;
        }
        assert!((ledger.cumulative_bits() - running).abs() < 1e-9);
    }

    #[test]
    fn single_epoch_ledger_equals_single_inference() {
        let (history, dataset) = short_history(3, 5);
        let schemes = AnalysisSchemes::default();
        let ledger = epoch_ledger(&history, &dataset, &schemes, 1).unwrap();
        assert_eq!(ledger.entries.len(), 1);
        let direct =
            inference_dissipation(&history.records()[0].snapshot, &dataset, &schemes).unwrap();
        assert_eq!(ledger.entries[0].epoch_bits, direct);
        assert_eq!(ledger.entries[0].cumulative_bits, direct);
    }

    #[test]
    fn identical_snapshots_scale_linearly() {
        let (history, dataset) = short_history(1, 9);
        let record = history.records()[0].clone();
        let mut records = Vec::new();
        for epoch in 1..=5 {
            let mut copy = record.clone();
            copy.epoch = epoch;
            records.push(copy);
        }
        let frozen = TrainingHistory::new(records);
        let schemes = AnalysisSchemes::default();
        let ledger = epoch_ledger(&frozen, &dataset, &schemes, 5).unwrap();
        let per_epoch = ledger.entries[0].epoch_bits;
        assert!((ledger.cumulative_bits() - 5.0 * per_epoch).abs() < 1e-9);
    }

    #[test]
    fn reference_ratios_reproduce_published_comparison() {
        let report = compare_references(2.0574).unwrap();
        assert!((report.ratio_vnp - 902.1).abs() / 902.1 < 0.005, "{}", report.ratio_vnp);
        assert!((report.ratio_cap - 34.51).abs() / 34.51 < 0.005, "{}", report.ratio_cap);
    }

    #[test]
    fn reference_ratios_are_one_at_the_bounds() {
        assert_eq!(compare_references(71.0).unwrap().ratio_cap, 1.0);
        assert_eq!(compare_references(1856.0).unwrap().ratio_vnp, 1.0);
    }

    #[test]
    fn comparison_rejects_non_positive_bits() {
        assert!(matches!(
            compare_references(0.0),
            Err(DissipationError::NonPositiveBits(_))
        ));
        assert!(matches!(
            compare_references(-1.0),
            Err(DissipationError::NonPositiveBits(_))
        ));
    }

    #[test]
    fn scheme_descriptor_is_embedded() {
        let schemes = AnalysisSchemes::default();
        assert_eq!(
            schemes.descriptor(),
            "input=identity;hidden=bins(16,observed);output=threshold(0.5)"
        );
        let (history, dataset) = short_history(1, 2);
        let ledger = epoch_ledger(&history, &dataset, &schemes, 1).unwrap();
        assert_eq!(ledger.scheme, schemes.descriptor());
    }
}
