//! Core algorithms for training a small edge-detecting MLP and accounting for
//! the information it irreversibly erases while doing so.
//!
//! The crate has five largely independent pieces:
//!
//! - [`nn`] — a from-scratch 9-12-1 feedforward network (ReLU hidden layer,
//!   sigmoid output) with hand-derived backpropagation, Adam, mini-batch
//!   training and early stopping.
//! - [`entropy`] — quantization of layer states into discrete symbols, sparse
//!   empirical distributions over them, and plug-in Shannon / conditional
//!   entropies plus the Landauer energy conversion.
//! - [`dissipation`] — per-transition erasure records, per-epoch cumulative
//!   training ledgers, and comparison against published reference bounds for
//!   von Neumann and cellular-array processors.
//! - [`data`] — netpbm image I/O, 3x3 patch extraction with edge labels,
//!   image-granular train/validation splitting, and the seeded 8x8 synthetic
//!   pattern generator.
//! - [`canny`] — a classical Canny detector used as the conventional baseline.
//!
//! Everything is deterministic given a seed: RNG streams are derived with
//! [`seeding::derive`], count tables are ordered maps, and report
//! serialization uses stable formatting, so repeated runs produce
//! byte-identical artifacts.

pub mod canny;
pub mod checkpoint;
pub mod data;
pub mod dissipation;
pub mod entropy;
pub mod nn;
pub mod report;
pub mod seeding;

pub use canny::{
    canny, gaussian_blur, non_maximum_suppression, sobel_gradients, CannyError, CannyParams,
    DirectionBin, GradientField,
};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use data::{
    extract_patches, generate_synthetic, split_by_image, synthetic_ground_truth, DataError, Image,
    PatchDataset, SampleSource, SyntheticPattern, SyntheticPreset,
};
pub use dissipation::{
    analyze_network, compare_references, epoch_ledger, inference_dissipation,
    transition_dissipation, AnalysisSchemes, ComparisonReport, DissipationError, DissipationLedger,
    EpochDissipation, NetworkDissipation, ReferenceBounds, TransitionId, TransitionRecord,
    SELF_CHECK_TOLERANCE,
};
pub use entropy::{
    landauer_energy, Distribution, EntropyError, JointDistribution, PhysicalConstants,
    QuantizationScheme, Quantizer, RangePolicy, StateSymbol, BOLTZMANN_CONSTANT,
};
pub use nn::{
    backward, evaluate_mse, fit, he_init, mean_mse, mse_loss, predict_edge_map, train_epoch,
    AdamConfig, AdamState, EpochRecord, FitConfig, ForwardTrace, Gradients, Mlp, NetworkTopology,
    NnError, TrainingHistory,
};
pub use report::{
    ledger_csv, synth_summary_csv, training_curve_csv, PresetSummaryRow, ReportMeta,
    ACCOUNTING_NOTE,
};
