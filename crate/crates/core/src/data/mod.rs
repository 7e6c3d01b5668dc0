//! Images, 3x3 patch datasets, and train/validation splitting.
//!
//! Pixel convention: intensities live in `[0, 1]` with `0.0` = black and
//! `1.0` = white. Edge maps are masks with `1.0` = edge, `0.0` = non-edge
//! (edges render white-on-black when saved).

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub mod netpbm;
mod synthetic;

pub use synthetic::{generate_synthetic, synthetic_ground_truth, SyntheticPattern, SyntheticPreset};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("image buffer holds {actual} values, expected {expected} for {width}x{height}")]
    PixelCountMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("pixel value {value} at index {index} is outside [0, 1]")]
    PixelOutOfRange { index: usize, value: f64 },
    #[error("image is {width}x{height}, need at least 3x3")]
    ImageTooSmall { width: usize, height: usize },
    #[error("image is {image_width}x{image_height} but ground truth is {gt_width}x{gt_height}")]
    DimensionMismatch {
        image_width: usize,
        image_height: usize,
        gt_width: usize,
        gt_height: usize,
    },
    #[error("expected a binary image, found value {value} at index {index}")]
    NotBinary { index: usize, value: f64 },
    #[error("split needs at least {needed} images, got {available}")]
    NotEnoughImages { needed: usize, available: usize },
    #[error("split got {available} images but accounts for at most {maximum}")]
    TooManyImages { available: usize, maximum: usize },
    #[error("could not place {squares} non-overlapping squares in {attempts} attempts")]
    PlacementFailed { squares: usize, attempts: usize },
    #[error("square of size {size} at ({row}, {col}) exceeds a {image_size}x{image_size} image")]
    SquareOutOfBounds {
        row: usize,
        col: usize,
        size: usize,
        image_size: usize,
    },
}

/// A grayscale image with row-major pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, DataError> {
        let expected = width * height;
        if pixels.len() != expected {
            return Err(DataError::PixelCountMismatch {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        for (index, &value) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(DataError::PixelOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// An image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!((0.0..=1.0).contains(&value), "fill value outside [0, 1]");
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!((0.0..=1.0).contains(&value), "pixel value outside [0, 1]");
        debug_assert!(row < self.height && col < self.width);
        self.pixels[row * self.width + col] = value;
    }

    /// True when every pixel is exactly 0.0 or 1.0.
    pub fn is_binary(&self) -> bool {
        self.pixels.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// First pixel that is neither 0.0 nor 1.0, if any.
    pub(crate) fn first_non_binary(&self) -> Option<(usize, f64)> {
        self.pixels
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 0.0 && v != 1.0)
            .map(|(i, &v)| (i, v))
    }
}

/// Where a sample came from: source image id plus the window center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSource {
    pub image: Arc<str>,
    pub row: usize,
    pub col: usize,
}

/// 3x3 input patches with binary edge labels and per-sample provenance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatchDataset {
    patches: Vec<[f64; 9]>,
    labels: Vec<u8>,
    sources: Vec<SampleSource>,
}

impl PatchDataset {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn patch(&self, index: usize) -> &[f64; 9] {
        &self.patches[index]
    }

    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }

    pub fn source(&self, index: usize) -> &SampleSource {
        &self.sources[index]
    }

    pub fn patches(&self) -> &[[f64; 9]] {
        &self.patches
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn push(&mut self, patch: [f64; 9], label: u8, source: SampleSource) {
        debug_assert!(label <= 1);
        self.patches.push(patch);
        self.labels.push(label);
        self.sources.push(source);
    }

    /// Appends all samples of `other`.
    pub fn extend_from(&mut self, other: &PatchDataset) {
        self.patches.extend_from_slice(&other.patches);
        self.labels.extend_from_slice(&other.labels);
        self.sources.extend_from_slice(&other.sources);
    }

    /// Distinct source image ids, in sorted order.
    pub fn image_ids(&self) -> BTreeSet<Arc<str>> {
        self.sources.iter().map(|s| s.image.clone()).collect()
    }

    /// True when every patch entry is exactly 0.0 or 1.0.
    pub fn is_binary(&self) -> bool {
        self.patches
            .iter()
            .all(|p| p.iter().all(|&v| v == 0.0 || v == 1.0))
    }
}

/// Extracts one sample per interior pixel: the 3x3 window flattened row-major,
/// labeled by the ground-truth value at the window center binarized at 0.5.
pub fn extract_patches(
    image: &Image,
    ground_truth: &Image,
    image_id: &str,
) -> Result<PatchDataset, DataError> {
    if image.width() != ground_truth.width() || image.height() != ground_truth.height() {
        return Err(DataError::DimensionMismatch {
            image_width: image.width(),
            image_height: image.height(),
            gt_width: ground_truth.width(),
            gt_height: ground_truth.height(),
        });
    }
    if image.width() < 3 || image.height() < 3 {
        return Err(DataError::ImageTooSmall {
            width: image.width(),
            height: image.height(),
        });
    }

    let id: Arc<str> = Arc::from(image_id);
    let mut dataset = PatchDataset::default();
    for row in 1..image.height() - 1 {
        for col in 1..image.width() - 1 {
            let mut patch = [0.0; 9];
            for dr in 0..3 {
                for dc in 0..3 {
                    patch[dr * 3 + dc] = image.get(row + dr - 1, col + dc - 1);
                }
            }
            let label = u8::from(ground_truth.get(row, col) >= 0.5);
            dataset.push(
                patch,
                label,
                SampleSource {
                    image: id.clone(),
                    row,
                    col,
                },
            );
        }
    }
    Ok(dataset)
}

/// Splits per-image datasets into train/validation sets at image granularity,
/// so no patches of one image land on both sides.
///
/// With exactly `train_count + val_count` images the split is `train_count` /
/// `val_count`; with fewer, the validation share is preserved proportionally
/// (at least one image each side). Deterministic under `seed`.
pub fn split_by_image(
    datasets: &[(String, PatchDataset)],
    train_count: usize,
    val_count: usize,
    seed: u64,
) -> Result<(PatchDataset, PatchDataset), DataError> {
    let n = datasets.len();
    let total = train_count + val_count;
    if n < val_count.max(2) {
        return Err(DataError::NotEnoughImages {
            needed: val_count.max(2),
            available: n,
        });
    }
    if n > total {
        return Err(DataError::TooManyImages {
            available: n,
            maximum: total,
        });
    }

    let val_n = if n == total {
        val_count
    } else {
        (n * val_count / total).max(1)
    };
    let train_n = n - val_n;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut train = PatchDataset::default();
    let mut val = PatchDataset::default();
    for (rank, &index) in order.iter().enumerate() {
        let target = if rank < train_n { &mut train } else { &mut val };
        target.extend_from(&datasets[index].1);
    }
    Ok((train, val))
}
