//! Quantization of layer states into discrete symbols, sparse empirical
//! distributions over them, and plug-in Shannon / conditional entropies.
//!
//! Entropies are plug-in estimates in bits (log base 2), with no bias
//! correction; the energy conversion multiplies bits by `k_B * T * ln 2`.
//! Count tables are ordered maps so iteration, and therefore float
//! summation order and CSV dumps, are deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant in joules per kelvin (2019 SI exact value).
pub const BOLTZMANN_CONSTANT: f64 = 1.380649e-23;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("non-finite value {value} in dimension {dim}")]
    NonFinite { dim: usize, value: f64 },
    #[error("vector has {actual} dimensions, quantizer expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid quantization scheme: {0}")]
    InvalidScheme(String),
    #[error("identity quantization needs binary values, found {value} in dimension {dim}")]
    NonBinaryValue { dim: usize, value: f64 },
    #[error("cannot resolve observed ranges from zero samples")]
    NoSamples,
}

/// Physical constants for the energy conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Boltzmann constant, joules per kelvin.
    pub boltzmann: f64,
    /// Temperature in kelvin.
    pub temperature: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            boltzmann: BOLTZMANN_CONSTANT,
            temperature: 300.0,
        }
    }
}

impl PhysicalConstants {
    pub fn room_temperature() -> Self {
        Self::default()
    }

    pub fn with_temperature(temperature: f64) -> Self {
        assert!(temperature > 0.0, "temperature must be positive kelvin");
        Self {
            temperature,
            ..Self::default()
        }
    }

    /// Energy of one erased bit at these constants: `k_B * T * ln 2`, joules.
    pub fn joules_per_bit(&self) -> f64 {
        self.boltzmann * self.temperature * std::f64::consts::LN_2
    }
}

/// Minimum dissipation for erasing `bits` of information, in joules.
pub fn landauer_energy(bits: f64, constants: &PhysicalConstants) -> f64 {
    debug_assert!(bits >= 0.0, "erased information cannot be negative");
    bits * constants.joules_per_bit()
}

/// How the per-dimension bin ranges of a uniform-bin scheme are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePolicy {
    /// One fixed range for every dimension.
    Fixed { lo: f64, hi: f64 },
    /// Per-dimension min/max observed on the analysis set. A constant
    /// dimension collapses to a single bin and contributes zero entropy.
    Observed,
}

/// Rule mapping a real vector to a tuple of bin indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuantizationScheme {
    /// Pass-through for vectors that are already binary (each entry exactly
    /// 0 or 1). Injective over its domain.
    Identity,
    /// Per-dimension threshold: values at or above map to bin 1.
    BinaryThreshold { threshold: f64 },
    /// `bins` uniform bins per dimension over a fixed or observed range;
    /// values outside the range clamp to the end bins.
    UniformBins { bins: usize, range: RangePolicy },
}

impl QuantizationScheme {
    pub fn validate(&self) -> Result<(), EntropyError> {
        match self {
            QuantizationScheme::Identity => Ok(()),
            QuantizationScheme::BinaryThreshold { threshold } => {
                if threshold.is_finite() {
                    Ok(())
                } else {
                    Err(EntropyError::InvalidScheme(format!(
                        "threshold {threshold} is not finite"
                    )))
                }
            }
            QuantizationScheme::UniformBins { bins, range } => {
                if *bins < 2 {
                    return Err(EntropyError::InvalidScheme(format!(
                        "uniform-bins needs at least 2 bins, got {bins}"
                    )));
                }
                if *bins > u16::MAX as usize {
                    return Err(EntropyError::InvalidScheme(format!(
                        "bin count {bins} exceeds the symbol encoding limit"
                    )));
                }
                if let RangePolicy::Fixed { lo, hi } = range {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(EntropyError::InvalidScheme(format!(
                            "fixed range [{lo}, {hi}] needs finite lo < hi"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Canonical one-line description, embedded in report headers.
    pub fn descriptor(&self) -> String {
        match self {
            QuantizationScheme::Identity => "identity".to_string(),
            QuantizationScheme::BinaryThreshold { threshold } => {
                format!("threshold({threshold})")
            }
            QuantizationScheme::UniformBins { bins, range } => match range {
                RangePolicy::Fixed { lo, hi } => format!("bins({bins},fixed[{lo},{hi}])"),
                RangePolicy::Observed => format!("bins({bins},observed)"),
            },
        }
    }
}

/// Canonical encoding of a quantized layer vector: the per-dimension bin
/// indices. Equal bin tuples compare equal; the encoding is injective.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSymbol(Box<[u16]>);

impl StateSymbol {
    pub fn from_bins(bins: Vec<u16>) -> Self {
        Self(bins.into_boxed_slice())
    }

    pub fn bin_indices(&self) -> &[u16] {
        &self.0
    }
}

impl fmt::Display for StateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, bin) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{bin}")?;
        }
        Ok(())
    }
}

/// A scheme resolved against concrete data: observed ranges are pinned, so
/// quantization is a pure function afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    scheme: QuantizationScheme,
    dims: usize,
    /// Per-dimension (lo, hi); empty unless the scheme uses uniform bins.
    ranges: Vec<(f64, f64)>,
}

impl Quantizer {
    /// Resolves `scheme` for `dims`-dimensional vectors. `samples` is
    /// consulted only by the observed-range policy, which scans per-dimension
    /// min/max; it must be non-empty in that case.
    pub fn resolve<'a, I>(
        scheme: &QuantizationScheme,
        dims: usize,
        samples: I,
    ) -> Result<Self, EntropyError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        scheme.validate()?;
        let ranges = match scheme {
            QuantizationScheme::UniformBins {
                range: RangePolicy::Fixed { lo, hi },
                ..
            } => vec![(*lo, *hi); dims],
            QuantizationScheme::UniformBins {
                range: RangePolicy::Observed,
                ..
            } => {
                let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); dims];
                let mut seen = false;
                for sample in samples {
                    seen = true;
                    if sample.len() != dims {
                        return Err(EntropyError::DimensionMismatch {
                            expected: dims,
                            actual: sample.len(),
                        });
                    }
                    for (dim, &value) in sample.iter().enumerate() {
                        if !value.is_finite() {
                            return Err(EntropyError::NonFinite { dim, value });
                        }
                        let (lo, hi) = &mut ranges[dim];
                        *lo = lo.min(value);
                        *hi = hi.max(value);
                    }
                }
                if !seen {
                    return Err(EntropyError::NoSamples);
                }
                ranges
            }
            _ => Vec::new(),
        };
        Ok(Self {
            scheme: *scheme,
            dims,
            ranges,
        })
    }

    pub fn scheme(&self) -> &QuantizationScheme {
        &self.scheme
    }

    /// Maps a vector to its state symbol.
    ///
    /// Uniform bins use `floor((x - lo) / (hi - lo) * bins)` clamped to
    /// `[0, bins - 1]`; a degenerate range (hi == lo) is a single bin.
    pub fn quantize(&self, vector: &[f64]) -> Result<StateSymbol, EntropyError> {
        if vector.len() != self.dims {
            return Err(EntropyError::DimensionMismatch {
                expected: self.dims,
                actual: vector.len(),
            });
        }
        let mut bins = Vec::with_capacity(self.dims);
        for (dim, &value) in vector.iter().enumerate() {
            if !value.is_finite() {
                return Err(EntropyError::NonFinite { dim, value });
            }
            let bin = match &self.scheme {
                QuantizationScheme::Identity => {
                    if value == 0.0 {
                        0
                    } else if value == 1.0 {
                        1
                    } else {
                        return Err(EntropyError::NonBinaryValue { dim, value });
                    }
                }
                QuantizationScheme::BinaryThreshold { threshold } => {
                    u16::from(value >= *threshold)
                }
                QuantizationScheme::UniformBins { bins: count, .. } => {
                    let (lo, hi) = self.ranges[dim];
                    if hi <= lo {
                        0
                    } else {
                        let raw = ((value - lo) / (hi - lo) * *count as f64).floor();
                        raw.clamp(0.0, (*count - 1) as f64) as u16
                    }
                }
            };
            bins.push(bin);
        }
        Ok(StateSymbol::from_bins(bins))
    }
}

/// Sparse empirical counts over state symbols.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Distribution {
    counts: BTreeMap<StateSymbol, u64>,
    total: u64,
}

impl Distribution {
    pub fn record(&mut self, symbol: StateSymbol) {
        *self.counts.entry(symbol).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn record_n(&mut self, symbol: StateSymbol, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(symbol).or_insert(0) += count;
        self.total += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> impl Iterator<Item = (&StateSymbol, u64)> {
        self.counts.iter().map(|(s, &c)| (s, c))
    }

    /// Plug-in Shannon entropy in bits.
    pub fn entropy(&self) -> Result<f64, EntropyError> {
        if self.total == 0 {
            return Err(EntropyError::EmptyDistribution);
        }
        Ok(entropy_bits(self.counts.values().copied(), self.total))
    }

    /// Audit dump: `symbol,count` rows in symbol order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("symbol,count\n");
        for (symbol, count) in self.counts() {
            out.push_str(&format!("{symbol},{count}\n"));
        }
        out
    }
}

/// Sparse empirical counts over (input state, output state) pairs of one
/// transition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointDistribution {
    counts: BTreeMap<(StateSymbol, StateSymbol), u64>,
    total: u64,
}

impl JointDistribution {
    pub fn record(&mut self, x: StateSymbol, y: StateSymbol) {
        *self.counts.entry((x, y)).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> impl Iterator<Item = (&(StateSymbol, StateSymbol), u64)> {
        self.counts.iter().map(|(pair, &c)| (pair, c))
    }

    /// Marginal over the first coordinate; counts transfer exactly.
    pub fn marginal_x(&self) -> Distribution {
        let mut dist = Distribution::default();
        for ((x, _), count) in self.counts() {
            dist.record_n(x.clone(), count);
        }
        dist
    }

    /// Marginal over the second coordinate; counts transfer exactly.
    pub fn marginal_y(&self) -> Distribution {
        let mut dist = Distribution::default();
        for ((_, y), count) in self.counts() {
            dist.record_n(y.clone(), count);
        }
        dist
    }

    /// Joint Shannon entropy H(X, Y) in bits.
    pub fn joint_entropy(&self) -> Result<f64, EntropyError> {
        if self.total == 0 {
            return Err(EntropyError::EmptyDistribution);
        }
        Ok(entropy_bits(self.counts.values().copied(), self.total))
    }

    /// Conditional entropy H(X|Y) = H(X, Y) - H(Y), in bits.
    pub fn conditional_entropy(&self) -> Result<f64, EntropyError> {
        let joint = self.joint_entropy()?;
        let h_y = self.marginal_y().entropy()?;
        // Guard tiny negative rounding residue; the chain rule bounds the
        // true value at 0.
        Ok((joint - h_y).max(0.0))
    }
}

fn entropy_bits(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    let total = total as f64;
    let mut sum = 0.0;
    for count in counts {
        if count == 0 {
            continue;
        }
        let p = count as f64 / total;
        sum -= p * p.log2();
    }
    sum.max(0.0)
}
