//! From-scratch feedforward network: one ReLU hidden layer, one sigmoid
//! output neuron, hand-derived gradients for exactly that shape.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Image;

pub mod activation;
mod adam;
mod train;

pub use activation::{relu, relu_derivative, sigmoid};
pub use adam::{AdamConfig, AdamState};
pub use train::{evaluate_mse, fit, train_epoch, EpochRecord, FitConfig, TrainingHistory};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("layer sizes must be at least 1, got {input}-{hidden}-{output}")]
    EmptyLayer {
        input: usize,
        hidden: usize,
        output: usize,
    },
    #[error("this network is scalar-output; topology asks for {output} output neurons")]
    UnsupportedOutputSize { output: usize },
    #[error("input has {actual} entries, network expects {expected}")]
    InputSizeMismatch { expected: usize, actual: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("non-finite parameter {value} appeared in {location} after a training step")]
    NonFiniteParameter { location: &'static str, value: f64 },
    #[error("image is {width}x{height}, need at least 3x3")]
    ImageTooSmall { width: usize, height: usize },
}

/// Layer sizes of the network. Defaults to the 9-12-1 edge-detection shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkTopology {
    input_size: usize,
    hidden_size: usize,
    output_size: usize,
}

impl Default for NetworkTopology {
    fn default() -> Self {
        Self {
            input_size: 9,
            hidden_size: 12,
            output_size: 1,
        }
    }
}

impl NetworkTopology {
    pub fn new(input_size: usize, hidden_size: usize, output_size: usize) -> Result<Self, NnError> {
        if input_size == 0 || hidden_size == 0 || output_size == 0 {
            return Err(NnError::EmptyLayer {
                input: input_size,
                hidden: hidden_size,
                output: output_size,
            });
        }
        Ok(Self {
            input_size,
            hidden_size,
            output_size,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// Total trainable parameter count.
    pub fn parameter_count(&self) -> usize {
        self.hidden_size * self.input_size
            + self.hidden_size
            + self.output_size * self.hidden_size
            + self.output_size
    }
}

/// The network parameters: `w1` is hidden x input row-major, `w2` is
/// output x hidden row-major (a single row here), biases per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    topology: NetworkTopology,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl Mlp {
    /// Builds a network with all parameters zero.
    pub fn zeros(topology: NetworkTopology) -> Result<Self, NnError> {
        if topology.output_size != 1 {
            return Err(NnError::UnsupportedOutputSize {
                output: topology.output_size,
            });
        }
        Ok(Self {
            topology,
            w1: vec![0.0; topology.hidden_size * topology.input_size],
            b1: vec![0.0; topology.hidden_size],
            w2: vec![0.0; topology.hidden_size],
            b2: vec![0.0; 1],
        })
    }

    pub fn from_parts(
        topology: NetworkTopology,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
    ) -> Result<Self, NnError> {
        let mut net = Self::zeros(topology)?;
        assert_eq!(w1.len(), net.w1.len(), "w1 shape");
        assert_eq!(b1.len(), net.b1.len(), "b1 shape");
        assert_eq!(w2.len(), net.w2.len(), "w2 shape");
        assert_eq!(b2.len(), net.b2.len(), "b2 shape");
        net.w1 = w1;
        net.b1 = b1;
        net.w2 = w2;
        net.b2 = b2;
        Ok(net)
    }

    pub fn topology(&self) -> NetworkTopology {
        self.topology
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn b1(&self) -> &[f64] {
        &self.b1
    }

    pub fn w2(&self) -> &[f64] {
        &self.w2
    }

    pub fn b2(&self) -> &[f64] {
        &self.b2
    }

    /// Mutable views of the four parameter blocks, in checkpoint order.
    pub(crate) fn blocks_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    /// First non-finite parameter, if any, as (block name, value).
    pub fn first_non_finite(&self) -> Option<(&'static str, f64)> {
        for (name, block) in [
            ("w1", &self.w1),
            ("b1", &self.b1),
            ("w2", &self.w2),
            ("b2", &self.b2),
        ] {
            if let Some(&value) = block.iter().find(|v| !v.is_finite()) {
                return Some((name, value));
            }
        }
        None
    }
}

/// Every intermediate state of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub input: Vec<f64>,
    pub hidden_pre: Vec<f64>,
    pub hidden_post: Vec<f64>,
    pub output_pre: f64,
    pub output: f64,
}

/// He-initialized network: weights drawn from Gaussian(0, 2/fan_in),
/// biases zero. Deterministic given the seed (w1 row-major, then w2).
pub fn he_init(topology: NetworkTopology, seed: u64) -> Result<Mlp, NnError> {
    let mut net = Mlp::zeros(topology)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let w1_std = (2.0 / topology.input_size as f64).sqrt();
    let w1_dist = Normal::new(0.0, w1_std).expect("finite std");
    for w in net.w1.iter_mut() {
        *w = w1_dist.sample(&mut rng);
    }

    let w2_std = (2.0 / topology.hidden_size as f64).sqrt();
    let w2_dist = Normal::new(0.0, w2_std).expect("finite std");
    for w in net.w2.iter_mut() {
        *w = w2_dist.sample(&mut rng);
    }
    Ok(net)
}

impl Mlp {
    /// Forward pass over one input vector, keeping the full trace.
    pub fn forward(&self, input: &[f64]) -> Result<ForwardTrace, NnError> {
        let t = &self.topology;
        if input.len() != t.input_size {
            return Err(NnError::InputSizeMismatch {
                expected: t.input_size,
                actual: input.len(),
            });
        }

        let mut hidden_pre = Vec::with_capacity(t.hidden_size);
        let mut hidden_post = Vec::with_capacity(t.hidden_size);
        for j in 0..t.hidden_size {
            let mut z = self.b1[j];
            let row = &self.w1[j * t.input_size..(j + 1) * t.input_size];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            hidden_pre.push(z);
            hidden_post.push(relu(z));
        }

        let mut output_pre = self.b2[0];
        for (w, h) in self.w2.iter().zip(&hidden_post) {
            output_pre += w * h;
        }
        let output = sigmoid(output_pre);

        Ok(ForwardTrace {
            input: input.to_vec(),
            hidden_pre,
            hidden_post,
            output_pre,
            output,
        })
    }
}

/// Squared error of one prediction; batch losses are means of this.
pub fn mse_loss(prediction: f64, target: f64) -> f64 {
    let diff = prediction - target;
    diff * diff
}

/// Mean squared error over parallel prediction/target slices.
pub fn mean_mse(predictions: &[f64], targets: &[f64]) -> f64 {
    assert_eq!(predictions.len(), targets.len());
    assert!(!predictions.is_empty());
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &t)| mse_loss(p, t))
        .sum();
    sum / predictions.len() as f64
}

/// Gradients of the squared error with respect to every parameter,
/// shaped like the corresponding [`Mlp`] blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub dw1: Vec<f64>,
    pub db1: Vec<f64>,
    pub dw2: Vec<f64>,
    pub db2: Vec<f64>,
}

impl Gradients {
    pub fn zeros(topology: NetworkTopology) -> Self {
        Self {
            dw1: vec![0.0; topology.hidden_size * topology.input_size],
            db1: vec![0.0; topology.hidden_size],
            dw2: vec![0.0; topology.hidden_size],
            db2: vec![0.0; 1],
        }
    }

    pub(crate) fn blocks(&self) -> [&Vec<f64>; 4] {
        [&self.dw1, &self.db1, &self.dw2, &self.db2]
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (mine, theirs) in [
            (&mut self.dw1, &other.dw1),
            (&mut self.db1, &other.db1),
            (&mut self.dw2, &other.dw2),
            (&mut self.db2, &other.db2),
        ] {
            debug_assert_eq!(mine.len(), theirs.len());
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for block in [&mut self.dw1, &mut self.db1, &mut self.dw2, &mut self.db2] {
            for g in block.iter_mut() {
                *g *= factor;
            }
        }
    }
}

/// Analytic gradients of `mse_loss(trace.output, target)` by backpropagation.
///
/// The trace must come from [`Mlp::forward`] on the same network.
pub fn backward(net: &Mlp, trace: &ForwardTrace, target: f64) -> Gradients {
    let t = net.topology;
    debug_assert_eq!(trace.input.len(), t.input_size);
    debug_assert_eq!(trace.hidden_post.len(), t.hidden_size);

    let mut grads = Gradients::zeros(t);

    // d(loss)/d(output_pre) through the sigmoid.
    let y = trace.output;
    let delta_out = 2.0 * (y - target) * y * (1.0 - y);

    grads.db2[0] = delta_out;
    for j in 0..t.hidden_size {
        grads.dw2[j] = delta_out * trace.hidden_post[j];
    }

    for j in 0..t.hidden_size {
        let delta_hidden = delta_out * net.w2[j] * relu_derivative(trace.hidden_pre[j]);
        grads.db1[j] = delta_hidden;
        let row = &mut grads.dw1[j * t.input_size..(j + 1) * t.input_size];
        for (g, x) in row.iter_mut().zip(&trace.input) {
            *g = delta_hidden * x;
        }
    }
    grads
}

/// Slides a 3x3 window over every interior pixel and thresholds the network
/// output at 0.5. Border pixels are 0.
pub fn predict_edge_map(net: &Mlp, image: &Image) -> Result<Image, NnError> {
    if image.width() < 3 || image.height() < 3 {
        return Err(NnError::ImageTooSmall {
            width: image.width(),
            height: image.height(),
        });
    }
    let mut out = Image::filled(image.width(), image.height(), 0.0);
    let mut window = [0.0; 9];
    for row in 1..image.height() - 1 {
        for col in 1..image.width() - 1 {
            for dr in 0..3 {
                for dc in 0..3 {
                    window[dr * 3 + dc] = image.get(row + dr - 1, col + dc - 1);
                }
            }
            let trace = net.forward(&window)?;
            if trace.output >= 0.5 {
                out.set(row, col, 1.0);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_topology_is_nine_twelve_one() {
        let t = NetworkTopology::default();
        assert_eq!(
            (t.input_size(), t.hidden_size(), t.output_size()),
            (9, 12, 1)
        );
        assert_eq!(t.parameter_count(), 9 * 12 + 12 + 12 + 1);
    }

    #[test]
    fn topology_rejects_empty_layers() {
        assert!(NetworkTopology::new(0, 12, 1).is_err());
        assert!(NetworkTopology::new(9, 0, 1).is_err());
        assert!(NetworkTopology::new(9, 12, 0).is_err());
    }

    #[test]
    fn he_init_is_deterministic_with_zero_biases() {
        let t = NetworkTopology::default();
        let a = he_init(t, 7).unwrap();
        let b = he_init(t, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.b1().iter().all(|&v| v == 0.0));
        assert!(a.b2().iter().all(|&v| v == 0.0));
        let c = he_init(t, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn he_init_variance_matches_two_over_fan_in() {
        // Enough hidden rows to draw one million fan-in-9 weights.
        let t = NetworkTopology::new(9, 111_112, 1).unwrap();
        let net = he_init(t, 123).unwrap();
        let n = net.w1().len() as f64;
        let mean: f64 = net.w1().iter().sum::<f64>() / n;
        let var: f64 = net.w1().iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
        let expected = 2.0 / 9.0;
        assert!(
            (var - expected).abs() / expected < 0.05,
            "variance {var} vs {expected}"
        );
    }

    #[test]
    fn forward_zero_network_outputs_half() {
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        let trace = net.forward(&[0.3; 9]).unwrap();
        assert_eq!(trace.output, 0.5);
        assert!(trace.hidden_post.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn forward_trace_is_internally_consistent() {
        let net = he_init(NetworkTopology::default(), 3).unwrap();
        let patch = [0.0, 1.0, 0.4, 0.5, 0.6, 0.2, 0.9, 0.1, 0.7];
        let trace = net.forward(&patch).unwrap();
        for (pre, post) in trace.hidden_pre.iter().zip(&trace.hidden_post) {
            assert_eq!(*post, pre.max(0.0));
        }
        assert!(trace.output > 0.0 && trace.output < 1.0);
    }

    #[test]
    fn forward_matches_straight_line_recomputation() {
        let t = NetworkTopology::default();
        let net = he_init(t, 11).unwrap();
        let patch = [0.1, 0.9, 0.3, 0.7, 0.5, 0.2, 0.8, 0.4, 0.6];
        let trace = net.forward(&patch).unwrap();

        // Independent re-derivation, scalar by scalar.
        let mut expected_output_pre = net.b2()[0];
        for j in 0..12 {
            let mut z = net.b1()[j];
            for i in 0..9 {
                z += net.w1()[j * 9 + i] * patch[i];
            }
            let h = if z > 0.0 { z } else { 0.0 };
            assert!((trace.hidden_pre[j] - z).abs() < 1e-12);
            assert!((trace.hidden_post[j] - h).abs() < 1e-12);
            expected_output_pre += net.w2()[j] * h;
        }
        assert!((trace.output_pre - expected_output_pre).abs() < 1e-12);
        assert!((trace.output - 1.0 / (1.0 + (-expected_output_pre).exp())).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_input_size() {
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        assert!(matches!(
            net.forward(&[0.0; 8]),
            Err(NnError::InputSizeMismatch {
                expected: 9,
                actual: 8
            })
        ));
    }

    #[test]
    fn mse_cases() {
        assert_eq!(mse_loss(0.5, 0.5), 0.0);
        assert_eq!(mse_loss(1.0, 0.0), 1.0);
        assert_eq!(mean_mse(&[0.0, 1.0], &[1.0, 1.0]), 0.5);
    }

    #[test]
    fn backward_zero_error_gives_zero_gradients() {
        let net = he_init(NetworkTopology::default(), 5).unwrap();
        let trace = net.forward(&[0.5; 9]).unwrap();
        let grads = backward(&net, &trace, trace.output);
        assert!(grads.dw1.iter().all(|&g| g == 0.0));
        assert!(grads.db1.iter().all(|&g| g == 0.0));
        assert!(grads.dw2.iter().all(|&g| g == 0.0));
        assert!(grads.db2.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_gates_inactive_hidden_units() {
        let net = he_init(NetworkTopology::default(), 6).unwrap();
        let trace = net.forward(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        let grads = backward(&net, &trace, 0.0);
        let mut saw_inactive = false;
        for j in 0..12 {
            if trace.hidden_pre[j] < 0.0 {
                saw_inactive = true;
                assert_eq!(grads.db1[j], 0.0);
                for i in 0..9 {
                    assert_eq!(grads.dw1[j * 9 + i], 0.0);
                }
            }
        }
        assert!(saw_inactive, "seed should produce at least one gated unit");
    }

    #[test]
    fn edge_map_of_constant_image_is_constant_inside() {
        let net = he_init(NetworkTopology::default(), 9).unwrap();
        let image = Image::filled(8, 8, 0.25);
        let map = predict_edge_map(&net, &image).unwrap();
        let interior: Vec<f64> = (1..7)
            .flat_map(|r| (1..7).map(move |c| (r, c)))
            .map(|(r, c)| map.get(r, c))
            .collect();
        assert_eq!(interior.len(), 36);
        assert!(interior.iter().all(|&v| v == interior[0]));
        // Border stays zero.
        for c in 0..8 {
            assert_eq!(map.get(0, c), 0.0);
            assert_eq!(map.get(7, c), 0.0);
        }
    }

    #[test]
    fn edge_map_rejects_tiny_images() {
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        let image = Image::filled(2, 5, 0.0);
        assert!(matches!(
            predict_edge_map(&net, &image),
            Err(NnError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn edge_map_covers_interior_of_full_size_image() {
        let net = Mlp::zeros(NetworkTopology::default()).unwrap();
        let image = Image::filled(481, 321, 0.5);
        let map = predict_edge_map(&net, &image).unwrap();
        // Zero network outputs exactly 0.5 everywhere, which thresholds to 1:
        // every interior pixel is predicted, none of the border is.
        let predicted = map.pixels().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(predicted, 479 * 319);
        assert_eq!(predicted, 152_801);
    }
}
