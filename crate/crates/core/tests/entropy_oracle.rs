//! Exhaustive brute-force oracle for the transition entropy pipeline.
//!
//! All 512 binary 3x3 patches are pushed through small random networks. The
//! oracle recomputes everything on its own: a straight-line forward pass,
//! its own bin resolution, a hash-map joint table, and the conditional
//! entropy via the direct definition
//! `H(X|Y) = -sum p(x,y) log2(p(x,y)/p(y))` rather than the module's
//! `H(X,Y) - H(Y)` route. Agreement is required to 1e-12.
//!
//! The oracle mirrors the module's arithmetic orders (bias-first dot
//! products, the binning formula) on purpose: bin indices must agree
//! bit-for-bit for the comparison to be meaningful, while the entropy
//! algebra is deliberately different.

use std::collections::HashMap;

use thermoedge_core::data::{PatchDataset, SampleSource};
use thermoedge_core::dissipation::{transition_dissipation, AnalysisSchemes, TransitionId};
use thermoedge_core::nn::{he_init, Mlp, NetworkTopology};

/// Every 3x3 binary patch, by the 9-bit little-endian code of its pixels.
fn all_binary_patches() -> PatchDataset {
    let mut dataset = PatchDataset::default();
    for code in 0u32..512 {
        let mut patch = [0.0; 9];
        for (bit, value) in patch.iter_mut().enumerate() {
            *value = f64::from((code >> bit) & 1);
        }
        dataset.push(
            patch,
            0,
            SampleSource {
                image: "enumeration".into(),
                row: 0,
                col: 0,
            },
        );
    }
    dataset
}

/// Independent forward pass: returns (hidden_post, output).
fn oracle_forward(net: &Mlp, patch: &[f64]) -> (Vec<f64>, f64) {
    let t = net.topology();
    let mut hidden = Vec::with_capacity(t.hidden_size());
    for j in 0..t.hidden_size() {
        let mut z = net.b1()[j];
        for i in 0..t.input_size() {
            z += net.w1()[j * t.input_size() + i] * patch[i];
        }
        hidden.push(if z > 0.0 { z } else { 0.0 });
    }
    let mut pre = net.b2()[0];
    for j in 0..t.hidden_size() {
        pre += net.w2()[j] * hidden[j];
    }
    let output = if pre >= 0.0 {
        1.0 / (1.0 + (-pre).exp())
    } else {
        pre.exp() / (1.0 + pre.exp())
    };
    (hidden, output)
}

/// 16 uniform bins per dimension over the observed min/max of `vectors`;
/// constant dimensions collapse to bin 0.
fn oracle_hidden_bins(vectors: &[Vec<f64>]) -> Vec<Vec<u16>> {
    let dims = vectors[0].len();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for v in vectors {
        for d in 0..dims {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    vectors
        .iter()
        .map(|v| {
            (0..dims)
                .map(|d| {
                    if hi[d] <= lo[d] {
                        0
                    } else {
                        let raw = ((v[d] - lo[d]) / (hi[d] - lo[d]) * 16.0).floor();
                        raw.clamp(0.0, 15.0) as u16
                    }
                })
                .collect()
        })
        .collect()
}

/// Direct-definition conditional entropy from joint counts.
fn oracle_conditional_entropy(pairs: &[(Vec<u16>, Vec<u16>)]) -> f64 {
    let total = pairs.len() as f64;
    let mut joint: HashMap<(Vec<u16>, Vec<u16>), u64> = HashMap::new();
    let mut y_marginal: HashMap<Vec<u16>, u64> = HashMap::new();
    for (x, y) in pairs {
        *joint.entry((x.clone(), y.clone())).or_insert(0) += 1;
        *y_marginal.entry(y.clone()).or_insert(0) += 1;
    }
    // Deterministic summation order for reproducibility of the oracle itself.
    let mut entries: Vec<(&(Vec<u16>, Vec<u16>), &u64)> = joint.iter().collect();
    entries.sort();
    let mut h = 0.0;
    for ((_, y), &count) in entries {
        let p_xy = count as f64 / total;
        let p_y = y_marginal[y] as f64 / total;
        h -= p_xy * (p_xy / p_y).log2();
    }
    h.max(0.0)
}

/// Module vs oracle over both transitions of one network.
fn compare_network(net: &Mlp, dataset: &PatchDataset) {
    let schemes = AnalysisSchemes::default();

    let mut inputs: Vec<Vec<f64>> = Vec::new();
    let mut hiddens: Vec<Vec<f64>> = Vec::new();
    let mut outputs: Vec<f64> = Vec::new();
    for i in 0..dataset.len() {
        let (hidden, output) = oracle_forward(net, dataset.patch(i));
        inputs.push(dataset.patch(i).to_vec());
        hiddens.push(hidden);
        outputs.push(output);
    }

    let input_bins: Vec<Vec<u16>> = inputs
        .iter()
        .map(|p| p.iter().map(|&v| v as u16).collect())
        .collect();
    let hidden_bins = oracle_hidden_bins(&hiddens);
    let output_bins: Vec<Vec<u16>> = outputs.iter().map(|&o| vec![u16::from(o >= 0.5)]).collect();

    let t1_pairs: Vec<(Vec<u16>, Vec<u16>)> = input_bins
        .iter()
        .cloned()
        .zip(hidden_bins.iter().cloned())
        .collect();
    let t2_pairs: Vec<(Vec<u16>, Vec<u16>)> = hidden_bins
        .iter()
        .cloned()
        .zip(output_bins.iter().cloned())
        .collect();

    for (transition, pairs) in [
        (TransitionId::InputToHidden, &t1_pairs),
        (TransitionId::HiddenToOutput, &t2_pairs),
    ] {
        let record = transition_dissipation(net, dataset, transition, &schemes).unwrap();
        let expected = oracle_conditional_entropy(pairs);
        assert!(
            (record.h_x_given_y - expected).abs() < 1e-12,
            "{}: module {} vs oracle {}",
            transition.name(),
            record.h_x_given_y,
            expected
        );
    }
}

#[test]
fn module_matches_exhaustive_enumeration_oracle() {
    let dataset = all_binary_patches();
    assert_eq!(dataset.len(), 512);
    // Small random nets of a few hidden widths.
    for seed in 0..8u64 {
        let hidden = 3 + (seed as usize % 4);
        let topology = NetworkTopology::new(9, hidden, 1).unwrap();
        let net = he_init(topology, seed).unwrap();
        compare_network(&net, &dataset);
    }
}

#[test]
fn oracle_agreement_holds_for_default_topology() {
    let dataset = all_binary_patches();
    for seed in [100, 200, 300] {
        let net = he_init(NetworkTopology::default(), seed).unwrap();
        compare_network(&net, &dataset);
    }
}
