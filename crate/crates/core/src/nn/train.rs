//! Mini-batch training loop with deterministic shuffling and early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{backward, mse_loss, AdamConfig, AdamState, Gradients, Mlp, NnError};
use crate::data::PatchDataset;
use crate::seeding;

/// Training hyperparameters. Epoch `k` shuffles with the seed
/// `seeding::derive(seed, k)`, so any epoch is reproducible in isolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Consecutive epochs without a strictly lower validation MSE before
    /// training stops.
    pub patience: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            max_epochs: 100,
            patience: 5,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

/// One completed epoch: errors plus the network as it stood at epoch end.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch index.
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub snapshot: Mlp,
}

/// Per-epoch records of a training run. A snapshot is retained for every
/// completed epoch; the dissipation ledger replays them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingHistory {
    records: Vec<EpochRecord>,
    stopped_epoch: usize,
}

impl TrainingHistory {
    pub fn new(records: Vec<EpochRecord>) -> Self {
        let stopped_epoch = records.len();
        Self {
            records,
            stopped_epoch,
        }
    }

    pub fn records(&self) -> &[EpochRecord] {
        &self.records
    }

    pub fn stopped_epoch(&self) -> usize {
        self.stopped_epoch
    }

    /// 1-based epoch with the lowest validation MSE (first one on ties).
    pub fn best_epoch(&self) -> usize {
        let mut best = 1;
        let mut best_mse = f64::INFINITY;
        for record in &self.records {
            if record.val_mse < best_mse {
                best_mse = record.val_mse;
                best = record.epoch;
            }
        }
        best
    }

    /// The early-stopped network: the snapshot at the best validation epoch.
    pub fn best_network(&self) -> &Mlp {
        &self.records[self.best_epoch() - 1].snapshot
    }
}

/// One pass over the dataset: deterministic shuffle, mini-batches (last one
/// may be short), one Adam step per batch on the mean gradient. Returns the
/// mean MSE over all samples as they were visited.
pub fn train_epoch(
    net: &mut Mlp,
    optimizer: &mut AdamState,
    dataset: &PatchDataset,
    batch_size: usize,
    seed: u64,
) -> Result<f64, NnError> {
    if dataset.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    assert!(batch_size >= 1, "batch size must be at least 1");

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let topology = net.topology();
    let mut loss_sum = 0.0;
    for batch in order.chunks(batch_size) {
        let mut batch_grads = Gradients::zeros(topology);
        for &index in batch {
            let trace = net.forward(dataset.patch(index))?;
            let target = dataset.label(index) as f64;
            loss_sum += mse_loss(trace.output, target);
            batch_grads.add_assign(&backward(net, &trace, target));
        }
        batch_grads.scale(1.0 / batch.len() as f64);
        optimizer.step(net, &batch_grads);
        if let Some((location, value)) = net.first_non_finite() {
            return Err(NnError::NonFiniteParameter { location, value });
        }
    }
    Ok(loss_sum / dataset.len() as f64)
}

/// Mean MSE of the network over a dataset, forward passes only.
pub fn evaluate_mse(net: &Mlp, dataset: &PatchDataset) -> Result<f64, NnError> {
    if dataset.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    let mut sum = 0.0;
    for index in 0..dataset.len() {
        let trace = net.forward(dataset.patch(index))?;
        sum += mse_loss(trace.output, dataset.label(index) as f64);
    }
    Ok(sum / dataset.len() as f64)
}

/// Trains up to `max_epochs`, stopping once the validation MSE has not
/// strictly improved for `patience` consecutive epochs.
pub fn fit(
    net: &mut Mlp,
    train: &PatchDataset,
    val: &PatchDataset,
    config: &FitConfig,
) -> Result<TrainingHistory, NnError> {
    assert!(config.patience >= 1, "patience must be at least 1");
    if train.is_empty() || val.is_empty() {
        return Err(NnError::EmptyDataset);
    }

    let mut optimizer = AdamState::new(net.topology(), config.adam);
    let mut records = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut epochs_without_improvement = 0;

    for epoch in 1..=config.max_epochs {
        let epoch_seed = seeding::derive(config.seed, epoch as u64);
        let train_mse = train_epoch(net, &mut optimizer, train, config.batch_size, epoch_seed)?;
        let val_mse = evaluate_mse(net, val)?;
        records.push(EpochRecord {
            epoch,
            train_mse,
            val_mse,
            snapshot: net.clone(),
        });

        if val_mse < best_val {
            best_val = val_mse;
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if epochs_without_improvement >= config.patience {
                break;
            }
        }
    }
    Ok(TrainingHistory::new(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{extract_patches, Image, SyntheticPattern, SyntheticPreset};
    use crate::nn::{he_init, NetworkTopology};

    fn synthetic_dataset() -> PatchDataset {
        let (image, gt) = SyntheticPattern::preset(SyntheticPreset::Separated)
            .generate()
            .unwrap();
        extract_patches(&image, &gt, "separated").unwrap()
    }

    /// Dataset of n copies of trivially labeled constant patches.
    fn constant_dataset(n: usize) -> PatchDataset {
        let image = Image::filled(3, 3, 0.5);
        let gt = Image::filled(3, 3, 1.0);
        let one = extract_patches(&image, &gt, "const").unwrap();
        let mut out = PatchDataset::default();
        for _ in 0..n {
            out.extend_from(&one);
        }
        out
    }

    #[test]
    fn one_batch_when_dataset_fits_exactly() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 1).unwrap();
        let mut opt = AdamState::new(topology, AdamConfig::default());
        train_epoch(&mut net, &mut opt, &constant_dataset(128), 128, 0).unwrap();
        assert_eq!(opt.step_count(), 1);
    }

    #[test]
    fn short_final_batch_gets_its_own_step() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 1).unwrap();
        let mut opt = AdamState::new(topology, AdamConfig::default());
        train_epoch(&mut net, &mut opt, &constant_dataset(130), 128, 0).unwrap();
        assert_eq!(opt.step_count(), 2);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 1).unwrap();
        let mut opt = AdamState::new(topology, AdamConfig::default());
        assert!(matches!(
            train_epoch(&mut net, &mut opt, &PatchDataset::default(), 128, 0),
            Err(NnError::EmptyDataset)
        ));
    }

    #[test]
    fn same_seed_trains_bit_identically() {
        let topology = NetworkTopology::default();
        let dataset = synthetic_dataset();
        let config = FitConfig {
            max_epochs: 5,
            patience: 5,
            batch_size: 8,
            seed: 42,
            ..FitConfig::default()
        };

        let run = || {
            let mut net = he_init(topology, 42).unwrap();
            fit(&mut net, &dataset, &dataset, &config).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.records().len(), b.records().len());
        for (ra, rb) in a.records().iter().zip(b.records()) {
            assert_eq!(ra.train_mse.to_bits(), rb.train_mse.to_bits());
            assert_eq!(ra.val_mse.to_bits(), rb.val_mse.to_bits());
            assert_eq!(ra.snapshot, rb.snapshot);
        }
    }

    #[test]
    fn history_caps_at_max_epochs() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 2).unwrap();
        let dataset = synthetic_dataset();
        let config = FitConfig {
            max_epochs: 10,
            patience: 100,
            batch_size: 16,
            seed: 1,
            ..FitConfig::default()
        };
        let history = fit(&mut net, &dataset, &dataset, &config).unwrap();
        assert!(history.records().len() <= 10);
        assert_eq!(history.stopped_epoch(), history.records().len());
    }

    #[test]
    fn training_reduces_error_on_fixed_seed_scenario() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 42).unwrap();
        let dataset = synthetic_dataset();
        let initial = evaluate_mse(&net, &dataset).unwrap();
        let config = FitConfig {
            max_epochs: 20,
            patience: 20,
            batch_size: 8,
            seed: 42,
            ..FitConfig::default()
        };
        let history = fit(&mut net, &dataset, &dataset, &config).unwrap();
        let last = history.records().last().unwrap();
        assert!(
            last.train_mse < initial,
            "final {} vs initial {initial}",
            last.train_mse
        );
    }

    #[test]
    fn strictly_rising_validation_stops_after_patience() {
        // Validation set labeled opposite to training drives val error up
        // while training error falls.
        let (image, gt) = SyntheticPattern::preset(SyntheticPreset::Merged)
            .generate()
            .unwrap();
        let train = extract_patches(&image, &gt, "train").unwrap();
        let mut inverted = Image::filled(8, 8, 0.0);
        for row in 0..8 {
            for col in 0..8 {
                inverted.set(row, col, 1.0 - gt.get(row, col));
            }
        }
        let val = extract_patches(&image, &inverted, "val").unwrap();

        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 4).unwrap();
        let config = FitConfig {
            max_epochs: 50,
            patience: 1,
            batch_size: 8,
            seed: 4,
            ..FitConfig::default()
        };
        let history = fit(&mut net, &train, &val, &config).unwrap();
        let records = history.records();
        // Must stop at the first epoch whose val error fails to improve.
        let first_bad = records
            .windows(2)
            .position(|w| w[1].val_mse >= w[0].val_mse)
            .map(|i| i + 2);
        if let Some(stop) = first_bad {
            assert_eq!(history.stopped_epoch(), stop);
        }
        assert!(history.stopped_epoch() < 50);
    }

    #[test]
    fn best_network_tracks_minimum_validation() {
        let topology = NetworkTopology::default();
        let mut net = he_init(topology, 8).unwrap();
        let dataset = synthetic_dataset();
        let config = FitConfig {
            max_epochs: 8,
            patience: 8,
            batch_size: 8,
            seed: 8,
            ..FitConfig::default()
        };
        let history = fit(&mut net, &dataset, &dataset, &config).unwrap();
        let best = history.best_epoch();
        let min = history
            .records()
            .iter()
            .map(|r| r.val_mse)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(history.records()[best - 1].val_mse, min);
        assert_eq!(
            history.best_network(),
            &history.records()[best - 1].snapshot
        );
    }
}
