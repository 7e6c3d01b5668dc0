//! Adam optimizer with bias correction.

use serde::{Deserialize, Serialize};

use super::{Gradients, Mlp, NetworkTopology};

/// Adam hyperparameters. Defaults are the standard ones; the model this
/// reproduces names the algorithm without hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    fn assert_valid(&self) {
        assert!(self.learning_rate > 0.0, "learning rate must be positive");
        assert!((0.0..1.0).contains(&self.beta1), "beta1 must be in [0, 1)");
        assert!((0.0..1.0).contains(&self.beta2), "beta2 must be in [0, 1)");
        assert!(self.epsilon > 0.0, "epsilon must be positive");
    }
}

/// Optimizer state: first/second moment accumulators shaped like the
/// parameters, plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    config: AdamConfig,
    t: u64,
    m: Gradients,
    v: Gradients,
}

impl AdamState {
    pub fn new(topology: NetworkTopology, config: AdamConfig) -> Self {
        config.assert_valid();
        Self {
            config,
            t: 0,
            m: Gradients::zeros(topology),
            v: Gradients::zeros(topology),
        }
    }

    pub fn config(&self) -> AdamConfig {
        self.config
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update: moments decay toward the gradient, bias-corrected
    /// estimates drive the parameter step, `t` advances by one.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) {
        self.t += 1;
        let c = self.config;
        let m_correction = 1.0 - c.beta1.powi(self.t as i32);
        let v_correction = 1.0 - c.beta2.powi(self.t as i32);

        let m_blocks = [&mut self.m.dw1, &mut self.m.db1, &mut self.m.dw2, &mut self.m.db2];
        let v_blocks = [&mut self.v.dw1, &mut self.v.db1, &mut self.v.dw2, &mut self.v.db2];
        let g_blocks = grads.blocks();
        let p_blocks = net.blocks_mut();

        for (((params, grads), ms), vs) in p_blocks.into_iter().zip(g_blocks).zip(m_blocks).zip(v_blocks) {
            debug_assert_eq!(params.len(), grads.len());
            for i in 0..params.len() {
                let g = grads[i];
                ms[i] = c.beta1 * ms[i] + (1.0 - c.beta1) * g;
                vs[i] = c.beta2 * vs[i] + (1.0 - c.beta2) * g * g;
                let m_hat = ms[i] / m_correction;
                let v_hat = vs[i] / v_correction;
                params[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
            }
        }
    }
}
