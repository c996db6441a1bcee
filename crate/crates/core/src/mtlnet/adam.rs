use serde::{Deserialize, Serialize};

use super::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Parameters,
    v: Parameters,
    step: u64,
}

impl AdamState {
    pub fn new(like: &Parameters) -> Self {
        AdamState {
            m: like.zeros_like(),
            v: like.zeros_like(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut Parameters, grads: &Parameters, cfg: &AdamConfig) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let slices = params
            .slices_mut()
            .into_iter()
            .zip(grads.slices())
            .zip(self.m.slices_mut())
            .zip(self.v.slices_mut());
        for (((p, g), m), v) in slices {
            assert_eq!(p.len(), g.len(), "gradient shape mismatch");
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtlnet::TaskHead;

    fn scalar(x: f64) -> Parameters {
        Parameters {
            shared_w: vec![x],
            shared_b: vec![0.0],
            heads: vec![TaskHead {
                w: vec![0.0],
                b: vec![0.0],
            }],
        }
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = scalar(0.0);
        let mut g = scalar(0.5);
        g.shared_b[0] = 0.0;
        let mut state = AdamState::new(&p);
        state.step(&mut p, &g, &AdamConfig::default());
        assert_eq!(state.step_count(), 1);
        assert!((p.shared_w[0] + 1e-3).abs() <= 1e-8, "{}", p.shared_w[0]);
        assert_eq!(p.shared_b[0], 0.0);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = scalar(0.3);
        let before = p.clone();
        let mut state = AdamState::new(&p);
        for _ in 0..5 {
            state.step(&mut p, &scalar(0.0), &AdamConfig::default());
        }
        assert_eq!(p, before);
    }

    #[test]
    fn identical_runs_match() {
        let run = || {
            let mut p = scalar(1.0);
            let mut state = AdamState::new(&p);
            let mut trace = Vec::new();
            for k in 0..20 {
                let g = scalar(2.0 * p.shared_w[0] + k as f64 * 0.01);
                state.step(&mut p, &g, &AdamConfig::default());
                trace.push(p.shared_w[0].to_bits());
            }
            trace
        };
        assert_eq!(run(), run());
    }
}
