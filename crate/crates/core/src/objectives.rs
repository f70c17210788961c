//! Loss and weight computations shared by all learners: binary cross-entropy,
//! the discounted temporal average, per-sample discounted log-weights, their
//! SoftMax importance weights, and the log-marginal estimator.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{clip_prob, logsumexp, sigmoid};
use crate::network::{ModelParams, NetworkConfig, SampleState, VisibleMode};
use crate::raster::LabeledExample;

/// Binary cross-entropy `-s log p - (1-s) log(1-p)` with `p` clipped away
/// from 0 and 1.
pub fn cross_entropy(spike: bool, p: f64) -> f64 {
    let p = clip_prob(p);
    if spike {
        -libm::log(p)
    } else {
        -libm::log(1.0 - p)
    }
}

/// Exponentially discounted running sum: `<f>_k = k * <f>_k + f_t`.
#[derive(Debug, Clone, Copy)]
pub struct DiscountedAccumulator {
    decay: f64,
    value: f64,
}

impl DiscountedAccumulator {
    pub fn new(decay: f64) -> Self {
        assert!(decay > 0.0 && decay <= 1.0, "decay must be in (0, 1]");
        Self { decay, value: 0.0 }
    }

    pub fn accumulate(&mut self, f_t: f64) -> f64 {
        self.value = self.decay * self.value + f_t;
        self.value
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Per-sample discounted log-probabilities of the visible targets.
#[derive(Debug, Clone)]
pub struct SampleLogWeights {
    gamma: f64,
    values: Vec<f64>,
}

impl SampleLogWeights {
    pub fn new(num_samples: usize, gamma: f64) -> Self {
        assert!(num_samples >= 1);
        Self {
            gamma,
            values: vec![0.0; num_samples],
        }
    }

    /// Feed the per-sample visible cross-entropy sums of the current step:
    /// `v_k = gamma * v_k - ce_k`.
    pub fn update(&mut self, visible_ce: &[f64]) {
        assert_eq!(visible_ce.len(), self.values.len());
        for (v, &ce) in self.values.iter_mut().zip(visible_ce) {
            debug_assert!(ce >= 0.0);
            *v = self.gamma * *v - ce;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// SoftMax over sample log-weights, max-shift stabilized.
pub fn softmax_weights(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty());
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|&x| libm::exp(x - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `log((1/K) * sum exp(v_k))`, computed stably.
pub fn log_marginal_estimate(v: &[f64]) -> f64 {
    logsumexp(v) - libm::log(v.len() as f64)
}

/// Monte Carlo estimate of the log-loss upper bound: the average over
/// `num_realizations` clamped runs of the total visible cross-entropy.
///
/// With no hidden neurons the value is exact and independent of the number
/// of realizations.
pub fn estimate_log_loss(
    cfg: &NetworkConfig,
    params: &ModelParams,
    example: &LabeledExample,
    num_realizations: usize,
    seed: u64,
) -> f64 {
    assert!(num_realizations >= 1);
    let horizon = example.horizon_t();
    let mut total = 0.0;
    for r in 0..num_realizations {
        let mut state = SampleState::new(cfg, seed, r as u64);
        let mut run_ce = 0.0;
        for t in 1..=horizon {
            let inputs = example.input.column(t);
            let targets = example.target.column(t);
            state.compute_potentials(cfg, params);
            for (slot, &visible) in cfg.topology.visible_ids().iter().enumerate() {
                run_ce += cross_entropy(targets[slot], sigmoid(state.potential(visible)));
            }
            state.emit_spikes(cfg, VisibleMode::Clamped(&targets));
            state.advance_traces(cfg, &inputs);
        }
        total += run_ce;
    }
    total / num_realizations as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = core::f64::consts::LN_2;

    #[test]
    fn cross_entropy_closed_forms() {
        assert!((cross_entropy(true, 0.5) - LN2).abs() < 1e-12);
        assert!((cross_entropy(false, 0.5) - LN2).abs() < 1e-12);
        assert!((cross_entropy(true, 0.75) - libm::log(4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_nonnegative_and_clipped() {
        for &(s, p) in &[(true, 0.0), (true, 1.0), (false, 0.0), (false, 1.0)] {
            let ce = cross_entropy(s, p);
            assert!(ce.is_finite() && ce >= 0.0);
        }
        // zero only at the clipped extreme of a matching prediction
        assert!(cross_entropy(true, 1.0) < 1e-6);
        assert!(cross_entropy(false, 0.0) < 1e-6);
    }

    #[test]
    fn accumulator_recursion() {
        let mut acc = DiscountedAccumulator::new(0.5);
        assert_eq!(acc.accumulate(1.0), 1.0);
        assert_eq!(acc.accumulate(0.0), 0.5);
        assert_eq!(acc.accumulate(0.0), 0.25);

        let mut acc = DiscountedAccumulator::new(0.37);
        assert_eq!(acc.accumulate(4.2), 4.2);

        let mut acc = DiscountedAccumulator::new(0.9);
        assert_eq!(acc.accumulate(2.0), 2.0);
        assert!((acc.accumulate(3.0) - 4.8).abs() < 1e-15);
    }

    #[test]
    fn accumulator_matches_closed_form_over_long_stream() {
        use rand::Rng;
        let kappa = 0.93;
        let mut rng = crate::rng::stream_rng(3, 0, 0);
        let stream: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let mut acc = DiscountedAccumulator::new(kappa);
        for (t, &f) in stream.iter().enumerate() {
            acc.accumulate(f);
            let direct: f64 = (0..=t)
                .map(|back| libm::pow(kappa, back as f64) * stream[t - back])
                .sum();
            assert!((acc.value() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn log_weight_updates() {
        let mut w = SampleLogWeights::new(1, 0.8);
        w.update(&[LN2]);
        assert!((w.values()[0] + LN2).abs() < 1e-15);

        // identical streams keep all samples equal
        let mut w = SampleLogWeights::new(3, 0.9);
        for _ in 0..10 {
            w.update(&[0.3, 0.3, 0.3]);
        }
        assert!(w.values().windows(2).all(|p| p[0] == p[1]));

        // gamma = 0 is memoryless (decay wipes history each step)
        let mut w = SampleLogWeights::new(1, 0.0);
        w.update(&[5.0]);
        w.update(&[1.5]);
        assert_eq!(w.values()[0], -1.5);
    }

    #[test]
    fn log_weights_stay_nonpositive() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(11, 0, 0);
        let mut w = SampleLogWeights::new(4, 0.95);
        for _ in 0..500 {
            let ce: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 3.0).collect();
            w.update(&ce);
            assert!(w.values().iter().all(|&v| v <= 0.0));
        }
    }

    #[test]
    fn softmax_values() {
        let w = softmax_weights(&[0.0, 0.0, 0.0]);
        for v in &w {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let w = softmax_weights(&[0.0, libm::log(3.0)]);
        assert!((w[0] - 0.25).abs() < 1e-12);
        assert!((w[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn softmax_shift_invariance_and_normalization() {
        let v = [-3.0, 0.2, 1.7, -0.4];
        let base = softmax_weights(&v);
        for shift in [-500.0, -100.0, 100.0, 500.0] {
            let shifted: Vec<f64> = v.iter().map(|&x| x + shift).collect();
            let w = softmax_weights(&shifted);
            for (a, b) in base.iter().zip(&w) {
                assert!((a - b).abs() < 1e-12);
            }
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn log_marginal_values() {
        assert!((log_marginal_estimate(&[-2.0]) + 2.0).abs() < 1e-15);
        assert!(log_marginal_estimate(&[0.0, 0.0]).abs() < 1e-15);
        let v = [0.0, libm::log(3.0)];
        assert!((log_marginal_estimate(&v) - LN2).abs() < 1e-12);
    }

    #[test]
    fn log_marginal_between_mean_and_max() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(17, 0, 0);
        for _ in 0..100 {
            let v: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 10.0 - 5.0).collect();
            let est = log_marginal_estimate(&v);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(est >= mean - 1e-12 && est <= max + 1e-12);
        }
    }
}
