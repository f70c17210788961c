//! Multi-sample decision making: rate decoding, majority vote, empirical
//! class probabilities, decision entropy, and error-bound utilities.

use alloc::vec;
use alloc::vec::Vec;

use crate::network::{run_free, ModelParams, NetworkConfig};
use crate::raster::SpikeRaster;

/// Per-class vote counts over `K_I` independent decisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteTally {
    counts: Vec<usize>,
}

impl VoteTally {
    pub fn new(num_classes: usize) -> Self {
        Self {
            counts: vec![0; num_classes],
        }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

fn argmax_lowest_index<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Class of the visible neuron producing the largest number of spikes;
/// lowest index wins ties.
pub fn rate_decode(visible: &SpikeRaster) -> usize {
    let counts: Vec<usize> = (0..visible.num_neurons())
        .map(|c| visible.row_spike_count(c))
        .collect();
    argmax_lowest_index(&counts)
}

/// Majority vote over per-sample decisions; lowest index wins ties.
pub fn majority(decisions: &[usize], num_classes: usize) -> (usize, VoteTally) {
    assert!(!decisions.is_empty());
    let mut tally = VoteTally::new(num_classes);
    for &d in decisions {
        assert!(d < num_classes, "decision out of range");
        tally.counts[d] += 1;
    }
    (argmax_lowest_index(&tally.counts), tally)
}

/// Empirical class probabilities `z_c / K_I`.
pub fn class_probs(tally: &VoteTally) -> Vec<f64> {
    let total = tally.total();
    assert!(total >= 1);
    tally
        .counts
        .iter()
        .map(|&z| z as f64 / total as f64)
        .collect()
}

/// Shannon entropy of a class distribution, in bits; `0 log 0 := 0`.
pub fn decision_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * libm::log2(p))
        .sum()
}

/// Hoeffding bound on the binary majority-rule error: `exp(-2 K_I (1/2 - P_e)^2)`.
pub fn hoeffding_bound(p_e: f64, k_i: usize) -> f64 {
    assert!((0.0..0.5).contains(&p_e));
    let gap = 0.5 - p_e;
    libm::exp(-2.0 * k_i as f64 * gap * gap)
}

/// Exact binomial tail: probability that at least `ceil(K_I / 2)` of `K_I`
/// independent decisions fail, each with probability `p_e`.
pub fn exact_majority_error(p_e: f64, k_i: usize) -> f64 {
    assert!((0.0..=1.0).contains(&p_e));
    assert!(k_i >= 1);
    let from = k_i.div_ceil(2);
    let mut total = 0.0;
    for wrong in from..=k_i {
        // binomial coefficient in log space is unnecessary at these sizes
        let mut coeff = 1.0;
        for j in 0..wrong.min(k_i - wrong) {
            coeff = coeff * (k_i - j) as f64 / (j + 1) as f64;
        }
        total += coeff * libm::pow(p_e, wrong as f64) * libm::pow(1.0 - p_e, (k_i - wrong) as f64);
    }
    total.min(1.0)
}

/// Multi-sample classification: `K_I` free runs, per-sample rate decoding,
/// majority vote; returns the decision, the empirical class probabilities,
/// and their entropy.
pub fn classify(
    cfg: &NetworkConfig,
    params: &ModelParams,
    input: &SpikeRaster,
    k_i: usize,
    seed: u64,
) -> (usize, Vec<f64>, f64, VoteTally) {
    let outputs = run_free(cfg, params, input, k_i, seed);
    let decisions: Vec<usize> = outputs.iter().map(rate_decode).collect();
    let num_classes = cfg.topology.visible_ids().len();
    let (class, tally) = majority(&decisions, num_classes);
    let probs = class_probs(&tally);
    let entropy = decision_entropy(&probs);
    (class, probs, entropy, tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::raised_cosine_bank;
    use crate::network::{ModelParams, NetworkConfig, Topology};

    #[test]
    fn rate_decode_counts_and_ties() {
        let mut r = SpikeRaster::zeros(2, 4);
        for t in 1..=3 {
            r.set(0, t, true);
        }
        r.set(1, 1, true);
        assert_eq!(rate_decode(&r), 0);

        let mut tie = SpikeRaster::zeros(2, 4);
        tie.set(0, 1, true);
        tie.set(0, 2, true);
        tie.set(1, 3, true);
        tie.set(1, 4, true);
        assert_eq!(rate_decode(&tie), 0);

        let mut r3 = SpikeRaster::zeros(3, 5);
        for t in 1..=5 {
            r3.set(2, t, true);
        }
        assert_eq!(rate_decode(&r3), 2);
    }

    #[test]
    fn majority_votes() {
        let (c, tally) = majority(&[0, 0, 0, 1], 2);
        assert_eq!(c, 0);
        assert_eq!(tally.counts(), &[3, 1]);

        let (c, _) = majority(&[0, 1], 2);
        assert_eq!(c, 0); // tie-break

        let (c, _) = majority(&[2; 7], 3);
        assert_eq!(c, 2);
    }

    #[test]
    fn majority_permutation_invariant() {
        let a = majority(&[1, 0, 2, 1, 1, 0], 3);
        let b = majority(&[0, 1, 1, 2, 0, 1], 3);
        assert_eq!(a, b);
    }

    #[test]
    fn class_probs_frequencies() {
        let (_, tally) = majority(
            &[0; 7]
                .iter()
                .chain([1; 3].iter())
                .copied()
                .collect::<Vec<_>>(),
            2,
        );
        let p = class_probs(&tally);
        assert_eq!(p, vec![0.7, 0.3]);

        let (_, one) = majority(&[1], 3);
        assert_eq!(class_probs(&one), vec![0.0, 1.0, 0.0]);

        let (_, even) = majority(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 2);
        assert_eq!(class_probs(&even), vec![0.5, 0.5]);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(decision_entropy(&[1.0, 0.0]), 0.0);
        assert!((decision_entropy(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((decision_entropy(&[0.25, 0.75]) - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn hoeffding_values() {
        assert!((hoeffding_bound(0.25, 8) - libm::exp(-1.0)).abs() < 1e-12);
        assert!((hoeffding_bound(0.4999999, 10) - 1.0).abs() < 1e-6);
        assert_eq!(hoeffding_bound(0.25, 0), 1.0);
    }

    #[test]
    fn exact_error_values() {
        // brute-force oracle value for P_e = 0.25, K_I = 3
        assert!((exact_majority_error(0.25, 3) - 0.15625).abs() < 1e-12);
        assert_eq!(exact_majority_error(0.0, 9), 0.0);
        assert_eq!(exact_majority_error(0.5, 1), 0.5);
    }

    #[test]
    fn exact_error_below_bound_on_grid() {
        for k_i in 1..=50 {
            for &p_e in &[0.05, 0.15, 0.25, 0.35, 0.45] {
                let exact = exact_majority_error(p_e, k_i);
                let bound = hoeffding_bound(p_e, k_i);
                assert!(exact <= bound + 1e-12, "p={p_e} k={k_i}: {exact} > {bound}");
            }
        }
    }

    #[test]
    fn exact_error_nonincreasing_in_odd_k() {
        for &p_e in &[0.1, 0.25, 0.4] {
            let mut last = 1.0;
            for k_i in (1..=49).step_by(2) {
                let e = exact_majority_error(p_e, k_i);
                assert!(e <= last + 1e-12);
                last = e;
            }
        }
    }

    #[test]
    fn classify_bias_dominated() {
        let topo = Topology::layered(2, 0, 3, false);
        let cfg = NetworkConfig::new(topo, raised_cosine_bank(2, 10), raised_cosine_bank(1, 10));
        let mut params = ModelParams::zeros(&cfg.topology, 2);
        // visible neuron 0 strongly favored, others silenced
        params.set_bias(0, 50.0);
        params.set_bias(1, -50.0);
        params.set_bias(2, -50.0);
        let input = SpikeRaster::zeros(2, 10);
        let (class, probs, entropy, _) = classify(&cfg, &params, &input, 7, 5);
        assert_eq!(class, 0);
        assert_eq!(probs, vec![1.0, 0.0, 0.0]);
        assert_eq!(entropy, 0.0);

        // K_I = 1 always yields a one-hot histogram (zero entropy)
        let (_, _, e1, _) = classify(&cfg, &params, &input, 1, 5);
        assert_eq!(e1, 0.0);
    }
}
