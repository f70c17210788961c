//! Evaluation metrics: confidence from vote counts, expected calibration
//! error, hidden spike rates, and per-group entropy summaries.

use alloc::vec;
use alloc::vec::Vec;

use crate::inference::VoteTally;
use crate::objectives::softmax_weights;

/// One evaluated prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub predicted: usize,
    pub truth: usize,
    /// SoftMax over raw vote counts, evaluated at the predicted class.
    pub confidence: f64,
    /// Entropy of the empirical class distribution, in bits.
    pub entropy: f64,
}

impl PredictionRecord {
    pub fn correct(&self) -> bool {
        self.predicted == self.truth
    }
}

/// Confidence of the majority decision: SoftMax over the raw integer vote
/// counts, at the majority class.
pub fn confidence(tally: &VoteTally) -> f64 {
    assert!(tally.total() >= 1);
    let counts: Vec<f64> = tally.counts().iter().map(|&z| z as f64).collect();
    let weights = softmax_weights(&counts);
    let mut best = 0;
    for (i, &z) in tally.counts().iter().enumerate().skip(1) {
        if z > tally.counts()[best] {
            best = i;
        }
    }
    weights[best]
}

/// Binned expected calibration error over `num_bins` equal-width confidence
/// bins on (0, 1]: bin `b` covers `((b-1)/B, b/B]`.
pub fn ece(records: &[PredictionRecord], num_bins: usize) -> f64 {
    assert!(num_bins >= 1);
    assert!(!records.is_empty(), "ece of empty record list");
    let mut count = vec![0usize; num_bins];
    let mut correct = vec![0usize; num_bins];
    let mut conf_sum = vec![0.0f64; num_bins];
    for r in records {
        debug_assert!(r.confidence > 0.0 && r.confidence <= 1.0);
        // bin index for confidence in ((b-1)/B, b/B]
        let mut b = libm::ceil(r.confidence * num_bins as f64) as usize;
        b = b.clamp(1, num_bins) - 1;
        count[b] += 1;
        conf_sum[b] += r.confidence;
        if r.correct() {
            correct[b] += 1;
        }
    }
    let n = records.len() as f64;
    let mut total = 0.0;
    for b in 0..num_bins {
        if count[b] == 0 {
            continue;
        }
        let acc = correct[b] as f64 / count[b] as f64;
        let conf = conf_sum[b] / count[b] as f64;
        total += (count[b] as f64 / n) * libm::fabs(acc - conf);
    }
    total
}

/// Hidden spikes per unit time: total hidden spikes across all samples
/// divided by the number of time steps.
pub fn hidden_spike_rate(total_hidden_spikes: u64, total_steps: u64) -> f64 {
    if total_steps == 0 {
        return 0.0;
    }
    total_hidden_spikes as f64 / total_steps as f64
}

/// Mean decision entropy over correct and incorrect predictions; `None` for
/// an absent group.
pub fn grouped_entropy(records: &[PredictionRecord]) -> (Option<f64>, Option<f64>) {
    assert!(!records.is_empty());
    let mean = |group: Vec<f64>| {
        if group.is_empty() {
            None
        } else {
            Some(group.iter().sum::<f64>() / group.len() as f64)
        }
    };
    let correct: Vec<f64> = records
        .iter()
        .filter(|r| r.correct())
        .map(|r| r.entropy)
        .collect();
    let incorrect: Vec<f64> = records
        .iter()
        .filter(|r| !r.correct())
        .map(|r| r.entropy)
        .collect();
    (mean(correct), mean(incorrect))
}
