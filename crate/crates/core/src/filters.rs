//! Raised-cosine filter banks and causal filtered traces.
//!
//! A trace holds the windowed convolution of a kernel with the spike history
//! of one channel. The convention is strictly causal: after feeding the spike
//! at time `t`, the trace value is `sum_{d=1..D} a_d * s_{t+1-d}`, i.e. the
//! value entering the membrane potential at time `t + 1`.

use alloc::vec;
use alloc::vec::Vec;

/// A set of kernels sharing one window length.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    duration: usize,
    /// `basis[m][d - 1]` is the kernel value at delay `d = 1..=D`.
    basis: Vec<Vec<f64>>,
}

impl FilterBank {
    pub fn num_basis(&self) -> usize {
        self.basis.len()
    }

    pub fn duration(&self) -> usize {
        self.duration
    }

    /// Kernel value of basis `m` at delay `d` (1-indexed).
    pub fn kernel(&self, m: usize, d: usize) -> f64 {
        self.basis[m][d - 1]
    }
}

/// Raised-cosine bank: `M` kernels over a window of `D` steps.
///
/// Kernel `m` is `0.5 * (1 + cos(pi * (d - c_m) / w))` for `|d - c_m| <= w`
/// and 0 otherwise, with centers `c_m = 1 + (m - 1) * (D - 1) / max(M - 1, 1)`
/// and half-width `w = (D - 1) / max(M, 2)`; delays are evaluated only on
/// `d = 1..=D`, so support never exceeds the window.
pub fn raised_cosine_bank(num_basis: usize, duration: usize) -> FilterBank {
    assert!(num_basis >= 1, "need at least one basis kernel");
    assert!(duration >= 2, "window must span at least two steps");
    let d_span = (duration - 1) as f64;
    let width = d_span / (num_basis.max(2) as f64);
    let basis = (0..num_basis)
        .map(|m| {
            let center = 1.0 + m as f64 * d_span / ((num_basis - 1).max(1) as f64);
            (1..=duration)
                .map(|d| {
                    let dist = d as f64 - center;
                    if dist.abs() <= width {
                        0.5 * (1.0 + libm::cos(core::f64::consts::PI * dist / width))
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    FilterBank { duration, basis }
}

/// Per-channel ring buffer of the last `D` spikes plus the current trace
/// value for each basis kernel.
#[derive(Debug, Clone)]
pub struct TraceState {
    /// `history[0]` is the most recent spike.
    history: Vec<bool>,
    head: usize,
    values: Vec<f64>,
}

impl TraceState {
    /// All-zero history; traces are 0 until the first spike enters the window.
    pub fn new(bank: &FilterBank) -> Self {
        Self {
            history: vec![false; bank.duration()],
            head: 0,
            values: vec![0.0; bank.num_basis()],
        }
    }

    /// Current trace value for basis `m`.
    pub fn value(&self, m: usize) -> f64 {
        self.values[m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Feed the spike emitted at the current step and recompute traces by
    /// direct windowed convolution.
    pub fn push(&mut self, bank: &FilterBank, spike: bool) {
        debug_assert_eq!(self.history.len(), bank.duration());
        self.head = (self.head + bank.duration() - 1) % bank.duration();
        self.history[self.head] = spike;
        for (m, value) in self.values.iter_mut().enumerate() {
            let mut acc = 0.0;
            for d in 1..=bank.duration() {
                if self.history[(self.head + d - 1) % bank.duration()] {
                    acc += bank.kernel(m, d);
                }
            }
            *value = acc;
        }
    }
}

/// Advance a set of traces, one per channel, with the spike vector at `t`.
pub fn trace_step(bank: &FilterBank, states: &mut [TraceState], new_spikes: &[bool]) {
    assert_eq!(
        states.len(),
        new_spikes.len(),
        "spike vector length mismatch"
    );
    for (state, &spike) in states.iter_mut().zip(new_spikes) {
        state.push(bank, spike);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank_from(kernel: &[f64]) -> FilterBank {
        FilterBank {
            duration: kernel.len(),
            basis: vec![kernel.to_vec()],
        }
    }

    #[test]
    fn single_basis_peaks_at_center() {
        let bank = raised_cosine_bank(1, 10);
        // center at d = 1 for a single kernel
        assert!((bank.kernel(0, 1) - 1.0).abs() < 1e-15);
        let max = (1..=10).map(|d| bank.kernel(0, d)).fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernels_vanish_at_half_width() {
        let bank = raised_cosine_bank(3, 10);
        // M=3, D=10: w = 3, centers 1, 5.5, 10. Kernel 0 at d = 4 has |d-c| = w.
        assert!(bank.kernel(0, 4).abs() < 1e-15);
        for m in 0..3 {
            for d in 1..=10 {
                let v = bank.kernel(m, d);
                assert!((0.0..=1.0).contains(&v));
            }
            assert!((1..=10).any(|d| bank.kernel(m, d) > 0.0));
        }
    }

    #[test]
    fn three_basis_matches_direct_formula() {
        let (m_count, dur) = (3, 10);
        let bank = raised_cosine_bank(m_count, dur);
        let span = (dur - 1) as f64;
        let w = span / 3.0;
        for m in 0..m_count {
            let c = 1.0 + m as f64 * span / 2.0;
            for d in 1..=dur {
                let dist = d as f64 - c;
                let expect = if dist.abs() <= w {
                    0.5 * (1.0 + libm::cos(core::f64::consts::PI * dist / w))
                } else {
                    0.0
                };
                assert!((bank.kernel(m, d) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_follows_direct_summation() {
        let bank = bank_from(&[1.0, 0.5]);
        let mut state = TraceState::new(&bank);
        let spikes = [true, false, false];
        let mut seen = vec![state.value(0)]; // value used at t = 1
        for &s in &spikes {
            state.push(&bank, s);
            seen.push(state.value(0));
        }
        // value used at t = 1, 2, 3 (plus the post-stream value)
        assert_eq!(&seen[..3], &[0.0, 1.0, 0.5]);
    }

    #[test]
    fn delay_line_kernel() {
        let bank = bank_from(&[1.0]);
        let mut state = TraceState::new(&bank);
        let mut seen = vec![state.value(0)];
        for _ in 0..3 {
            state.push(&bank, true);
            seen.push(state.value(0));
        }
        assert_eq!(&seen[..3], &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_stream_keeps_zero_trace() {
        let bank = raised_cosine_bank(2, 10);
        let mut state = TraceState::new(&bank);
        for _ in 0..50 {
            state.push(&bank, false);
            assert!(state.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn incremental_matches_oracle_on_random_streams() {
        use rand::Rng;
        let bank = raised_cosine_bank(3, 10);
        let mut rng = crate::rng::stream_rng(99, 0, 0);
        let stream: Vec<bool> = (0..200).map(|_| rng.gen::<f64>() < 0.3).collect();
        let mut state = TraceState::new(&bank);
        for (t, &s) in stream.iter().enumerate() {
            state.push(&bank, s);
            for m in 0..bank.num_basis() {
                // direct sum over the window: spike at step t-d+1 weighted by a_d
                let mut direct = 0.0;
                for d in 1..=bank.duration() {
                    if d <= t + 1 && stream[t + 1 - d] {
                        direct += bank.kernel(m, d);
                    }
                }
                assert!(
                    (state.value(m) - direct).abs() < 1e-12,
                    "t={t} m={m}: {} vs {direct}",
                    state.value(m)
                );
            }
        }
    }

    #[test]
    fn causality_future_spike_does_not_change_past_trace() {
        // two streams identical up to t = 5, diverging afterwards: every trace
        // value recorded up to t = 5 must be identical
        let bank = raised_cosine_bank(2, 10);
        let mut a = TraceState::new(&bank);
        let mut b = TraceState::new(&bank);
        let mut seen_a = Vec::new();
        let mut seen_b = Vec::new();
        for step in 0..12 {
            let common = step % 2 == 0;
            a.push(&bank, common);
            b.push(&bank, if step < 5 { common } else { !common });
            seen_a.push(a.values().to_vec());
            seen_b.push(b.values().to_vec());
        }
        for step in 0..5 {
            assert_eq!(seen_a[step], seen_b[step]);
        }
    }
}
