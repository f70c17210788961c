//! Multi-sample online learning rules.
//!
//! All rules share the same skeleton: K clamped forward passes per step,
//! per-sample discounted eligibility traces of the cross-entropy derivative,
//! a central reduction over the per-sample visible log-weights, and a
//! three-factor parameter update `theta += eta * learning_signal * trace`.
//! They differ in the learning signals sent to visible and hidden neurons
//! and, consequently, in the communication load between neurons and the
//! central processor.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sigmoid;
use crate::network::{ModelParams, NetworkConfig, NeuronRole, SampleState, VisibleMode};
use crate::objectives::{cross_entropy, log_marginal_estimate, softmax_weights, SampleLogWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Gem,
    Mb,
    Iw,
    /// The single-sample estimator of prior work: MB with K = 1.
    Single,
}

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub rule: Rule,
    pub num_samples: usize,
    pub eta: f64,
    /// Discount of the update traces and log-weights.
    pub gamma: f64,
    /// Discount of the baseline accumulators.
    pub kappa_b: f64,
    pub lr_decay_factor: f64,
    /// Presentations between learning-rate decays; `None` keeps eta constant.
    pub lr_decay_period: Option<u64>,
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.num_samples < 1 {
            return Err("K must be at least 1");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err("gamma must lie in (0, 1)");
        }
        if !(self.kappa_b > 0.0 && self.kappa_b < 1.0) {
            return Err("kappa_b must lie in (0, 1)");
        }
        if self.eta <= 0.0 {
            return Err("eta must be positive");
        }
        if self.rule == Rule::Single && self.num_samples != 1 {
            return Err("the single-sample rule requires K = 1");
        }
        Ok(())
    }

    /// The rule actually executed (`Single` is MB with K = 1).
    fn effective_rule(&self) -> Rule {
        match self.rule {
            Rule::Single => Rule::Mb,
            r => r,
        }
    }
}

/// Per-step and cumulative unicast/broadcast real-number counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommLoadCounters {
    pub step_unicast: u64,
    pub step_broadcast: u64,
    pub total_unicast: u64,
    pub total_broadcast: u64,
}

impl CommLoadCounters {
    fn record(&mut self, unicast: u64, broadcast: u64) {
        self.step_unicast = unicast;
        self.step_broadcast = broadcast;
        self.total_unicast += unicast;
        self.total_broadcast += broadcast;
    }
}

/// Closed-form per-step communication loads `(unicast, broadcast)`.
pub fn comm_load(rule: Rule, k: usize, size_x: usize, size_h: usize) -> (u64, u64) {
    assert!(k >= 1);
    let (k, x, h) = (k as u64, size_x as u64, size_h as u64);
    match rule {
        Rule::Gem => (k * x, k * (x + h)),
        Rule::Mb => (k * x, k * h),
        Rule::Iw => (k * x, k * x + h),
        Rule::Single => (x, h),
    }
}

/// Learning rate after `presentations` full presentations of the data.
pub fn apply_lr_schedule(eta0: f64, presentations: u64, config: &LearnerConfig) -> f64 {
    match config.lr_decay_period {
        None => eta0,
        Some(period) => {
            let decays = presentations / period;
            eta0 / libm::pow(config.lr_decay_factor, decays as f64)
        }
    }
}

/// Variance-reduction baseline: componentwise ratio of discounted averages
/// `<signal * e^2> / <e^2>`, with 0/0 defined as 0.
#[derive(Debug, Clone)]
pub struct BaselineState {
    kappa_b: f64,
    num: Vec<f64>,
    den: Vec<f64>,
}

impl BaselineState {
    pub fn new(len: usize, kappa_b: f64) -> Self {
        assert!(kappa_b > 0.0 && kappa_b < 1.0);
        Self {
            kappa_b,
            num: vec![0.0; len],
            den: vec![0.0; len],
        }
    }

    /// Advance with the current learning signal and eligibility, returning
    /// the componentwise baseline.
    pub fn update(&mut self, signal: f64, eligibility: &[f64]) -> Vec<f64> {
        let squared: Vec<f64> = eligibility.iter().map(|e| e * e).collect();
        self.update_squared(signal, &squared)
    }

    /// Variant taking already-squared eligibility weights (used by the IW
    /// rule, whose weight is the sum of squared eligibilities over samples).
    pub fn update_squared(&mut self, signal: f64, elig_squared: &[f64]) -> Vec<f64> {
        assert_eq!(elig_squared.len(), self.num.len());
        let mut out = Vec::with_capacity(self.num.len());
        for (c, &e2) in elig_squared.iter().enumerate() {
            self.num[c] = self.kappa_b * self.num[c] + signal * e2;
            self.den[c] = self.kappa_b * self.den[c] + e2;
            out.push(if self.den[c] == 0.0 {
                0.0
            } else {
                self.num[c] / self.den[c]
            });
        }
        out
    }
}

/// One training sample: forward state plus its eligibility traces and the
/// scratch outputs of the latest step.
pub struct SampleSlot {
    state: SampleState,
    /// Per neuron, same layout as the neuron's parameter vector.
    elig: Vec<Vec<f64>>,
    step_visible_ce: f64,
    step_hidden_spikes: u64,
}

impl SampleSlot {
    pub fn state(&self) -> &SampleState {
        &self.state
    }

    pub fn eligibility(&self, neuron: usize) -> &[f64] {
        &self.elig[neuron]
    }
}

/// Runs the per-sample phase of a step over all slots. The closure is pure
/// per slot, so implementations may run slots in any order or in parallel;
/// results are identical either way.
pub trait SampleExecutor {
    fn for_each(&mut self, slots: &mut [SampleSlot], f: &(dyn Fn(&mut SampleSlot) + Sync));
}

/// Runs slots in index order on the current thread.
pub struct SequentialExecutor;

impl SampleExecutor for SequentialExecutor {
    fn for_each(&mut self, slots: &mut [SampleSlot], f: &(dyn Fn(&mut SampleSlot) + Sync)) {
        for slot in slots {
            f(slot);
        }
    }
}

/// Online multi-sample trainer: owns the K sample states, eligibility
/// traces, log-weights, baselines, and communication counters.
pub struct Trainer {
    config: LearnerConfig,
    slots: Vec<SampleSlot>,
    log_weights: SampleLogWeights,
    /// MB: per (sample, hidden slot); IW: one per hidden slot.
    mb_baselines: Vec<Vec<BaselineState>>,
    iw_baselines: Vec<BaselineState>,
    /// Update direction of the most recent step, before eta scaling.
    last_delta: Vec<Vec<f64>>,
    comm: CommLoadCounters,
    total_hidden_spikes: u64,
    steps: u64,
}

impl Trainer {
    pub fn new(
        net: &NetworkConfig,
        params: &ModelParams,
        config: LearnerConfig,
        master_seed: u64,
    ) -> Self {
        config.validate().expect("invalid learner config");
        let k = config.num_samples;
        let num_neurons = net.topology.num_neurons();
        let layout: Vec<usize> = (0..num_neurons).map(|i| params.values(i).len()).collect();
        let slots = (0..k)
            .map(|sample| SampleSlot {
                state: SampleState::new(net, master_seed, sample as u64),
                elig: layout.iter().map(|&len| vec![0.0; len]).collect(),
                step_visible_ce: 0.0,
                step_hidden_spikes: 0,
            })
            .collect();
        let hidden = net.topology.hidden_ids();
        let mb_baselines = (0..k)
            .map(|_| {
                hidden
                    .iter()
                    .map(|&i| BaselineState::new(layout[i], config.kappa_b))
                    .collect()
            })
            .collect();
        let iw_baselines = hidden
            .iter()
            .map(|&i| BaselineState::new(layout[i], config.kappa_b))
            .collect();
        let log_weights = SampleLogWeights::new(k, config.gamma);
        let last_delta = layout.iter().map(|&len| vec![0.0; len]).collect();
        Self {
            config,
            slots,
            log_weights,
            mb_baselines,
            iw_baselines,
            last_delta,
            comm: CommLoadCounters::default(),
            total_hidden_spikes: 0,
            steps: 0,
        }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn comm(&self) -> &CommLoadCounters {
        &self.comm
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn total_hidden_spikes(&self) -> u64 {
        self.total_hidden_spikes
    }

    pub fn log_weights(&self) -> &[f64] {
        self.log_weights.values()
    }

    pub fn sample(&self, k: usize) -> &SampleSlot {
        &self.slots[k]
    }

    /// Update direction of the most recent step, before scaling by eta.
    pub fn last_delta(&self, neuron: usize) -> &[f64] {
        &self.last_delta[neuron]
    }

    /// One online step at the current time: K clamped forward passes,
    /// eligibility updates, central reduction, and the parameter update for
    /// the configured rule.
    pub fn step(
        &mut self,
        net: &NetworkConfig,
        params: &mut ModelParams,
        inputs_t: &[bool],
        targets_t: &[bool],
        eta: f64,
        executor: &mut dyn SampleExecutor,
    ) {
        assert_eq!(targets_t.len(), net.topology.visible_ids().len());
        let gamma = self.config.gamma;

        // per-sample phase: forward, eligibility, visible cross-entropy
        {
            let params_ref: &ModelParams = params;
            executor.for_each(&mut self.slots, &move |slot: &mut SampleSlot| {
                advance_sample(net, params_ref, slot, inputs_t, targets_t, gamma);
            });
        }

        // central reduction
        let ces: Vec<f64> = self.slots.iter().map(|s| s.step_visible_ce).collect();
        self.log_weights.update(&ces);
        for slot in &self.slots {
            self.total_hidden_spikes += slot.step_hidden_spikes;
        }
        self.steps += 1;

        for delta in &mut self.last_delta {
            delta.iter_mut().for_each(|d| *d = 0.0);
        }

        let k = self.config.num_samples;
        let v = self.log_weights.values();
        let topo = &net.topology;
        match self.config.effective_rule() {
            Rule::Gem => {
                let weights = softmax_weights(v);
                for i in 0..topo.num_neurons() {
                    let delta = &mut self.last_delta[i];
                    for (slot, &w) in self.slots.iter().zip(&weights) {
                        for (d, &e) in delta.iter_mut().zip(&slot.elig[i]) {
                            *d += w * e;
                        }
                    }
                }
            }
            Rule::Mb => {
                let scale = 1.0 / k as f64;
                for i in 0..topo.num_neurons() {
                    match topo.role(i) {
                        NeuronRole::Visible => {
                            let delta = &mut self.last_delta[i];
                            for slot in &self.slots {
                                for (d, &e) in delta.iter_mut().zip(&slot.elig[i]) {
                                    *d += scale * e;
                                }
                            }
                        }
                        NeuronRole::Hidden => {}
                    }
                }
                for (h_slot, &i) in topo.hidden_ids().iter().enumerate() {
                    for (sample, slot) in self.slots.iter().enumerate() {
                        let baseline =
                            self.mb_baselines[sample][h_slot].update(v[sample], &slot.elig[i]);
                        let delta = &mut self.last_delta[i];
                        for (c, (&e, &b)) in slot.elig[i].iter().zip(&baseline).enumerate() {
                            delta[c] += scale * (v[sample] - b) * e;
                        }
                    }
                }
            }
            Rule::Iw => {
                let weights = softmax_weights(v);
                let log_r = log_marginal_estimate(v);
                for &i in topo.visible_ids() {
                    let delta = &mut self.last_delta[i];
                    for (slot, &w) in self.slots.iter().zip(&weights) {
                        for (d, &e) in delta.iter_mut().zip(&slot.elig[i]) {
                            *d += w * e;
                        }
                    }
                }
                for (h_slot, &i) in topo.hidden_ids().iter().enumerate() {
                    // squared-eligibility weight summed over samples
                    let len = self.last_delta[i].len();
                    let mut e_sq = vec![0.0; len];
                    let mut e_sum = vec![0.0; len];
                    for slot in &self.slots {
                        for (c, &e) in slot.elig[i].iter().enumerate() {
                            e_sq[c] += e * e;
                            e_sum[c] += e;
                        }
                    }
                    let baseline = self.iw_baselines[h_slot].update_squared(log_r, &e_sq);
                    let delta = &mut self.last_delta[i];
                    for (c, (&e, &b)) in e_sum.iter().zip(&baseline).enumerate() {
                        delta[c] += (log_r - b) * e;
                    }
                }
            }
            Rule::Single => unreachable!("normalized by effective_rule"),
        }

        for i in 0..topo.num_neurons() {
            let delta = &self.last_delta[i];
            for (p, &d) in params.values_mut(i).iter_mut().zip(delta) {
                *p += eta * d;
            }
        }
        assert!(
            params.all_finite(),
            "parameter update produced non-finite values"
        );

        let (unicast, broadcast) = comm_load(
            self.config.rule,
            k,
            topo.visible_ids().len(),
            topo.hidden_ids().len(),
        );
        self.comm.record(unicast, broadcast);
    }
}

/// Per-sample phase of one step: forward with clamped visibles, update the
/// discounted eligibility traces from the pre-advance traces, accumulate the
/// visible cross-entropy, then advance the traces.
fn advance_sample(
    net: &NetworkConfig,
    params: &ModelParams,
    slot: &mut SampleSlot,
    inputs_t: &[bool],
    targets_t: &[bool],
    gamma: f64,
) {
    let topo = &net.topology;
    slot.state.compute_potentials(net, params);
    slot.state.emit_spikes(net, VisibleMode::Clamped(targets_t));

    let num_bases = params.num_bases();
    for i in 0..topo.num_neurons() {
        let err = (slot.state.spike(i) as u8 as f64) - slot.state.prob(i);
        let elig = &mut slot.elig[i];
        let mut c = 0;
        for &src in topo.pre(i) {
            let traces = slot.state.syn_trace(src);
            for &trace in traces.iter().take(num_bases) {
                elig[c] = gamma * elig[c] + err * trace;
                c += 1;
            }
        }
        elig[c] = gamma * elig[c] + err * slot.state.som_trace(i);
        elig[c + 1] = gamma * elig[c + 1] + err; // bias factor is 1
    }

    slot.step_visible_ce = topo
        .visible_ids()
        .iter()
        .enumerate()
        .map(|(v_slot, &i)| cross_entropy(targets_t[v_slot], sigmoid(slot.state.potential(i))))
        .sum();
    slot.step_hidden_spikes = topo
        .hidden_ids()
        .iter()
        .filter(|&&i| slot.state.spike(i))
        .count() as u64;

    slot.state.advance_traces(net, inputs_t);
}
