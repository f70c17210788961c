//! Topology, parameter storage, membrane-potential dynamics, sigmoid spiking,
//! and K-parallel-sample forward execution with visible clamping (training)
//! or free sampling (inference).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::filters::{FilterBank, TraceState};
use crate::math::sigmoid;
use crate::raster::SpikeRaster;
use crate::rng::stream_rng;

pub use crate::math::sigmoid as spike_probability;

/// "Sample" index reserved for parameter-initialization streams so they never
/// collide with forward-pass streams.
const INIT_STREAM: u64 = 0xffff_ffff_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeuronRole {
    Hidden,
    Visible,
}

/// Directed synaptic graph over exogeneous inputs and neurons.
///
/// Source channels are indexed `0..num_inputs` for inputs and
/// `num_inputs + j` for neuron `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    num_inputs: usize,
    roles: Vec<NeuronRole>,
    hidden_ids: Vec<usize>,
    visible_ids: Vec<usize>,
    pre: Vec<Vec<usize>>,
}

impl Topology {
    /// The experiment architecture: hidden neurons receive all exogeneous
    /// inputs (optionally plus the other hidden neurons); visible neurons
    /// receive all inputs and all hidden neurons, with no visible-to-visible
    /// recurrence.
    pub fn layered(
        num_inputs: usize,
        num_hidden: usize,
        num_visible: usize,
        hidden_recurrence: bool,
    ) -> Self {
        assert!(num_visible > 0, "need at least one visible neuron");
        let num_neurons = num_hidden + num_visible;
        let mut roles = vec![NeuronRole::Hidden; num_hidden];
        roles.extend(vec![NeuronRole::Visible; num_visible]);
        let mut pre = Vec::with_capacity(num_neurons);
        for (i, role) in roles.iter().enumerate() {
            let mut sources: Vec<usize> = (0..num_inputs).collect();
            match role {
                NeuronRole::Hidden => {
                    if hidden_recurrence {
                        sources.extend((0..num_hidden).filter(|&j| j != i).map(|j| num_inputs + j));
                    }
                }
                NeuronRole::Visible => {
                    sources.extend((0..num_hidden).map(|j| num_inputs + j));
                }
            }
            pre.push(sources);
        }
        Self::custom(num_inputs, roles, pre)
    }

    /// Arbitrary directed graph; cycles are allowed.
    pub fn custom(num_inputs: usize, roles: Vec<NeuronRole>, pre: Vec<Vec<usize>>) -> Self {
        assert_eq!(roles.len(), pre.len());
        let num_sources = num_inputs + roles.len();
        for sources in &pre {
            for &s in sources {
                assert!(s < num_sources, "pre-synaptic source out of range");
            }
        }
        let hidden_ids = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == NeuronRole::Hidden)
            .map(|(i, _)| i)
            .collect();
        let visible_ids = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == NeuronRole::Visible)
            .map(|(i, _)| i)
            .collect();
        Self {
            num_inputs,
            roles,
            hidden_ids,
            visible_ids,
            pre,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_neurons(&self) -> usize {
        self.roles.len()
    }

    pub fn num_sources(&self) -> usize {
        self.num_inputs + self.roles.len()
    }

    pub fn role(&self, neuron: usize) -> NeuronRole {
        self.roles[neuron]
    }

    pub fn hidden_ids(&self) -> &[usize] {
        &self.hidden_ids
    }

    pub fn visible_ids(&self) -> &[usize] {
        &self.visible_ids
    }

    /// Pre-synaptic source channels of `neuron`.
    pub fn pre(&self, neuron: usize) -> &[usize] {
        &self.pre[neuron]
    }

    pub fn source_of_neuron(&self, neuron: usize) -> usize {
        self.num_inputs + neuron
    }
}

/// Per-neuron learnable values: synaptic weights (one per pre-synaptic source
/// per basis kernel), self-memory weight, bias.
///
/// Layout per neuron: `[w(p0,m0), w(p0,m1), ..., w_self, bias]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    num_bases: usize,
    neurons: Vec<Vec<f64>>,
}

impl ModelParams {
    pub fn zeros(topology: &Topology, num_bases: usize) -> Self {
        assert!(num_bases >= 1);
        let neurons = (0..topology.num_neurons())
            .map(|i| vec![0.0; topology.pre(i).len() * num_bases + 2])
            .collect();
        Self { num_bases, neurons }
    }

    pub fn num_bases(&self) -> usize {
        self.num_bases
    }

    pub fn num_neurons(&self) -> usize {
        self.neurons.len()
    }

    /// Flat component vector of neuron `i` (synaptic weights, self weight, bias).
    pub fn values(&self, neuron: usize) -> &[f64] {
        &self.neurons[neuron]
    }

    pub fn values_mut(&mut self, neuron: usize) -> &mut [f64] {
        &mut self.neurons[neuron]
    }

    pub fn syn_weight(&self, neuron: usize, pre_slot: usize, basis: usize) -> f64 {
        self.neurons[neuron][pre_slot * self.num_bases + basis]
    }

    pub fn set_syn_weight(&mut self, neuron: usize, pre_slot: usize, basis: usize, w: f64) {
        self.neurons[neuron][pre_slot * self.num_bases + basis] = w;
    }

    pub fn w_self(&self, neuron: usize) -> f64 {
        let n = self.neurons[neuron].len();
        self.neurons[neuron][n - 2]
    }

    pub fn set_w_self(&mut self, neuron: usize, w: f64) {
        let n = self.neurons[neuron].len();
        self.neurons[neuron][n - 2] = w;
    }

    pub fn bias(&self, neuron: usize) -> f64 {
        let n = self.neurons[neuron].len();
        self.neurons[neuron][n - 1]
    }

    pub fn set_bias(&mut self, neuron: usize, b: f64) {
        let n = self.neurons[neuron].len();
        self.neurons[neuron][n - 1] = b;
    }

    pub fn all_finite(&self) -> bool {
        self.neurons.iter().flatten().all(|v| v.is_finite())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Weights i.i.d. zero-mean Gaussian with standard deviation `scale`; biases
/// zero. Deterministic given `seed`.
pub fn init_params(topology: &Topology, num_bases: usize, seed: u64, scale: f64) -> ModelParams {
    assert!(scale >= 0.0);
    let mut params = ModelParams::zeros(topology, num_bases);
    for i in 0..topology.num_neurons() {
        let mut rng = stream_rng(seed, INIT_STREAM, i as u64);
        let vals = params.values_mut(i);
        let n = vals.len();
        // all weights including self-memory; bias (last slot) stays 0
        for v in vals.iter_mut().take(n - 1) {
            *v = scale * gaussian(&mut rng);
        }
    }
    params
}

/// Weighted sum of synaptic traces, somatic trace, and bias.
///
/// `syn_weights` and `syn_traces` are flattened in the same
/// (pre-synaptic slot, basis) order.
pub fn membrane_potential(
    syn_weights: &[f64],
    syn_traces: &[f64],
    w_self: f64,
    som_trace: f64,
    bias: f64,
) -> f64 {
    debug_assert_eq!(syn_weights.len(), syn_traces.len());
    let mut u = bias + w_self * som_trace;
    for (w, s) in syn_weights.iter().zip(syn_traces) {
        u += w * s;
    }
    u
}

/// Network-level immutable configuration: graph plus filter banks.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub topology: Topology,
    pub syn_filters: FilterBank,
    pub som_filters: FilterBank,
}

impl NetworkConfig {
    pub fn new(topology: Topology, syn_filters: FilterBank, som_filters: FilterBank) -> Self {
        assert_eq!(
            som_filters.num_basis(),
            1,
            "somatic filter is a single kernel"
        );
        Self {
            topology,
            syn_filters,
            som_filters,
        }
    }
}

/// How visible neurons emit spikes during a forward step.
#[derive(Clone, Copy)]
pub enum VisibleMode<'a> {
    /// Outputs set to the target spikes (indexed by visible slot) in every sample.
    Clamped(&'a [bool]),
    /// Outputs sampled from the model.
    Free,
}

/// Per-sample dynamic state: filtered traces, membrane potentials, spike
/// probabilities, emitted spikes, and dedicated random streams.
#[derive(Debug, Clone)]
pub struct SampleState {
    sample_index: u64,
    syn_traces: Vec<TraceState>,
    som_traces: Vec<TraceState>,
    potentials: Vec<f64>,
    probs: Vec<f64>,
    spikes: Vec<bool>,
    rngs: Vec<ChaCha8Rng>,
}

impl SampleState {
    pub fn new(cfg: &NetworkConfig, master_seed: u64, sample_index: u64) -> Self {
        let n = cfg.topology.num_neurons();
        Self {
            sample_index,
            syn_traces: (0..cfg.topology.num_sources())
                .map(|_| TraceState::new(&cfg.syn_filters))
                .collect(),
            som_traces: (0..n).map(|_| TraceState::new(&cfg.som_filters)).collect(),
            potentials: vec![0.0; n],
            probs: vec![0.0; n],
            spikes: vec![false; n],
            rngs: (0..n)
                .map(|i| stream_rng(master_seed, sample_index, i as u64))
                .collect(),
        }
    }

    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    /// Membrane potential of `neuron` from the current (pre-advance) traces.
    pub fn potential(&self, neuron: usize) -> f64 {
        self.potentials[neuron]
    }

    /// Spiking probability of `neuron` at the current step.
    pub fn prob(&self, neuron: usize) -> f64 {
        self.probs[neuron]
    }

    /// Spike emitted by `neuron` at the current step.
    pub fn spike(&self, neuron: usize) -> bool {
        self.spikes[neuron]
    }

    /// Current synaptic trace values (one per basis) of a source channel.
    pub fn syn_trace(&self, source: usize) -> &[f64] {
        self.syn_traces[source].values()
    }

    /// Current somatic trace value of `neuron`.
    pub fn som_trace(&self, neuron: usize) -> f64 {
        self.som_traces[neuron].value(0)
    }

    /// Phase 1: compute `u` and `sigma(u)` for every neuron from the traces
    /// accumulated up to the previous step.
    pub fn compute_potentials(&mut self, cfg: &NetworkConfig, params: &ModelParams) {
        let m = params.num_bases();
        for i in 0..cfg.topology.num_neurons() {
            let mut u = params.bias(i) + params.w_self(i) * self.som_traces[i].value(0);
            for (slot, &src) in cfg.topology.pre(i).iter().enumerate() {
                let traces = self.syn_traces[src].values();
                for (basis, &trace) in traces.iter().enumerate().take(m) {
                    u += params.syn_weight(i, slot, basis) * trace;
                }
            }
            self.potentials[i] = u;
            self.probs[i] = sigmoid(u);
        }
    }

    /// Phase 2: emit spikes. Hidden neurons always sample; visible neurons
    /// sample or are clamped to `targets` depending on `mode`.
    pub fn emit_spikes(&mut self, cfg: &NetworkConfig, mode: VisibleMode<'_>) {
        let mut visible_slot = 0;
        for i in 0..cfg.topology.num_neurons() {
            self.spikes[i] = match (cfg.topology.role(i), mode) {
                (NeuronRole::Visible, VisibleMode::Clamped(targets)) => {
                    let s = targets[visible_slot];
                    visible_slot += 1;
                    s
                }
                _ => self.rngs[i].gen::<f64>() < self.probs[i],
            };
        }
    }

    /// Override the emitted spikes of every neuron (replay with a frozen
    /// spike path; random streams are left untouched).
    pub fn force_spikes(&mut self, spikes: &[bool]) {
        assert_eq!(spikes.len(), self.spikes.len());
        self.spikes.copy_from_slice(spikes);
    }

    /// Phase 3: feed the input spikes at the current step and the spikes just
    /// emitted into the synaptic and somatic traces.
    pub fn advance_traces(&mut self, cfg: &NetworkConfig, inputs_t: &[bool]) {
        assert_eq!(
            inputs_t.len(),
            cfg.topology.num_inputs(),
            "input spike vector length mismatch"
        );
        for (src, &spike) in inputs_t.iter().enumerate() {
            self.syn_traces[src].push(&cfg.syn_filters, spike);
        }
        for i in 0..cfg.topology.num_neurons() {
            self.syn_traces[cfg.topology.source_of_neuron(i)]
                .push(&cfg.syn_filters, self.spikes[i]);
            self.som_traces[i].push(&cfg.som_filters, self.spikes[i]);
        }
    }
}

/// One clamped forward step on every sample: visible outputs are set to
/// `targets` (indexed by visible slot) identically across samples, hidden
/// neurons sample from their own streams.
pub fn forward_step_clamped(
    cfg: &NetworkConfig,
    params: &ModelParams,
    states: &mut [SampleState],
    inputs_t: &[bool],
    targets_t: &[bool],
) {
    assert!(!states.is_empty());
    assert_eq!(targets_t.len(), cfg.topology.visible_ids().len());
    for state in states.iter_mut() {
        state.compute_potentials(cfg, params);
        state.emit_spikes(cfg, VisibleMode::Clamped(targets_t));
        state.advance_traces(cfg, inputs_t);
    }
}

/// `k_i` independent free-running passes over an input raster; returns the
/// visible spike rasters, deterministic given `seed`.
pub fn run_free(
    cfg: &NetworkConfig,
    params: &ModelParams,
    input: &SpikeRaster,
    k_i: usize,
    seed: u64,
) -> Vec<SpikeRaster> {
    assert!(k_i >= 1);
    assert_eq!(input.num_neurons(), cfg.topology.num_inputs());
    let horizon = input.horizon_t();
    let num_visible = cfg.topology.visible_ids().len();
    (0..k_i)
        .map(|k| {
            let mut state = SampleState::new(cfg, seed, k as u64);
            let mut out = SpikeRaster::zeros(num_visible, horizon);
            for t in 1..=horizon {
                let inputs = input.column(t);
                state.compute_potentials(cfg, params);
                state.emit_spikes(cfg, VisibleMode::Free);
                for (slot, &visible) in cfg.topology.visible_ids().iter().enumerate() {
                    if state.spike(visible) {
                        out.set(slot, t, true);
                    }
                }
                state.advance_traces(cfg, &inputs);
            }
            out
        })
        .collect()
}
