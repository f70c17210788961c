//! Exhaustive check of the Monte Carlo log-loss estimator.
//!
//! With two hidden neurons and three time steps there are only 2^6 = 64
//! hidden spike paths. The estimator averages the clamped visible
//! cross-entropy over sampled paths, so its expectation is the sum over all
//! paths of (path probability under the causally conditioned sampling
//! distribution) x (total visible cross-entropy along that path). The
//! R = 1e5 estimate must land within 1% of that exact expectation.

use msnn_core::filters::raised_cosine_bank;
use msnn_core::math::sigmoid;
use msnn_core::network::{init_params, NetworkConfig, SampleState, Topology};
use msnn_core::objectives::{cross_entropy, estimate_log_loss};
use msnn_core::raster::{LabeledExample, SpikeRaster};

#[test]
fn estimate_matches_exhaustive_enumeration() {
    let net = NetworkConfig::new(
        Topology::layered(2, 2, 1, false),
        raised_cosine_bank(2, 4),
        raised_cosine_bank(1, 4),
    );
    let params = init_params(&net.topology, 2, 19, 0.6);
    let steps = 3;
    let hidden = net.topology.hidden_ids().to_vec();
    let visible = net.topology.visible_ids().to_vec();

    let mut input = SpikeRaster::zeros(2, steps);
    input.set(0, 1, true);
    input.set(1, 2, true);
    input.set(0, 3, true);
    let mut target = SpikeRaster::zeros(1, steps);
    target.set(0, 1, true);
    target.set(0, 3, true);
    let example = LabeledExample {
        input: input.clone(),
        target: target.clone(),
        label: None,
    };

    // exact expectation over all hidden paths
    let path_bits = hidden.len() * steps;
    let mut exact = 0.0;
    let mut prob_mass = 0.0;
    for path in 0u32..(1 << path_bits) {
        let mut state = SampleState::new(&net, 0, 0);
        let mut prob = 1.0;
        let mut ce = 0.0;
        for t in 1..=steps {
            state.compute_potentials(&net, &params);
            let targets = target.column(t);
            for (slot, &i) in visible.iter().enumerate() {
                ce += cross_entropy(targets[slot], sigmoid(state.potential(i)));
            }
            let mut spikes = vec![false; net.topology.num_neurons()];
            for (h_slot, &i) in hidden.iter().enumerate() {
                let bit = (path >> ((t - 1) * hidden.len() + h_slot)) & 1 == 1;
                let p = sigmoid(state.potential(i));
                prob *= if bit { p } else { 1.0 - p };
                spikes[i] = bit;
            }
            for (slot, &i) in visible.iter().enumerate() {
                spikes[i] = targets[slot];
            }
            state.force_spikes(&spikes);
            state.advance_traces(&net, &input.column(t));
        }
        exact += prob * ce;
        prob_mass += prob;
    }
    assert!(
        (prob_mass - 1.0).abs() < 1e-12,
        "path probabilities must sum to 1"
    );

    let estimate = estimate_log_loss(&net, &params, &example, 100_000, 77);
    let rel = (estimate - exact).abs() / exact;
    assert!(
        rel < 0.01,
        "estimate {estimate} vs exact {exact}: relative error {rel}"
    );
}

#[test]
fn estimate_exact_without_hidden_neurons() {
    // no latent randomness: every realization is identical and equals the
    // deterministic clamped cross-entropy
    let net = NetworkConfig::new(
        Topology::layered(2, 0, 2, false),
        raised_cosine_bank(2, 4),
        raised_cosine_bank(1, 4),
    );
    let params = init_params(&net.topology, 2, 3, 0.5);
    let mut input = SpikeRaster::zeros(2, 4);
    input.set(0, 1, true);
    input.set(1, 3, true);
    let mut target = SpikeRaster::zeros(2, 4);
    target.set(0, 2, true);
    target.set(1, 4, true);
    let example = LabeledExample {
        input,
        target,
        label: None,
    };
    let one = estimate_log_loss(&net, &params, &example, 1, 5);
    let many = estimate_log_loss(&net, &params, &example, 50, 99);
    assert!((one - many).abs() < 1e-12);
    assert!(one > 0.0);
}
