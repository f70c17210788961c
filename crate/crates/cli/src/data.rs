//! Dataset construction: event-list files or seeded synthetic patterns.

use std::path::Path;

use msnn_core::raster::{parse_raster, split_memorization, LabeledExample, SpikeRaster};
use msnn_core::rng::stream_rng;
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::CliError;

// seed-stream tags keeping dataset draws disjoint from training draws
const PROTO_STREAM: u64 = 0xffff_ffff_0000_0010;
const FLIP_STREAM: u64 = 0xffff_ffff_0000_0011;

fn read_raster(path: &Path) -> Result<SpikeRaster, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_raster(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Bernoulli raster on its own seed stream.
pub fn synth_raster(
    seed: u64,
    stream: u64,
    neurons: usize,
    horizon: usize,
    rate: f64,
) -> SpikeRaster {
    let mut raster = SpikeRaster::zeros(neurons, horizon);
    for neuron in 0..neurons {
        let mut rng = stream_rng(seed, stream, neuron as u64);
        for t in 1..=horizon {
            raster.set(neuron, t, rng.gen::<f64>() < rate);
        }
    }
    raster
}

pub fn load_memorize(cfg: &ExperimentConfig) -> Result<LabeledExample, CliError> {
    let need = |opt: Option<usize>, name: &str| {
        opt.ok_or_else(|| CliError::Config(format!("memorize needs data.{name}")))
    };
    let boundary = need(cfg.data.boundary, "boundary")?;
    let raster = match cfg.data.source.as_str() {
        "synthetic" => {
            let neurons = need(cfg.data.neurons, "neurons")?;
            let horizon = need(cfg.data.horizon, "horizon")?;
            let rate = cfg
                .data
                .rate
                .ok_or_else(|| CliError::Config("memorize needs data.rate".into()))?;
            synth_raster(cfg.seed, PROTO_STREAM, neurons, horizon, rate)
        }
        _ => {
            let path =
                cfg.data.path.as_ref().ok_or_else(|| {
                    CliError::Config("file-backed memorize needs data.path".into())
                })?;
            read_raster(path)?
        }
    };
    let example =
        split_memorization(&raster, boundary).map_err(|e| CliError::Data(format!("{e}")))?;
    if example.input.num_neurons() != cfg.topology.inputs
        || example.target.num_neurons() != cfg.topology.visible
    {
        return Err(CliError::Config(
            "data split does not match topology input/visible sizes".into(),
        ));
    }
    Ok(example)
}

/// Classification set: `(input raster, label)` pairs in a fixed order.
pub fn load_classify(cfg: &ExperimentConfig) -> Result<Vec<(SpikeRaster, usize)>, CliError> {
    match cfg.data.source.as_str() {
        "synthetic" => {
            let classes = cfg.data.num_classes.unwrap();
            let per_class = cfg.data.examples_per_class.unwrap();
            let horizon = cfg
                .data
                .horizon
                .ok_or_else(|| CliError::Config("classify needs data.horizon".into()))?;
            let rate = cfg
                .data
                .rate
                .ok_or_else(|| CliError::Config("classify needs data.rate".into()))?;
            let flip = cfg.data.flip_prob.unwrap_or(0.0);
            let prototypes: Vec<SpikeRaster> = (0..classes)
                .map(|c| {
                    synth_raster(
                        cfg.seed.wrapping_add(c as u64),
                        PROTO_STREAM,
                        cfg.topology.inputs,
                        horizon,
                        rate,
                    )
                })
                .collect();
            // interleave classes so the online stream mixes them
            let mut out = Vec::with_capacity(classes * per_class);
            for e in 0..per_class {
                for (c, proto) in prototypes.iter().enumerate() {
                    let mut raster = proto.clone();
                    let idx = (e * classes + c) as u64;
                    let mut rng = stream_rng(cfg.seed, FLIP_STREAM, idx);
                    for neuron in 0..raster.num_neurons() {
                        for t in 1..=horizon {
                            if rng.gen::<f64>() < flip {
                                let v = raster.get(neuron, t);
                                raster.set(neuron, t, !v);
                            }
                        }
                    }
                    out.push((raster, c));
                }
            }
            Ok(out)
        }
        _ => {
            let paths = cfg.data.paths.as_ref().unwrap();
            let labels = cfg.data.labels.as_ref().unwrap();
            let mut out = Vec::with_capacity(paths.len());
            for (path, &label) in paths.iter().zip(labels) {
                let raster = read_raster(path)?;
                if raster.num_neurons() != cfg.topology.inputs {
                    return Err(CliError::Data(format!(
                        "{}: expected {} input rows, found {}",
                        path.display(),
                        cfg.topology.inputs,
                        raster.num_neurons()
                    )));
                }
                out.push((raster, label));
            }
            Ok(out)
        }
    }
}
