//! Spike-train data model, the SRAS text format, synthetic generation, and
//! task encodings (memorization split, classification labels).
//!
//! Time is 1-indexed (`t = 1..=T`) to match the discrete-time convention of
//! the dynamics; neuron indices are 0-based.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::rng::stream_rng;

/// Binary spike matrix over `num_neurons x horizon_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeRaster {
    num_neurons: usize,
    horizon_t: usize,
    /// Row-major: `spikes[neuron * horizon_t + (t - 1)]`.
    spikes: Vec<bool>,
}

impl SpikeRaster {
    pub fn zeros(num_neurons: usize, horizon_t: usize) -> Self {
        assert!(num_neurons > 0 && horizon_t > 0, "raster must be non-empty");
        Self {
            num_neurons,
            horizon_t,
            spikes: vec![false; num_neurons * horizon_t],
        }
    }

    pub fn num_neurons(&self) -> usize {
        self.num_neurons
    }

    pub fn horizon_t(&self) -> usize {
        self.horizon_t
    }

    /// Spike of `neuron` at 1-indexed time `t`.
    pub fn get(&self, neuron: usize, t: usize) -> bool {
        assert!(neuron < self.num_neurons && (1..=self.horizon_t).contains(&t));
        self.spikes[neuron * self.horizon_t + (t - 1)]
    }

    pub fn set(&mut self, neuron: usize, t: usize, value: bool) {
        assert!(neuron < self.num_neurons && (1..=self.horizon_t).contains(&t));
        self.spikes[neuron * self.horizon_t + (t - 1)] = value;
    }

    /// Spikes of all neurons at time `t` as a vector of booleans.
    pub fn column(&self, t: usize) -> Vec<bool> {
        (0..self.num_neurons).map(|i| self.get(i, t)).collect()
    }

    pub fn count_spikes(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }

    pub fn row_spike_count(&self, neuron: usize) -> usize {
        (1..=self.horizon_t)
            .filter(|&t| self.get(neuron, t))
            .count()
    }

    /// Copy rows `[from, to)` into a new raster.
    pub fn slice_rows(&self, from: usize, to: usize) -> SpikeRaster {
        assert!(from < to && to <= self.num_neurons);
        let mut out = SpikeRaster::zeros(to - from, self.horizon_t);
        for i in from..to {
            for t in 1..=self.horizon_t {
                out.set(i - from, t, self.get(i, t));
            }
        }
        out
    }
}

/// Exogeneous-input / desired-output pairing, optionally labeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub input: SpikeRaster,
    pub target: SpikeRaster,
    pub label: Option<usize>,
}

impl LabeledExample {
    pub fn new(input: SpikeRaster, target: SpikeRaster, label: Option<usize>) -> Self {
        assert_eq!(
            input.horizon_t(),
            target.horizon_t(),
            "input and target horizons must match"
        );
        Self {
            input,
            target,
            label,
        }
    }

    pub fn horizon_t(&self) -> usize {
        self.input.horizon_t()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RasterError {
    MalformedHeader {
        line: usize,
        detail: String,
    },
    MalformedEvent {
        line: usize,
        detail: String,
    },
    EventOutOfRange {
        line: usize,
        t: usize,
        neuron: usize,
    },
    DuplicateEvent {
        line: usize,
        t: usize,
        neuron: usize,
    },
    BoundaryOutOfRange {
        boundary: usize,
        num_neurons: usize,
    },
    LabelOutOfRange {
        label: usize,
        num_classes: usize,
    },
}

impl fmt::Display for RasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RasterError::MalformedHeader { line, detail } => {
                write!(f, "line {line}: malformed header: {detail}")
            }
            RasterError::MalformedEvent { line, detail } => {
                write!(f, "line {line}: malformed event: {detail}")
            }
            RasterError::EventOutOfRange { line, t, neuron } => {
                write!(
                    f,
                    "line {line}: event out of range (t={t}, neuron={neuron})"
                )
            }
            RasterError::DuplicateEvent { line, t, neuron } => {
                write!(f, "line {line}: duplicate event (t={t}, neuron={neuron})")
            }
            RasterError::BoundaryOutOfRange {
                boundary,
                num_neurons,
            } => {
                write!(
                    f,
                    "split boundary {boundary} out of range for {num_neurons} neurons"
                )
            }
            RasterError::LabelOutOfRange { label, num_classes } => {
                write!(f, "label {label} out of range for {num_classes} classes")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RasterError {}

/// Parse an SRAS v1 document.
///
/// Format: header line `sras 1 <T> <N>`, then one `<t> <neuron>` event per
/// non-empty line with `1 <= t <= T` and `0 <= neuron < N`.
pub fn parse_raster(text: &str) -> Result<SpikeRaster, RasterError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(RasterError::MalformedHeader {
        line: 1,
        detail: String::from("empty input"),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "sras" || fields[1] != "1" {
        return Err(RasterError::MalformedHeader {
            line: 1,
            detail: format!("expected `sras 1 <T> <N>`, got `{header}`"),
        });
    }
    let horizon_t: usize = fields[2]
        .parse()
        .map_err(|_| RasterError::MalformedHeader {
            line: 1,
            detail: format!("bad horizon `{}`", fields[2]),
        })?;
    let num_neurons: usize = fields[3]
        .parse()
        .map_err(|_| RasterError::MalformedHeader {
            line: 1,
            detail: format!("bad neuron count `{}`", fields[3]),
        })?;
    if horizon_t == 0 || num_neurons == 0 {
        return Err(RasterError::MalformedHeader {
            line: 1,
            detail: String::from("T and N must be positive"),
        });
    }

    let mut raster = SpikeRaster::zeros(num_neurons, horizon_t);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(RasterError::MalformedEvent {
                line: line_no,
                detail: format!("expected `<t> <neuron>`, got `{line}`"),
            });
        }
        let t: usize = parts[0].parse().map_err(|_| RasterError::MalformedEvent {
            line: line_no,
            detail: format!("bad time `{}`", parts[0]),
        })?;
        let neuron: usize = parts[1].parse().map_err(|_| RasterError::MalformedEvent {
            line: line_no,
            detail: format!("bad neuron `{}`", parts[1]),
        })?;
        if t < 1 || t > horizon_t || neuron >= num_neurons {
            return Err(RasterError::EventOutOfRange {
                line: line_no,
                t,
                neuron,
            });
        }
        if raster.get(neuron, t) {
            return Err(RasterError::DuplicateEvent {
                line: line_no,
                t,
                neuron,
            });
        }
        raster.set(neuron, t, true);
    }
    Ok(raster)
}

/// Serialize to SRAS v1; events in lexicographic `(t, neuron)` order.
pub fn write_raster(raster: &SpikeRaster) -> String {
    let mut out = format!("sras 1 {} {}\n", raster.horizon_t(), raster.num_neurons());
    for t in 1..=raster.horizon_t() {
        for neuron in 0..raster.num_neurons() {
            if raster.get(neuron, t) {
                out.push_str(&format!("{t} {neuron}\n"));
            }
        }
    }
    out
}

/// Split rows into top-half input `[0, boundary)` and lower-half target
/// `[boundary, num_neurons)`.
pub fn split_memorization(
    raster: &SpikeRaster,
    boundary: usize,
) -> Result<LabeledExample, RasterError> {
    if boundary == 0 || boundary >= raster.num_neurons() {
        return Err(RasterError::BoundaryOutOfRange {
            boundary,
            num_neurons: raster.num_neurons(),
        });
    }
    let input = raster.slice_rows(0, boundary);
    let target = raster.slice_rows(boundary, raster.num_neurons());
    Ok(LabeledExample::new(input, target, None))
}

/// One visible neuron per class: row `label` all ones over `t = 1..=T`.
pub fn encode_labels(
    label: usize,
    num_classes: usize,
    horizon_t: usize,
) -> Result<SpikeRaster, RasterError> {
    if label >= num_classes {
        return Err(RasterError::LabelOutOfRange { label, num_classes });
    }
    let mut raster = SpikeRaster::zeros(num_classes, horizon_t);
    for t in 1..=horizon_t {
        raster.set(label, t, true);
    }
    Ok(raster)
}

/// i.i.d. Bernoulli(`rate`) raster, deterministic given `seed`.
pub fn synth_pattern(seed: u64, num_neurons: usize, horizon_t: usize, rate: f64) -> SpikeRaster {
    assert!((0.0..=1.0).contains(&rate), "rate must be a probability");
    let mut raster = SpikeRaster::zeros(num_neurons, horizon_t);
    for neuron in 0..num_neurons {
        let mut rng = stream_rng(seed, 0, neuron as u64);
        for t in 1..=horizon_t {
            raster.set(neuron, t, rng.gen::<f64>() < rate);
        }
    }
    raster
}
