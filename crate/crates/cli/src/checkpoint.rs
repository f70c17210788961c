//! ASCII parameter checkpoints with exact float round-trip.
//!
//! Layout: a header describing the layered topology and filter settings,
//! then one line per parameter. Values are printed with 17 significant
//! digits, which round-trips f64 exactly.

use std::fmt::Write as _;
use std::path::Path;

use msnn_core::filters::raised_cosine_bank;
use msnn_core::network::{ModelParams, NetworkConfig, Topology};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckpointHeader {
    pub inputs: usize,
    pub hidden: usize,
    pub visible: usize,
    pub hidden_recurrence: bool,
    pub syn_bases: usize,
    pub syn_duration: usize,
    pub som_duration: usize,
}

impl CheckpointHeader {
    pub fn network(&self) -> NetworkConfig {
        NetworkConfig::new(
            Topology::layered(
                self.inputs,
                self.hidden,
                self.visible,
                self.hidden_recurrence,
            ),
            raised_cosine_bank(self.syn_bases, self.syn_duration),
            raised_cosine_bank(1, self.som_duration),
        )
    }
}

pub fn write_checkpoint(header: &CheckpointHeader, params: &ModelParams) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "msnn-params 1");
    let _ = writeln!(
        out,
        "topology {} {} {} {}",
        header.inputs,
        header.hidden,
        header.visible,
        u8::from(header.hidden_recurrence)
    );
    let _ = writeln!(
        out,
        "filters {} {} {}",
        header.syn_bases, header.syn_duration, header.som_duration
    );
    let topo = header.network().topology;
    for i in 0..topo.num_neurons() {
        for (slot, &src) in topo.pre(i).iter().enumerate() {
            for m in 0..header.syn_bases {
                let _ = writeln!(out, "{i} {src} {m} {:.16e}", params.syn_weight(i, slot, m));
            }
        }
        let _ = writeln!(out, "{i} self 0 {:.16e}", params.w_self(i));
        let _ = writeln!(out, "{i} bias 0 {:.16e}", params.bias(i));
    }
    out
}

pub fn parse_checkpoint(text: &str) -> Result<(CheckpointHeader, ModelParams), CliError> {
    let bad = |line: usize, what: &str| CliError::Data(format!("checkpoint line {line}: {what}"));
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    if magic.trim() != "msnn-params 1" {
        return Err(bad(1, "bad magic"));
    }
    let (_, topo_line) = lines.next().ok_or_else(|| bad(2, "missing topology"))?;
    let t: Vec<&str> = topo_line.split_whitespace().collect();
    if t.len() != 5 || t[0] != "topology" {
        return Err(bad(2, "malformed topology line"));
    }
    let (_, filt_line) = lines.next().ok_or_else(|| bad(3, "missing filters"))?;
    let f: Vec<&str> = filt_line.split_whitespace().collect();
    if f.len() != 4 || f[0] != "filters" {
        return Err(bad(3, "malformed filters line"));
    }
    let parse_usize =
        |s: &str, line: usize| s.parse::<usize>().map_err(|_| bad(line, "bad integer"));
    let header = CheckpointHeader {
        inputs: parse_usize(t[1], 2)?,
        hidden: parse_usize(t[2], 2)?,
        visible: parse_usize(t[3], 2)?,
        hidden_recurrence: t[4] == "1",
        syn_bases: parse_usize(f[1], 3)?,
        syn_duration: parse_usize(f[2], 3)?,
        som_duration: parse_usize(f[3], 3)?,
    };

    let topo = header.network().topology;
    let mut params = ModelParams::zeros(&topo, header.syn_bases);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(bad(lineno, "expected 4 fields"));
        }
        let neuron = parse_usize(parts[0], lineno)?;
        if neuron >= topo.num_neurons() {
            return Err(bad(lineno, "neuron id out of range"));
        }
        let value: f64 = parts[3].parse().map_err(|_| bad(lineno, "bad float"))?;
        match parts[1] {
            "self" => params.set_w_self(neuron, value),
            "bias" => params.set_bias(neuron, value),
            src => {
                let src = parse_usize(src, lineno)?;
                let slot = topo
                    .pre(neuron)
                    .iter()
                    .position(|&s| s == src)
                    .ok_or_else(|| bad(lineno, "source not pre-synaptic to neuron"))?;
                let basis = parse_usize(parts[2], lineno)?;
                if basis >= header.syn_bases {
                    return Err(bad(lineno, "basis index out of range"));
                }
                params.set_syn_weight(neuron, slot, basis, value);
            }
        }
    }
    Ok((header, params))
}

pub fn save(path: &Path, header: &CheckpointHeader, params: &ModelParams) -> Result<(), CliError> {
    std::fs::write(path, write_checkpoint(header, params))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<(CheckpointHeader, ModelParams), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_checkpoint(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use msnn_core::network::init_params;

    #[test]
    fn round_trip_is_exact() {
        let header = CheckpointHeader {
            inputs: 3,
            hidden: 2,
            visible: 2,
            hidden_recurrence: true,
            syn_bases: 2,
            syn_duration: 10,
            som_duration: 10,
        };
        let net = header.network();
        let params = init_params(&net.topology, 2, 99, 0.3);
        let text = write_checkpoint(&header, &params);
        let (parsed_header, parsed) = parse_checkpoint(&text).unwrap();
        assert_eq!(parsed_header, header);
        for i in 0..net.topology.num_neurons() {
            assert_eq!(params.values(i), parsed.values(i), "neuron {i}");
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_checkpoint("").is_err());
        assert!(parse_checkpoint("msnn-params 2\n").is_err());
        assert!(parse_checkpoint("msnn-params 1\ntopology 1 0 1\nfilters 2 10 10\n").is_err());
        let ok = "msnn-params 1\ntopology 1 0 1 0\nfilters 2 10 10\n";
        assert!(parse_checkpoint(ok).is_ok());
        assert!(parse_checkpoint(&format!("{ok}9 bias 0 1.0\n")).is_err());
        assert!(parse_checkpoint(&format!("{ok}0 0 5 1.0\n")).is_err());
    }
}
