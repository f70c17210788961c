//! Experiment configuration: TOML file with flat sections, CLI overrides
//! applied after parsing.

use std::path::{Path, PathBuf};

use msnn_core::learners::{LearnerConfig, Rule};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Memorize,
    Classify,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub inputs: usize,
    pub hidden: usize,
    pub visible: usize,
    #[serde(default)]
    pub hidden_recurrence: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub syn_bases: usize,
    #[serde(default = "default_duration")]
    pub syn_duration: usize,
    #[serde(default = "default_duration")]
    pub som_duration: usize,
}

fn default_duration() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    pub rule: String,
    pub k: usize,
    pub eta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_kappa_b")]
    pub kappa_b: f64,
    #[serde(default = "default_lr_decay_factor")]
    pub lr_decay_factor: f64,
    #[serde(default)]
    pub lr_decay_period: Option<u64>,
}

fn default_gamma() -> f64 {
    0.9
}

fn default_kappa_b() -> f64 {
    0.9
}

fn default_lr_decay_factor() -> f64 {
    1.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSection {
    pub presentations: u64,
    #[serde(default)]
    pub eval_every: Option<u64>,
    #[serde(default = "default_realizations")]
    pub log_loss_realizations: usize,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

fn default_realizations() -> usize {
    20
}

fn default_init_scale() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferenceSection {
    #[serde(default = "default_k_i")]
    pub k_i: usize,
}

fn default_k_i() -> usize {
    1
}

impl Default for InferenceSection {
    fn default() -> Self {
        Self { k_i: default_k_i() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub source: String,
    // synthetic memorize: one Bernoulli raster split at `boundary`
    #[serde(default)]
    pub neurons: Option<usize>,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub rate: Option<f64>,
    #[serde(default)]
    pub boundary: Option<usize>,
    // synthetic classify: per-class prototypes with independent bit flips
    #[serde(default)]
    pub num_classes: Option<usize>,
    #[serde(default)]
    pub examples_per_class: Option<usize>,
    #[serde(default)]
    pub flip_prob: Option<f64>,
    // file-backed variants
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub paths: Option<Vec<PathBuf>>,
    #[serde(default)]
    pub labels: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub topology: TopologySection,
    pub filters: FilterSection,
    pub learning: LearningSection,
    pub training: TrainingSection,
    #[serde(default)]
    pub inference: InferenceSection,
    pub data: DataSection,
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rule(&self) -> Result<Rule, CliError> {
        match self.learning.rule.as_str() {
            "gem" => Ok(Rule::Gem),
            "mb" => Ok(Rule::Mb),
            "iw" => Ok(Rule::Iw),
            "single" => Ok(Rule::Single),
            other => Err(CliError::Config(format!("unknown rule '{other}'"))),
        }
    }

    pub fn learner_config(&self) -> Result<LearnerConfig, CliError> {
        let cfg = LearnerConfig {
            rule: self.rule()?,
            num_samples: self.learning.k,
            eta: self.learning.eta,
            gamma: self.learning.gamma,
            kappa_b: self.learning.kappa_b,
            lr_decay_factor: self.learning.lr_decay_factor,
            lr_decay_period: self.learning.lr_decay_period,
        };
        cfg.validate().map_err(|e| CliError::Config(e.into()))?;
        Ok(cfg)
    }

    /// Default cadence: every presentation for memorization, every 25
    /// examples for classification.
    pub fn eval_every(&self) -> u64 {
        self.training.eval_every.unwrap_or(match self.task {
            Task::Memorize => 1,
            Task::Classify => 25,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let t = &self.topology;
        if t.inputs == 0 || t.visible == 0 {
            return Err(CliError::Config(
                "topology needs at least one input and one visible neuron".into(),
            ));
        }
        if !(1..=4).contains(&self.filters.syn_bases) {
            return Err(CliError::Config("syn_bases must lie in 1..=4".into()));
        }
        if self.filters.syn_duration < 1 || self.filters.som_duration < 1 {
            return Err(CliError::Config("filter durations must be positive".into()));
        }
        if self.training.presentations == 0 {
            return Err(CliError::Config("presentations must be positive".into()));
        }
        if self.training.log_loss_realizations == 0 {
            return Err(CliError::Config(
                "log_loss_realizations must be positive".into(),
            ));
        }
        if self.inference.k_i == 0 {
            return Err(CliError::Config("k_i must be positive".into()));
        }
        match self.data.source.as_str() {
            "synthetic" | "files" => {}
            other => {
                return Err(CliError::Config(format!("unknown data source '{other}'")));
            }
        }
        if self.task == Task::Classify {
            match self.data.source.as_str() {
                "synthetic" => {
                    let classes = self.data.num_classes.ok_or_else(|| {
                        CliError::Config("classify needs data.num_classes".into())
                    })?;
                    if classes != self.topology.visible {
                        return Err(CliError::Config(
                            "visible neuron count must equal num_classes".into(),
                        ));
                    }
                    if self.data.examples_per_class.unwrap_or(0) == 0 {
                        return Err(CliError::Config(
                            "classify needs data.examples_per_class >= 1".into(),
                        ));
                    }
                }
                _ => {
                    let paths = self.data.paths.as_deref().unwrap_or(&[]);
                    let labels = self.data.labels.as_deref().unwrap_or(&[]);
                    if paths.is_empty() || paths.len() != labels.len() {
                        return Err(CliError::Config(
                            "file-backed classify needs matching data.paths and data.labels".into(),
                        ));
                    }
                    if labels.iter().any(|&l| l >= self.topology.visible) {
                        return Err(CliError::Config("label exceeds class count".into()));
                    }
                }
            }
        }
        Ok(())
    }
}
