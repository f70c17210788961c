//! Training, evaluation, and bound-tabulation entry points.

use std::fmt::Write as _;

use msnn_core::filters::raised_cosine_bank;
use msnn_core::inference::{classify, exact_majority_error, hoeffding_bound};
use msnn_core::learners::{apply_lr_schedule, Trainer};
use msnn_core::metrics::confidence as vote_confidence;
use msnn_core::metrics::{ece, grouped_entropy, hidden_spike_rate, PredictionRecord};
use msnn_core::network::{init_params, ModelParams, NetworkConfig, Topology};
use msnn_core::objectives::estimate_log_loss;
use msnn_core::raster::{encode_labels, LabeledExample, SpikeRaster};
use serde::Serialize;

use crate::checkpoint::CheckpointHeader;
use crate::config::{ExperimentConfig, Task};
use crate::data;
use crate::exec::executor;
use crate::CliError;

const ECE_BINS: usize = 10;
// keeps evaluation rollouts off the training and init seed streams
const EVAL_SEED_TAG: u64 = 0x9e37_79b9_7f4a_7c15;

pub const REPORT_HEADER: &str =
    "step,log_loss,accuracy,ece,entropy_correct,entropy_incorrect,hidden_spike_rate,unicast_total,broadcast_total";

/// One evaluation point of a training run.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub step: u64,
    pub log_loss: f64,
    pub accuracy: f64,
    pub ece: f64,
    pub entropy_correct: f64,
    pub entropy_incorrect: f64,
    pub hidden_spike_rate: f64,
    pub unicast_total: u64,
    pub broadcast_total: u64,
}

impl ReportRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.step,
            self.log_loss,
            self.accuracy,
            self.ece,
            self.entropy_correct,
            self.entropy_incorrect,
            self.hidden_spike_rate,
            self.unicast_total,
            self.broadcast_total
        )
    }
}

pub struct TrainOutcome {
    pub header: CheckpointHeader,
    pub params: ModelParams,
    pub rows: Vec<ReportRow>,
}

impl TrainOutcome {
    pub fn report_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.csv_line());
        }
        out
    }

    pub fn final_row(&self) -> &ReportRow {
        self.rows
            .last()
            .expect("training always evaluates at least once")
    }
}

fn network_of(cfg: &ExperimentConfig) -> NetworkConfig {
    NetworkConfig::new(
        Topology::layered(
            cfg.topology.inputs,
            cfg.topology.hidden,
            cfg.topology.visible,
            cfg.topology.hidden_recurrence,
        ),
        raised_cosine_bank(cfg.filters.syn_bases, cfg.filters.syn_duration),
        raised_cosine_bank(1, cfg.filters.som_duration),
    )
}

fn header_of(cfg: &ExperimentConfig) -> CheckpointHeader {
    CheckpointHeader {
        inputs: cfg.topology.inputs,
        hidden: cfg.topology.hidden,
        visible: cfg.topology.visible,
        hidden_recurrence: cfg.topology.hidden_recurrence,
        syn_bases: cfg.filters.syn_bases,
        syn_duration: cfg.filters.syn_duration,
        som_duration: cfg.filters.som_duration,
    }
}

pub fn run_train(cfg: &ExperimentConfig, threads: usize) -> Result<TrainOutcome, CliError> {
    match cfg.task {
        Task::Memorize => train_memorize(cfg, threads),
        Task::Classify => train_classify(cfg, threads),
    }
}

fn train_memorize(cfg: &ExperimentConfig, threads: usize) -> Result<TrainOutcome, CliError> {
    let net = network_of(cfg);
    let learn = cfg.learner_config()?;
    let example = data::load_memorize(cfg)?;
    let horizon = example.horizon_t();
    let mut params = init_params(
        &net.topology,
        cfg.filters.syn_bases,
        cfg.seed,
        cfg.training.init_scale,
    );
    let mut trainer = Trainer::new(&net, &params, learn.clone(), cfg.seed);
    let mut exec = executor(threads);
    let eval_every = cfg.eval_every();
    let mut rows = Vec::new();

    for p in 0..cfg.training.presentations {
        let eta = apply_lr_schedule(learn.eta, p, &learn);
        for t in 1..=horizon {
            trainer.step(
                &net,
                &mut params,
                &example.input.column(t),
                &example.target.column(t),
                eta,
                exec.as_mut(),
            );
        }
        let done = p + 1;
        if done % eval_every == 0 || done == cfg.training.presentations {
            let log_loss = estimate_log_loss(
                &net,
                &params,
                &example,
                cfg.training.log_loss_realizations,
                cfg.seed ^ EVAL_SEED_TAG,
            );
            rows.push(ReportRow {
                step: trainer.steps(),
                log_loss,
                accuracy: 0.0,
                ece: 0.0,
                entropy_correct: 0.0,
                entropy_incorrect: 0.0,
                hidden_spike_rate: hidden_spike_rate(
                    trainer.total_hidden_spikes(),
                    trainer.steps(),
                ),
                unicast_total: trainer.comm().total_unicast,
                broadcast_total: trainer.comm().total_broadcast,
            });
        }
    }
    Ok(TrainOutcome {
        header: header_of(cfg),
        params,
        rows,
    })
}

fn train_classify(cfg: &ExperimentConfig, threads: usize) -> Result<TrainOutcome, CliError> {
    let net = network_of(cfg);
    let learn = cfg.learner_config()?;
    let examples = data::load_classify(cfg)?;
    let num_classes = cfg.topology.visible;
    let mut params = init_params(
        &net.topology,
        cfg.filters.syn_bases,
        cfg.seed,
        cfg.training.init_scale,
    );
    let mut trainer = Trainer::new(&net, &params, learn.clone(), cfg.seed);
    let mut exec = executor(threads);
    let eval_every = cfg.eval_every();
    let mut rows = Vec::new();
    let mut examples_done: u64 = 0;
    let total_examples = cfg.training.presentations * examples.len() as u64;

    for epoch in 0..cfg.training.presentations {
        let eta = apply_lr_schedule(learn.eta, epoch, &learn);
        for (input, label) in &examples {
            let horizon = input.horizon_t();
            let target = encode_labels(*label, num_classes, horizon)
                .map_err(|e| CliError::Data(format!("{e}")))?;
            for t in 1..=horizon {
                trainer.step(
                    &net,
                    &mut params,
                    &input.column(t),
                    &target.column(t),
                    eta,
                    exec.as_mut(),
                );
            }
            examples_done += 1;
            if examples_done.is_multiple_of(eval_every) || examples_done == total_examples {
                let eval = evaluate_classify(&net, &params, &examples, cfg);
                rows.push(ReportRow {
                    step: trainer.steps(),
                    log_loss: eval.log_loss,
                    accuracy: eval.accuracy,
                    ece: eval.ece,
                    entropy_correct: eval.entropy_correct.unwrap_or(0.0),
                    entropy_incorrect: eval.entropy_incorrect.unwrap_or(0.0),
                    hidden_spike_rate: hidden_spike_rate(
                        trainer.total_hidden_spikes(),
                        trainer.steps(),
                    ),
                    unicast_total: trainer.comm().total_unicast,
                    broadcast_total: trainer.comm().total_broadcast,
                });
            }
        }
    }
    Ok(TrainOutcome {
        header: header_of(cfg),
        params,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub example: usize,
    pub label: usize,
    pub predicted: usize,
    pub class_probs: Vec<f64>,
    pub confidence: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalMetrics {
    pub task: String,
    pub log_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ece: Option<f64>,
    pub entropy_correct: Option<f64>,
    pub entropy_incorrect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confusion: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<EvalRecord>>,
}

struct ClassifyEval {
    log_loss: f64,
    accuracy: f64,
    ece: f64,
    entropy_correct: Option<f64>,
    entropy_incorrect: Option<f64>,
    confusion: Vec<Vec<usize>>,
    records: Vec<EvalRecord>,
}

fn evaluate_classify(
    net: &NetworkConfig,
    params: &ModelParams,
    examples: &[(SpikeRaster, usize)],
    cfg: &ExperimentConfig,
) -> ClassifyEval {
    let num_classes = cfg.topology.visible;
    let k_i = cfg.inference.k_i;
    let mut records = Vec::with_capacity(examples.len());
    let mut prediction_records = Vec::with_capacity(examples.len());
    let mut confusion = vec![vec![0usize; num_classes]; num_classes];
    let mut log_loss_sum = 0.0;
    for (idx, (input, label)) in examples.iter().enumerate() {
        let seed = (cfg.seed ^ EVAL_SEED_TAG).wrapping_add(idx as u64);
        let (predicted, class_probs, entropy, tally) = classify(net, params, input, k_i, seed);
        let conf = vote_confidence(&tally);
        confusion[*label][predicted] += 1;
        prediction_records.push(PredictionRecord {
            predicted,
            truth: *label,
            confidence: conf,
            entropy,
        });
        records.push(EvalRecord {
            example: idx,
            label: *label,
            predicted,
            class_probs,
            confidence: conf,
            entropy,
        });
        let target = encode_labels(*label, num_classes, input.horizon_t())
            .expect("label validated at load time");
        let labeled = LabeledExample::new(input.clone(), target, Some(*label));
        log_loss_sum += estimate_log_loss(
            net,
            params,
            &labeled,
            cfg.training.log_loss_realizations,
            seed,
        );
    }
    let correct = prediction_records.iter().filter(|r| r.correct()).count();
    let (entropy_correct, entropy_incorrect) = grouped_entropy(&prediction_records);
    ClassifyEval {
        log_loss: log_loss_sum / examples.len() as f64,
        accuracy: correct as f64 / examples.len() as f64,
        ece: ece(&prediction_records, ECE_BINS),
        entropy_correct,
        entropy_incorrect,
        confusion,
        records,
    }
}

/// Evaluate a checkpoint on the configured dataset.
pub fn run_eval(
    header: &CheckpointHeader,
    params: &ModelParams,
    cfg: &ExperimentConfig,
) -> Result<EvalMetrics, CliError> {
    let net = header.network();
    if header.inputs != cfg.topology.inputs
        || header.hidden != cfg.topology.hidden
        || header.visible != cfg.topology.visible
    {
        return Err(CliError::Data(
            "checkpoint topology does not match configuration".into(),
        ));
    }
    match cfg.task {
        Task::Memorize => {
            let example = data::load_memorize(cfg)?;
            let log_loss = estimate_log_loss(
                &net,
                params,
                &example,
                cfg.training.log_loss_realizations,
                cfg.seed ^ EVAL_SEED_TAG,
            );
            Ok(EvalMetrics {
                task: "memorize".into(),
                log_loss,
                accuracy: None,
                ece: None,
                entropy_correct: None,
                entropy_incorrect: None,
                confusion: None,
                records: None,
            })
        }
        Task::Classify => {
            let examples = data::load_classify(cfg)?;
            let eval = evaluate_classify(&net, params, &examples, cfg);
            Ok(EvalMetrics {
                task: "classify".into(),
                log_loss: eval.log_loss,
                accuracy: Some(eval.accuracy),
                ece: Some(eval.ece),
                entropy_correct: eval.entropy_correct,
                entropy_incorrect: eval.entropy_incorrect,
                confusion: Some(eval.confusion),
                records: Some(eval.records),
            })
        }
    }
}

/// CSV of exact majority error vs the Hoeffding bound, one row per `K_I`.
pub fn bounds_csv(p_e: f64, k_max: usize) -> Result<String, CliError> {
    if !(0.0..0.5).contains(&p_e) {
        return Err(CliError::Config("p_e must lie in [0, 0.5)".into()));
    }
    if k_max == 0 {
        return Err(CliError::Config("k_max must be positive".into()));
    }
    let mut out = String::from("k_i,exact_error,hoeffding_bound\n");
    for k_i in 1..=k_max {
        let _ = writeln!(
            out,
            "{},{},{}",
            k_i,
            exact_majority_error(p_e, k_i),
            hoeffding_bound(p_e, k_i)
        );
    }
    Ok(out)
}
