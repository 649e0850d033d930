//! Sampling-based SGD training over one or more weighted meta-paths.
//!
//! Each step picks a meta-path with probability equal to its weight, draws a
//! positive instance and updates on it, then draws `K` noise sequences that
//! share the positive's first vertex and updates on each of them. The sample
//! budget is cut into chunks that workers claim from an atomic counter; all
//! workers update one shared parameter arena without locks.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::hin::{Hin, VertexId};
use crate::metapath::MetaPath;
use crate::model::{required_sub_paths, GradientSet, Label, Mode, ModelParameters, ScorePlan};
use crate::sampler::{precompute_counts, SamplerState};

#[derive(Clone, Debug)]
pub struct WeightedMetaPath {
    pub meta_path: MetaPath,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub meta_paths: Vec<WeightedMetaPath>,
    pub mode: Mode,
    pub dim: usize,
    /// Noise sequences per positive instance, `K`.
    pub negatives: usize,
    pub gamma: f64,
    pub total_samples: u64,
    pub lr_init: f64,
    pub lr_floor: f64,
    pub threads: usize,
    pub seed: u64,
    pub symmetric: bool,
    pub chunk_size: u64,
    /// Print a progress line to stderr after every chunk.
    pub progress: bool,
}

impl TrainConfig {
    pub const DEFAULT_DIM: usize = 50;
    pub const DEFAULT_NEGATIVES: usize = 5;
    pub const DEFAULT_GAMMA: f64 = 0.75;
    pub const DEFAULT_SAMPLES: u64 = 1_000_000;
    pub const DEFAULT_LR: f64 = 0.25;
    pub const DEFAULT_CHUNK: u64 = 10_000;

    /// Defaults for everything but the meta-paths and the mode.
    pub fn new(meta_paths: Vec<WeightedMetaPath>, mode: Mode) -> Self {
        TrainConfig {
            meta_paths,
            mode,
            dim: Self::DEFAULT_DIM,
            negatives: Self::DEFAULT_NEGATIVES,
            gamma: Self::DEFAULT_GAMMA,
            total_samples: Self::DEFAULT_SAMPLES,
            lr_init: Self::DEFAULT_LR,
            lr_floor: Self::DEFAULT_LR * 1e-4,
            threads: 1,
            seed: 0,
            symmetric: false,
            chunk_size: Self::DEFAULT_CHUNK,
            progress: false,
        }
    }

    /// Single meta-path with weight 1.
    pub fn single(meta_path: MetaPath, mode: Mode) -> Self {
        Self::new(
            vec![WeightedMetaPath {
                meta_path,
                weight: 1.0,
            }],
            mode,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.meta_paths.is_empty() {
            return fail("at least one meta-path is required".into());
        }
        if let Some(w) = self.meta_paths.iter().find(|m| !(m.weight.is_finite() && m.weight > 0.0)) {
            return fail(format!("meta-path weights must be positive, got {}", w.weight));
        }
        let sum: f64 = self.meta_paths.iter().map(|m| m.weight).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return fail(format!("meta-path weights must sum to 1, got {sum}"));
        }
        if self.negatives == 0 {
            return fail("negative ratio must be at least 1".into());
        }
        if self.total_samples == 0 {
            return fail("sample budget must be at least 1".into());
        }
        if !(self.lr_floor > 0.0 && self.lr_floor <= self.lr_init && self.lr_init.is_finite()) {
            return fail(format!(
                "need 0 < lr_floor <= lr_init, got floor {} and init {}",
                self.lr_floor, self.lr_init
            ));
        }
        if self.dim == 0 || self.threads == 0 || self.chunk_size == 0 {
            return fail("dimension, threads and chunk size must be positive".into());
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return fail(format!("gamma must be non-negative, got {}", self.gamma));
        }
        Ok(())
    }
}

/// Learning rate before the update numbered `step`, decaying linearly from
/// `lr_init` at step 0 to `lr_floor` at `total_samples`.
pub fn schedule_lr(step: u64, cfg: &TrainConfig) -> f64 {
    let frac = step.min(cfg.total_samples) as f64 / cfg.total_samples as f64;
    cfg.lr_init * (1.0 - frac) + cfg.lr_floor * frac
}

#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    pub samples: u64,
    pub positive_updates: u64,
    pub negative_updates: u64,
    pub wall_time: Duration,
    /// Mean loss per update, one entry per chunk in budget order.
    pub window_losses: Vec<f64>,
    pub per_worker_samples: Vec<u64>,
    pub final_lr: f64,
}

/// One meta-path ready for training.
pub struct PreparedMetaPath {
    pub sampler: SamplerState,
    pub plan: ScorePlan,
}

/// Count tables, samplers and parameters for `cfg`, before any update.
pub fn prepare(hin: &Hin, cfg: &TrainConfig) -> Result<(ModelParameters, Vec<PreparedMetaPath>)> {
    cfg.validate()?;
    let keys = cfg
        .meta_paths
        .iter()
        .flat_map(|m| required_sub_paths(&m.meta_path, cfg.mode));
    let params = ModelParameters::new(hin.num_vertices(), cfg.dim, keys, cfg.symmetric)?;
    params.randomize(&mut ChaCha8Rng::seed_from_u64(cfg.seed));

    let prepared = cfg
        .meta_paths
        .iter()
        .map(|m| {
            let counts = precompute_counts(hin, &m.meta_path);
            let sampler = SamplerState::build(hin, counts, cfg.gamma)?;
            let plan = params.plan(&m.meta_path, cfg.mode)?;
            Ok(PreparedMetaPath { sampler, plan })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((params, prepared))
}

pub fn train(hin: &Hin, cfg: &TrainConfig) -> Result<(ModelParameters, TrainReport)> {
    let (params, prepared) = prepare(hin, cfg)?;
    let report = run_workers(&params, &prepared, cfg)?;
    Ok((params, report))
}

struct WorkerOutput {
    samples: u64,
    positive: u64,
    negative: u64,
    windows: Vec<(u64, f64)>,
}

/// Runs the training loop on `cfg.threads` workers sharing `params`.
///
/// With one thread and a fixed seed the result is bit-reproducible.
pub fn run_workers(params: &ModelParameters, prepared: &[PreparedMetaPath], cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if prepared.len() != cfg.meta_paths.len() {
        return Err(Error::Config("one prepared sampler per meta-path is required".into()));
    }
    let selector = AliasTable::new(cfg.meta_paths.iter().enumerate().map(|(i, m)| (i as u32, m.weight)))?;
    let counter = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let started = Instant::now();

    let outputs: Vec<Result<WorkerOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|worker| {
                let (selector, counter, abort) = (&selector, &counter, &abort);
                scope.spawn(move || {
                    let out = worker_loop(worker, params, prepared, selector, cfg, counter, abort);
                    if out.is_err() {
                        abort.store(true, Ordering::Relaxed);
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(worker, h)| {
                h.join().unwrap_or_else(|panic| {
                    abort.store(true, Ordering::Relaxed);
                    let message = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "unknown panic payload".into());
                    Err(Error::WorkerPanic { worker, message })
                })
            })
            .collect()
    });

    let mut report = TrainReport {
        wall_time: started.elapsed(),
        final_lr: schedule_lr(cfg.total_samples, cfg),
        ..TrainReport::default()
    };
    let mut windows = Vec::new();
    for out in outputs {
        let out = out?;
        report.samples += out.samples;
        report.positive_updates += out.positive;
        report.negative_updates += out.negative;
        report.per_worker_samples.push(out.samples);
        windows.extend(out.windows);
    }
    windows.sort_by_key(|&(start, _)| start);
    report.window_losses = windows.into_iter().map(|(_, loss)| loss).collect();
    Ok(report)
}

fn worker_loop(
    worker: usize,
    params: &ModelParameters,
    prepared: &[PreparedMetaPath],
    selector: &AliasTable,
    cfg: &TrainConfig,
    counter: &AtomicU64,
    abort: &AtomicBool,
) -> Result<WorkerOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(worker as u64 + 1);
    let mut grads = GradientSet::new();
    let mut path: Vec<VertexId> = Vec::new();
    let mut out = WorkerOutput {
        samples: 0,
        positive: 0,
        negative: 0,
        windows: Vec::new(),
    };

    loop {
        if abort.load(Ordering::Relaxed) {
            break;
        }
        let start = counter.fetch_add(cfg.chunk_size, Ordering::Relaxed);
        if start >= cfg.total_samples {
            break;
        }
        let end = (start + cfg.chunk_size).min(cfg.total_samples);
        let mut loss_sum = 0.0;
        let mut updates = 0u64;

        for step in start..end {
            let lr = schedule_lr(step, cfg);
            let chosen = &prepared[selector.sample(&mut rng) as usize];

            chosen.sampler.sample_positive_into(&mut rng, &mut path);
            let loss = chosen
                .plan
                .loss_and_gradients_unchecked(params, &path, Label::Positive, &mut grads);
            check_loss(loss, step, Label::Positive)?;
            params.sgd_apply(&grads, lr)?;
            loss_sum += loss;

            let anchor = path[0];
            for _ in 0..cfg.negatives {
                chosen.sampler.sample_negative_into(anchor, &mut rng, &mut path)?;
                let loss = chosen
                    .plan
                    .loss_and_gradients_unchecked(params, &path, Label::Negative, &mut grads);
                check_loss(loss, step, Label::Negative)?;
                params.sgd_apply(&grads, lr)?;
                loss_sum += loss;
            }
            updates += 1 + cfg.negatives as u64;
            out.positive += 1;
            out.negative += cfg.negatives as u64;
        }

        out.samples += end - start;
        let window = loss_sum / updates as f64;
        out.windows.push((start, window));
        if cfg.progress {
            eprintln!("samples={} lr={:.6} window_loss={:.6}", end, schedule_lr(end, cfg), window);
        }
    }
    Ok(out)
}

fn check_loss(loss: f64, step: u64, label: Label) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!(
            "{label:?} loss {loss} at sample {step}; try a smaller learning rate"
        )))
    }
}
