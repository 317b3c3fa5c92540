//! Mini-batch training over a rendered image dataset. The whole loop is
//! deterministic: weight init, epoch shuffles, and batch boundaries all
//! derive from one seed, so repeated runs produce bit-identical models.

use std::path::Path;

use hybridsig_modem::rng::{derive_seed, SplitMix64};
use hybridsig_nn::{
    argmax_lowest, softmax_xent, train_step, AdamState, CnnModel, LayerGrads, StepStats, Tensor,
    NUM_CLASSES,
};
use serde::{Deserialize, Serialize};

use crate::manifest::{ImageManifest, Split};
use crate::render::load_input;
use crate::{streams, PipelineError, Result, TrainConfig};

/// Mean train loss/accuracy and validation accuracy for one epoch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_accuracy: f64,
}

fn load_split(
    images: &ImageManifest,
    images_root: &Path,
    split: Split,
    name: &str,
) -> Result<Vec<(Tensor<f32>, usize)>> {
    let mut set = Vec::new();
    for entry in images.split_entries(split) {
        set.push(load_input(images_root, entry, images.representation)?);
    }
    if set.is_empty() {
        return Err(PipelineError::InvalidArgument(format!(
            "image manifest has no {name} entries"
        )));
    }
    Ok(set)
}

/// Unscaled gradient sums plus loss/correct tallies for a slice of a batch.
struct ChunkSums {
    grads: Vec<Option<LayerGrads<f32>>>,
    loss_sum: f64,
    correct: usize,
}

fn chunk_sums(model: &CnnModel<f32>, chunk: &[(Tensor<f32>, usize)]) -> Result<ChunkSums> {
    let mut sums = ChunkSums {
        grads: vec![None; model.layers.len()],
        loss_sum: 0.0,
        correct: 0,
    };
    for (x, label) in chunk {
        let trace = model.forward_cached(x)?;
        let mut one_hot = vec![0.0f32; NUM_CLASSES];
        one_hot[*label] = 1.0;
        let (loss, grad_logits) = softmax_xent(&trace.logits, &one_hot)?;
        sums.loss_sum += f64::from(loss);
        if argmax_lowest(&trace.probs) == *label {
            sums.correct += 1;
        }
        let grads = model.backward(&trace, &grad_logits)?;
        accumulate(&mut sums.grads, grads);
    }
    Ok(sums)
}

fn accumulate(total: &mut [Option<LayerGrads<f32>>], grads: Vec<Option<LayerGrads<f32>>>) {
    for (acc, g) in total.iter_mut().zip(grads) {
        match (acc.as_mut(), g) {
            (None, g) => *acc = g,
            (Some(acc), Some(g)) => {
                for (a, v) in acc.weights.data.iter_mut().zip(&g.weights.data) {
                    *a += *v;
                }
                for (a, v) in acc.bias.data.iter_mut().zip(&g.bias.data) {
                    *a += *v;
                }
            }
            (Some(_), None) => {}
        }
    }
}

/// One optimizer step. `jobs == 1` delegates to the sequential reference
/// implementation; otherwise per-sample gradients are summed in parallel
/// chunks and reduced in chunk order, which is deterministic for a fixed
/// job count but may differ from the sequential result in the last bits.
fn step(
    model: &mut CnnModel<f32>,
    opt: &mut AdamState<f32>,
    batch: &[(Tensor<f32>, usize)],
    jobs: usize,
) -> Result<StepStats> {
    if jobs <= 1 || batch.len() < 2 {
        return Ok(train_step(model, opt, batch)?);
    }
    let per_chunk = batch.len().div_ceil(jobs);
    let results: Vec<Result<ChunkSums>> = std::thread::scope(|scope| {
        let frozen = &*model;
        let handles: Vec<_> = batch
            .chunks(per_chunk)
            .map(|chunk| scope.spawn(move || chunk_sums(frozen, chunk)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect()
    });

    let mut total: Vec<Option<LayerGrads<f32>>> = vec![None; model.layers.len()];
    let mut loss_sum = 0.0f64;
    let mut correct = 0usize;
    for result in results {
        let sums = result?;
        loss_sum += sums.loss_sum;
        correct += sums.correct;
        accumulate(&mut total, sums.grads);
    }

    let scale = 1.0f32 / batch.len() as f32;
    for g in total.iter_mut().flatten() {
        for v in &mut g.weights.data {
            *v *= scale;
        }
        for v in &mut g.bias.data {
            *v *= scale;
        }
    }
    opt.apply(model, &total)?;

    Ok(StepStats {
        loss: loss_sum / batch.len() as f64,
        accuracy: correct as f64 / batch.len() as f64,
    })
}

/// Trains a fresh classifier on the train split of `images`, scoring the
/// val split after every epoch. `on_epoch` fires once per epoch for
/// progress reporting. Labels out of range or missing splits are errors.
pub fn train(
    images: &ImageManifest,
    images_root: &Path,
    cfg: &TrainConfig,
    seed: u64,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<(CnnModel<f32>, Vec<EpochStats>)> {
    cfg.validate()?;
    let train_set = load_split(images, images_root, Split::Train, "train")?;
    let val_set = load_split(images, images_root, Split::Val, "val")?;

    let mut model = CnnModel::init(
        images.representation.model_channels(),
        images.canvas,
        derive_seed(seed, &[streams::MODEL]),
    )?;
    let mut opt = AdamState::new(&model, cfg.learning_rate as f32);

    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        // Fresh Fisher-Yates order per epoch, derived from the epoch index
        // so the shuffle sequence does not depend on loop state.
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        let mut rng = SplitMix64::new(derive_seed(seed, &[streams::EPOCH, epoch as u64]));
        for i in (1..order.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }

        let mut loss_sum = 0.0f64;
        let mut correct = 0.0f64;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(Tensor<f32>, usize)> =
                chunk.iter().map(|&i| train_set[i].clone()).collect();
            let stats = step(&mut model, &mut opt, &batch, cfg.jobs)?;
            loss_sum += stats.loss * chunk.len() as f64;
            correct += stats.accuracy * chunk.len() as f64;
        }

        let mut val_correct = 0usize;
        for (x, label) in &val_set {
            if model.predict(x)?.0 == *label {
                val_correct += 1;
            }
        }

        let stats = EpochStats {
            epoch,
            train_loss: loss_sum / train_set.len() as f64,
            train_accuracy: correct / train_set.len() as f64,
            val_accuracy: val_correct as f64 / val_set.len() as f64,
        };
        on_epoch(&stats);
        history.push(stats);
    }

    Ok((model, history))
}
