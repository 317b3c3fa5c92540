//! Central-difference verification of the backward pass. Runs entirely in
//! f64: a perturbation of 1e-5 would vanish below f32 rounding noise.

use crate::model::{CnnModel, LayerGrads, LayerKind, NUM_CLASSES};
use crate::rng::InitRng;
use crate::{NnError, Result, Tensor};

const STEP: f64 = 1e-5;

/// Worst sampled disagreement between analytic and numeric gradients for one
/// parameterized layer.
#[derive(Debug, Clone)]
pub struct LayerCheckReport {
    pub layer_index: usize,
    pub kind: LayerKind,
    pub samples: usize,
    pub max_rel_err: f64,
}

/// Symmetric relative error with an absolute floor, so near-zero gradient
/// pairs (dead paths) do not blow up the ratio.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (1e-6f64).max(analytic.abs() + numeric.abs())
}

fn loss_at(model: &CnnModel<f64>, x: &Tensor<f64>, label: usize) -> Result<f64> {
    let probs = model.forward(x)?;
    Ok(-(probs[label].max(1e-300)).ln())
}

/// Computes analytic parameter gradients of the cross-entropy loss and
/// compares a random sample of them against central differences.
pub fn grad_check_model(
    model: &CnnModel<f64>,
    x: &Tensor<f64>,
    label: usize,
    samples_per_layer: usize,
    seed: u64,
) -> Result<Vec<LayerCheckReport>> {
    if label >= NUM_CLASSES {
        return Err(NnError::InvalidArgument(format!(
            "label {label} out of range"
        )));
    }
    let trace = model.forward_cached(x)?;
    let mut one_hot = vec![0.0f64; NUM_CLASSES];
    one_hot[label] = 1.0;
    let (_, grad_logits) = crate::ops::softmax_xent(&trace.logits, &one_hot)?;
    let analytic = model.backward(&trace, &grad_logits)?;
    check_against_numeric(model, x, label, &analytic, samples_per_layer, seed)
}

/// Compares supplied analytic gradients against central differences of the
/// loss. Split out from [`grad_check_model`] so tests can feed it corrupted
/// gradients and confirm the check actually trips.
pub fn check_against_numeric(
    model: &CnnModel<f64>,
    x: &Tensor<f64>,
    label: usize,
    analytic: &[Option<LayerGrads<f64>>],
    samples_per_layer: usize,
    seed: u64,
) -> Result<Vec<LayerCheckReport>> {
    if analytic.len() != model.layers.len() {
        return Err(NnError::InvalidArgument(
            "gradient list does not match the model".into(),
        ));
    }
    if samples_per_layer == 0 {
        return Err(NnError::InvalidArgument(
            "need at least one sample per layer".into(),
        ));
    }
    if label >= NUM_CLASSES {
        return Err(NnError::InvalidArgument(format!(
            "label {label} out of range"
        )));
    }

    let mut probe = model.clone();
    let mut rng = InitRng::new(seed);
    let mut reports = Vec::new();

    for i in 0..model.layers.len() {
        let Some(grads) = &analytic[i] else { continue };
        let w_len = grads.weights.numel();
        let b_len = grads.bias.numel();
        let total = w_len + b_len;
        let samples = samples_per_layer.min(total);

        let mut max_rel_err = 0.0f64;
        for _ in 0..samples {
            let idx = (rng.next_u64() % total as u64) as usize;
            let (slot, expected) = if idx < w_len {
                (
                    &mut probe.layers[i].weights.as_mut().unwrap().data[idx],
                    grads.weights.data[idx],
                )
            } else {
                (
                    &mut probe.layers[i].bias.as_mut().unwrap().data[idx - w_len],
                    grads.bias.data[idx - w_len],
                )
            };
            let original = *slot;
            *slot = original + STEP;
            let plus = loss_at(&probe, x, label)?;
            // Re-borrow after the forward pass released the probe.
            let slot = if idx < w_len {
                &mut probe.layers[i].weights.as_mut().unwrap().data[idx]
            } else {
                &mut probe.layers[i].bias.as_mut().unwrap().data[idx - w_len]
            };
            *slot = original - STEP;
            let minus = loss_at(&probe, x, label)?;
            let slot = if idx < w_len {
                &mut probe.layers[i].weights.as_mut().unwrap().data[idx]
            } else {
                &mut probe.layers[i].bias.as_mut().unwrap().data[idx - w_len]
            };
            *slot = original;

            let numeric = (plus - minus) / (2.0 * STEP);
            max_rel_err = max_rel_err.max(relative_error(expected, numeric));
        }
        reports.push(LayerCheckReport {
            layer_index: i,
            kind: model.layers[i].kind,
            samples,
            max_rel_err,
        });
    }
    Ok(reports)
}
