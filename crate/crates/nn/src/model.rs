//! The fixed classifier: three conv/relu/pool stages (16, 32, 64 channels),
//! a 256-unit hidden dense layer, and a 4-way softmax head. The layer stack
//! never varies; only the input channel count and canvas size do.

use crate::ops::{
    adam_step, conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool_backward,
    maxpool_forward, relu_backward, relu_forward, softmax, softmax_xent,
};
use crate::rng::InitRng;
use crate::{NnError, Result, Scalar, Tensor};
use hybridsig_raster::RasterImage;

pub const NUM_CLASSES: usize = 4;
const CONV_CHANNELS: [usize; 3] = [16, 32, 64];
const HIDDEN_UNITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv3x3,
    Relu,
    MaxPool2x2,
    Flatten,
    Dense,
    Softmax,
}

impl LayerKind {
    pub fn tag(self) -> u8 {
        match self {
            LayerKind::Conv3x3 => 0,
            LayerKind::Relu => 1,
            LayerKind::MaxPool2x2 => 2,
            LayerKind::Flatten => 3,
            LayerKind::Dense => 4,
            LayerKind::Softmax => 5,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => LayerKind::Conv3x3,
            1 => LayerKind::Relu,
            2 => LayerKind::MaxPool2x2,
            3 => LayerKind::Flatten,
            4 => LayerKind::Dense,
            5 => LayerKind::Softmax,
            other => {
                return Err(NnError::Format(format!("unknown layer tag {other}")));
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerKind::Conv3x3 => "conv3x3",
            LayerKind::Relu => "relu",
            LayerKind::MaxPool2x2 => "maxpool2x2",
            LayerKind::Flatten => "flatten",
            LayerKind::Dense => "dense",
            LayerKind::Softmax => "softmax",
        }
    }
}

/// One layer of the stack. Parameterless kinds carry no tensors.
#[derive(Debug, Clone)]
pub struct Layer<T> {
    pub kind: LayerKind,
    pub weights: Option<Tensor<T>>,
    pub bias: Option<Tensor<T>>,
}

impl<T: Scalar> Layer<T> {
    fn bare(kind: LayerKind) -> Self {
        Layer {
            kind,
            weights: None,
            bias: None,
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.as_ref().map_or(0, Tensor::numel)
            + self.bias.as_ref().map_or(0, Tensor::numel)
    }
}

/// Parameter gradients for one layer, shaped like the layer's tensors.
#[derive(Debug, Clone)]
pub struct LayerGrads<T> {
    pub weights: Tensor<T>,
    pub bias: Tensor<T>,
}

/// Everything the backward pass needs from a forward pass: the input each
/// layer saw, pooling argmax indices, and the head's logits/probabilities.
#[derive(Debug, Clone)]
pub struct ForwardTrace<T> {
    pub inputs: Vec<Tensor<T>>,
    pub argmax: Vec<Option<Vec<u32>>>,
    pub logits: Vec<T>,
    pub probs: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct CnnModel<T> {
    pub layers: Vec<Layer<T>>,
    pub input_channels: usize,
    pub canvas: usize,
}

impl<T: Scalar> CnnModel<T> {
    /// Builds the fixed stack with He-uniform weights (zero biases) drawn
    /// deterministically from `seed`. `canvas` is the square input edge and
    /// must be a multiple of 8 so the three pooling stages divide it evenly.
    pub fn init(input_channels: usize, canvas: usize, seed: u64) -> Result<Self> {
        if !(1..=3).contains(&input_channels) {
            return Err(NnError::InvalidArgument(format!(
                "input channels must be 1..=3, got {input_channels}"
            )));
        }
        if canvas < 8 || canvas % 8 != 0 {
            return Err(NnError::InvalidArgument(format!(
                "canvas must be a positive multiple of 8, got {canvas}"
            )));
        }

        let mut rng = InitRng::new(seed);
        let mut he_uniform = |shape: Vec<usize>, fan_in: usize| {
            let limit = (6.0 / fan_in as f64).sqrt();
            let numel: usize = shape.iter().product();
            let data = (0..numel)
                .map(|_| T::from_f64_exact(limit * rng.next_symmetric()))
                .collect();
            Tensor { shape, data }
        };

        let mut layers = Vec::with_capacity(14);
        let mut cin = input_channels;
        for cout in CONV_CHANNELS {
            layers.push(Layer {
                kind: LayerKind::Conv3x3,
                weights: Some(he_uniform(vec![3, 3, cin, cout], 9 * cin)),
                bias: Some(Tensor::zeros(vec![cout])),
            });
            layers.push(Layer::bare(LayerKind::Relu));
            layers.push(Layer::bare(LayerKind::MaxPool2x2));
            cin = cout;
        }
        layers.push(Layer::bare(LayerKind::Flatten));

        let flat = (canvas / 8) * (canvas / 8) * CONV_CHANNELS[2];
        layers.push(Layer {
            kind: LayerKind::Dense,
            weights: Some(he_uniform(vec![flat, HIDDEN_UNITS], flat)),
            bias: Some(Tensor::zeros(vec![HIDDEN_UNITS])),
        });
        layers.push(Layer::bare(LayerKind::Relu));
        layers.push(Layer {
            kind: LayerKind::Dense,
            weights: Some(he_uniform(vec![HIDDEN_UNITS, NUM_CLASSES], HIDDEN_UNITS)),
            bias: Some(Tensor::zeros(vec![NUM_CLASSES])),
        });
        layers.push(Layer::bare(LayerKind::Softmax));

        Ok(CnnModel {
            layers,
            input_channels,
            canvas,
        })
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// One line per layer for reporting: kind, tensor shapes, parameters.
    pub fn summary(&self) -> Vec<String> {
        self.layers
            .iter()
            .map(|l| match (&l.weights, &l.bias) {
                (Some(w), Some(b)) => format!(
                    "{} weights {:?} bias {:?} ({} params)",
                    l.kind.name(),
                    w.shape,
                    b.shape,
                    l.param_count()
                ),
                _ => l.kind.name().to_string(),
            })
            .collect()
    }

    fn check_input(&self, x: &Tensor<T>) -> Result<()> {
        let want = [self.canvas, self.canvas, self.input_channels];
        if x.shape != want {
            return Err(NnError::InvalidArgument(format!(
                "input shape {:?}, model expects {want:?}",
                x.shape
            )));
        }
        Ok(())
    }

    fn apply_layer(&self, layer: &Layer<T>, x: Tensor<T>) -> Result<(Tensor<T>, Option<Vec<u32>>)> {
        let missing = || NnError::InvalidArgument(format!("{} layer lost its tensors", layer.kind.name()));
        match layer.kind {
            LayerKind::Conv3x3 => {
                let w = layer.weights.as_ref().ok_or_else(missing)?;
                let b = layer.bias.as_ref().ok_or_else(missing)?;
                Ok((conv2d_forward(&x, w, b)?, None))
            }
            LayerKind::Relu => Ok((relu_forward(&x), None)),
            LayerKind::MaxPool2x2 => {
                let (y, idx) = maxpool_forward(&x)?;
                Ok((y, Some(idx)))
            }
            LayerKind::Flatten => {
                let numel = x.numel();
                Ok((
                    Tensor {
                        shape: vec![numel],
                        data: x.data,
                    },
                    None,
                ))
            }
            LayerKind::Dense => {
                let w = layer.weights.as_ref().ok_or_else(missing)?;
                let b = layer.bias.as_ref().ok_or_else(missing)?;
                Ok((dense_forward(&x, w, b)?, None))
            }
            LayerKind::Softmax => Ok((
                Tensor {
                    shape: x.shape.clone(),
                    data: softmax(&x.data),
                },
                None,
            )),
        }
    }

    /// Full forward pass recording per-layer inputs for backprop.
    pub fn forward_cached(&self, x: &Tensor<T>) -> Result<ForwardTrace<T>> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut argmax = Vec::with_capacity(self.layers.len());
        let mut logits = Vec::new();
        let mut cur = x.clone();
        for layer in &self.layers {
            if layer.kind == LayerKind::Softmax {
                logits = cur.data.clone();
            }
            inputs.push(cur.clone());
            let (next, idx) = self.apply_layer(layer, cur)?;
            argmax.push(idx);
            cur = next;
        }
        Ok(ForwardTrace {
            inputs,
            argmax,
            logits,
            probs: cur.data,
        })
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &Tensor<T>) -> Result<Vec<T>> {
        self.check_input(x)?;
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = self.apply_layer(layer, cur)?.0;
        }
        Ok(cur.data)
    }

    /// Predicted class (argmax, ties to the lowest index) and probabilities.
    pub fn predict(&self, x: &Tensor<T>) -> Result<(usize, Vec<T>)> {
        let probs = self.forward(x)?;
        Ok((argmax_lowest(&probs), probs))
    }

    /// Backpropagates a gradient with respect to the logits through all
    /// layers except the softmax head (its gradient is fused into the
    /// cross-entropy term that produced `grad_logits`). Returns per-layer
    /// parameter gradients, `None` for parameterless layers.
    pub fn backward(
        &self,
        trace: &ForwardTrace<T>,
        grad_logits: &[T],
    ) -> Result<Vec<Option<LayerGrads<T>>>> {
        if trace.inputs.len() != self.layers.len() {
            return Err(NnError::InvalidArgument(
                "trace does not match this model's layer count".into(),
            ));
        }
        if grad_logits.len() != trace.logits.len() {
            return Err(NnError::InvalidArgument(format!(
                "{} logit gradients for {} logits",
                grad_logits.len(),
                trace.logits.len()
            )));
        }

        let mut grads: Vec<Option<LayerGrads<T>>> = vec![None; self.layers.len()];
        let mut g = Tensor::new(vec![grad_logits.len()], grad_logits.to_vec())?;

        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &trace.inputs[i];
            match layer.kind {
                LayerKind::Softmax => {
                    if i != self.layers.len() - 1 {
                        return Err(NnError::InvalidArgument(
                            "softmax must be the final layer".into(),
                        ));
                    }
                    // grad_logits already includes the softmax jacobian.
                }
                LayerKind::Dense => {
                    let w = layer.weights.as_ref().unwrap();
                    let (gx, gw, gb) = dense_backward(&g, input, w)?;
                    grads[i] = Some(LayerGrads {
                        weights: gw,
                        bias: gb,
                    });
                    g = gx;
                }
                LayerKind::Relu => {
                    g = relu_backward(&g, input)?;
                }
                LayerKind::Flatten => {
                    g = Tensor {
                        shape: input.shape.clone(),
                        data: g.data,
                    };
                }
                LayerKind::MaxPool2x2 => {
                    let idx = trace.argmax[i].as_ref().ok_or_else(|| {
                        NnError::InvalidArgument("trace lacks pooling indices".into())
                    })?;
                    g = maxpool_backward(&g, idx, &input.shape)?;
                }
                LayerKind::Conv3x3 => {
                    let w = layer.weights.as_ref().unwrap();
                    let (gx, gw, gb) = conv2d_backward(&g, input, w)?;
                    grads[i] = Some(LayerGrads {
                        weights: gw,
                        bias: gb,
                    });
                    g = gx;
                }
            }
        }
        Ok(grads)
    }

    /// Element-wise precision change, e.g. lifting an f32 model to f64 for
    /// gradient checking.
    pub fn cast<U: Scalar>(&self) -> CnnModel<U> {
        CnnModel {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    kind: l.kind,
                    weights: l.weights.as_ref().map(Tensor::cast),
                    bias: l.bias.as_ref().map(Tensor::cast),
                })
                .collect(),
            input_channels: self.input_channels,
            canvas: self.canvas,
        }
    }
}

impl CnnModel<f32> {
    /// Runs inference directly on a rendered image. The image's interleaved
    /// row-major layout matches the channel-last tensor layout, so this is a
    /// reinterpretation plus shape checks.
    pub fn forward_image(&self, img: &RasterImage) -> Result<Vec<f32>> {
        self.forward(&image_to_tensor(img)?)
    }
}

/// Reinterprets a rendered image as a channel-last input tensor.
pub fn image_to_tensor(img: &RasterImage) -> Result<Tensor<f32>> {
    Tensor::new(
        vec![img.height, img.width, img.channels],
        img.pixels.clone(),
    )
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax_lowest<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Adam moments for one parameterized layer.
#[derive(Debug, Clone)]
pub struct LayerMoments<T> {
    pub m_w: Vec<T>,
    pub m_b: Vec<T>,
    pub v_w: Vec<T>,
    pub v_b: Vec<T>,
}

/// Optimizer state shared across the whole model: one step counter and one
/// set of first/second moments per parameterized layer.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub t: u64,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    pub moments: Vec<Option<LayerMoments<T>>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(model: &CnnModel<T>, lr: T) -> Self {
        AdamState {
            t: 0,
            lr,
            beta1: T::from_f64_exact(0.9),
            beta2: T::from_f64_exact(0.999),
            eps: T::from_f64_exact(1e-8),
            moments: model
                .layers
                .iter()
                .map(|l| {
                    l.weights.as_ref().map(|w| LayerMoments {
                        m_w: vec![T::zero(); w.numel()],
                        m_b: vec![T::zero(); l.bias.as_ref().map_or(0, Tensor::numel)],
                        v_w: vec![T::zero(); w.numel()],
                        v_b: vec![T::zero(); l.bias.as_ref().map_or(0, Tensor::numel)],
                    })
                })
                .collect(),
        }
    }

    /// Applies one optimizer step to every parameterized layer. All layers
    /// share the advanced step counter, matching a single global update.
    pub fn apply(
        &mut self,
        model: &mut CnnModel<T>,
        grads: &[Option<LayerGrads<T>>],
    ) -> Result<()> {
        if grads.len() != model.layers.len() || self.moments.len() != model.layers.len() {
            return Err(NnError::InvalidArgument(
                "gradient/moment lists do not match the model".into(),
            ));
        }
        self.t += 1;
        for (i, layer) in model.layers.iter_mut().enumerate() {
            let (Some(w), Some(b)) = (&mut layer.weights, &mut layer.bias) else {
                continue;
            };
            let g = grads[i].as_ref().ok_or_else(|| {
                NnError::InvalidArgument(format!("layer {i} has parameters but no gradient"))
            })?;
            let m = self.moments[i].as_mut().ok_or_else(|| {
                NnError::InvalidArgument(format!("layer {i} has parameters but no moments"))
            })?;
            adam_step(
                &mut w.data, &g.weights.data, &mut m.m_w, &mut m.v_w, self.t, self.lr, self.beta1,
                self.beta2, self.eps,
            )?;
            adam_step(
                &mut b.data, &g.bias.data, &mut m.m_b, &mut m.v_b, self.t, self.lr, self.beta1,
                self.beta2, self.eps,
            )?;
        }
        Ok(())
    }
}

/// Mean loss and accuracy over the batch a step was taken on.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub loss: f64,
    pub accuracy: f64,
}

/// One optimizer step on a mini-batch: forward and backward per sample,
/// gradients averaged over the batch, a single Adam update.
pub fn train_step<T: Scalar>(
    model: &mut CnnModel<T>,
    opt: &mut AdamState<T>,
    batch: &[(Tensor<T>, usize)],
) -> Result<StepStats> {
    if batch.is_empty() {
        return Err(NnError::InvalidArgument("empty batch".into()));
    }
    let mut total: Vec<Option<LayerGrads<T>>> = vec![None; model.layers.len()];
    let mut loss_sum = 0.0f64;
    let mut correct = 0usize;

    for (x, label) in batch {
        if *label >= NUM_CLASSES {
            return Err(NnError::InvalidArgument(format!(
                "label {label} out of range for {NUM_CLASSES} classes"
            )));
        }
        let trace = model.forward_cached(x)?;
        let mut one_hot = vec![T::zero(); NUM_CLASSES];
        one_hot[*label] = T::one();
        let (loss, grad_logits) = softmax_xent(&trace.logits, &one_hot)?;
        loss_sum += loss.to_f64().unwrap();
        if argmax_lowest(&trace.probs) == *label {
            correct += 1;
        }
        let grads = model.backward(&trace, &grad_logits)?;
        for (acc, g) in total.iter_mut().zip(grads) {
            match (acc.as_mut(), g) {
                (None, Some(g)) => *acc = Some(g),
                (Some(acc), Some(g)) => {
                    for (a, v) in acc.weights.data.iter_mut().zip(&g.weights.data) {
                        *a = *a + *v;
                    }
                    for (a, v) in acc.bias.data.iter_mut().zip(&g.bias.data) {
                        *a = *a + *v;
                    }
                }
                _ => {}
            }
        }
    }

    let scale = T::one() / T::from_usize(batch.len()).unwrap();
    for g in total.iter_mut().flatten() {
        for v in &mut g.weights.data {
            *v = *v * scale;
        }
        for v in &mut g.bias.data {
            *v = *v * scale;
        }
    }
    opt.apply(model, &total)?;

    Ok(StepStats {
        loss: loss_sum / batch.len() as f64,
        accuracy: correct as f64 / batch.len() as f64,
    })
}
