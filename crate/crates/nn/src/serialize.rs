//! Binary model files. Layout, all integers and floats little-endian:
//!
//! ```text
//! magic "HSIG" | u32 version (1) | u32 layer count | u32 input channels
//! per layer: u8 kind tag | u32 ndims | ndims x u32 weight dims
//!            | weight f32s | bias f32s        (ndims = 0: nothing follows)
//! optional optimizer block (present iff any bytes remain):
//!   u32 step count | f32 lr | f32 beta1 | f32 beta2 | f32 eps
//!   per parameterized layer: m_w | m_b | v_w | v_b, raw f32 runs
//! ```
//!
//! The bias length is the last weight dimension, so it is not stored. The
//! input canvas is recovered from the first dense layer's input width.

use std::path::Path;

use crate::model::{AdamState, CnnModel, Layer, LayerKind, LayerMoments};
use crate::{NnError, Result, Tensor};

const MAGIC: &[u8; 4] = b"HSIG";
const VERSION: u32 = 1;

pub fn save_model(
    path: &Path,
    model: &CnnModel<f32>,
    opt: Option<&AdamState<f32>>,
) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(model.layers.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(model.input_channels as u32).to_le_bytes());

    for layer in &model.layers {
        buf.push(layer.kind.tag());
        match (&layer.weights, &layer.bias) {
            (Some(w), Some(b)) => {
                buf.extend_from_slice(&(w.shape.len() as u32).to_le_bytes());
                for &d in &w.shape {
                    buf.extend_from_slice(&(d as u32).to_le_bytes());
                }
                for &v in &w.data {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
                for &v in &b.data {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            (None, None) => buf.extend_from_slice(&0u32.to_le_bytes()),
            _ => {
                return Err(NnError::InvalidArgument(format!(
                    "{} layer has weights or bias but not both",
                    layer.kind.name()
                )));
            }
        }
    }

    if let Some(opt) = opt {
        let t = u32::try_from(opt.t).map_err(|_| {
            NnError::InvalidArgument(format!("step count {} exceeds the file format", opt.t))
        })?;
        buf.extend_from_slice(&t.to_le_bytes());
        for v in [opt.lr, opt.beta1, opt.beta2, opt.eps] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        if opt.moments.len() != model.layers.len() {
            return Err(NnError::InvalidArgument(
                "optimizer state does not match the model".into(),
            ));
        }
        for (layer, moments) in model.layers.iter().zip(&opt.moments) {
            let Some(w) = &layer.weights else { continue };
            let m = moments.as_ref().ok_or_else(|| {
                NnError::InvalidArgument("optimizer lacks moments for a parameterized layer".into())
            })?;
            let b_len = layer.bias.as_ref().map_or(0, Tensor::numel);
            for (run, want) in [
                (&m.m_w, w.numel()),
                (&m.m_b, b_len),
                (&m.v_w, w.numel()),
                (&m.v_b, b_len),
            ] {
                if run.len() != want {
                    return Err(NnError::InvalidArgument(
                        "optimizer moment length does not match its layer".into(),
                    ));
                }
                for &v in run {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
    }

    std::fs::write(path, buf)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(NnError::Format(format!(
                "file truncated: wanted {n} bytes at offset {}, file ends at {}",
                self.pos,
                self.buf.len()
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32_run(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = self.take(4 * n)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

pub fn load_model(path: &Path) -> Result<(CnnModel<f32>, Option<AdamState<f32>>)> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader { buf: &bytes, pos: 0 };

    if r.take(4)? != MAGIC {
        return Err(NnError::Format("bad magic, not a model file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(NnError::Format(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let layer_count = r.u32()? as usize;
    if layer_count == 0 || layer_count > 1024 {
        return Err(NnError::Format(format!(
            "implausible layer count {layer_count}"
        )));
    }
    let input_channels = r.u32()? as usize;
    if !(1..=3).contains(&input_channels) {
        return Err(NnError::Format(format!(
            "input channels must be 1..=3, got {input_channels}"
        )));
    }

    let mut layers = Vec::with_capacity(layer_count);
    for i in 0..layer_count {
        let kind = LayerKind::from_tag(r.u8()?)?;
        let ndims = r.u32()? as usize;
        let expected_ndims = match kind {
            LayerKind::Conv3x3 => 4,
            LayerKind::Dense => 2,
            _ => 0,
        };
        if ndims != expected_ndims {
            return Err(NnError::Format(format!(
                "layer {i} ({}) has {ndims} dims, expected {expected_ndims}",
                kind.name()
            )));
        }
        let (weights, bias) = if ndims == 0 {
            (None, None)
        } else {
            let mut shape = Vec::with_capacity(ndims);
            for _ in 0..ndims {
                shape.push(r.u32()? as usize);
            }
            if kind == LayerKind::Conv3x3 && (shape[0] != 3 || shape[1] != 3) {
                return Err(NnError::Format(format!(
                    "layer {i} kernel spatial dims {:?} are not 3x3",
                    &shape[..2]
                )));
            }
            let numel: usize = shape.iter().product();
            let out = *shape.last().unwrap();
            if numel == 0 {
                return Err(NnError::Format(format!("layer {i} has an empty tensor")));
            }
            let w = Tensor::new(shape, r.f32_run(numel)?)
                .map_err(|e| NnError::Format(format!("layer {i} weights: {e}")))?;
            let b = Tensor::new(vec![out], r.f32_run(out)?)
                .map_err(|e| NnError::Format(format!("layer {i} bias: {e}")))?;
            (Some(w), Some(b))
        };
        layers.push(Layer {
            kind,
            weights,
            bias,
        });
    }

    let canvas = infer_canvas(&layers, input_channels)?;
    let model = CnnModel {
        layers,
        input_channels,
        canvas,
    };

    let opt = if r.remaining() == 0 {
        None
    } else {
        let t = r.u32()? as u64;
        let lr = r.f32()?;
        let beta1 = r.f32()?;
        let beta2 = r.f32()?;
        let eps = r.f32()?;
        let mut moments = Vec::with_capacity(model.layers.len());
        for layer in &model.layers {
            let Some(w) = &layer.weights else {
                moments.push(None);
                continue;
            };
            let b_len = layer.bias.as_ref().map_or(0, Tensor::numel);
            moments.push(Some(LayerMoments {
                m_w: r.f32_run(w.numel())?,
                m_b: r.f32_run(b_len)?,
                v_w: r.f32_run(w.numel())?,
                v_b: r.f32_run(b_len)?,
            }));
        }
        Some(AdamState {
            t,
            lr,
            beta1,
            beta2,
            eps,
            moments,
        })
    };

    if r.remaining() != 0 {
        return Err(NnError::Format(format!(
            "{} trailing bytes after the model payload",
            r.remaining()
        )));
    }
    Ok((model, opt))
}

/// Recovers the square input edge from the stack: the first dense layer sees
/// (canvas / 8)^2 * C_flat values, where C_flat is the channel width of the
/// last conv layer and 8 accounts for the three pooling stages.
fn infer_canvas(layers: &[Layer<f32>], input_channels: usize) -> Result<usize> {
    let first_conv = layers
        .iter()
        .find(|l| l.kind == LayerKind::Conv3x3)
        .ok_or_else(|| NnError::Format("model has no conv layer".into()))?;
    let conv_cin = first_conv.weights.as_ref().unwrap().shape[2];
    if conv_cin != input_channels {
        return Err(NnError::Format(format!(
            "first conv expects {conv_cin} channels but the header says {input_channels}"
        )));
    }
    let last_conv_out = layers
        .iter()
        .filter(|l| l.kind == LayerKind::Conv3x3)
        .last()
        .unwrap()
        .weights
        .as_ref()
        .unwrap()
        .shape[3];
    let dense_in = layers
        .iter()
        .find(|l| l.kind == LayerKind::Dense)
        .ok_or_else(|| NnError::Format("model has no dense layer".into()))?
        .weights
        .as_ref()
        .unwrap()
        .shape[0];
    if dense_in % last_conv_out != 0 {
        return Err(NnError::Format(format!(
            "dense input {dense_in} is not a multiple of the {last_conv_out} conv channels"
        )));
    }
    let hw = dense_in / last_conv_out;
    let edge = (hw as f64).sqrt().round() as usize;
    if edge * edge != hw {
        return Err(NnError::Format(format!(
            "flattened plane of {hw} pixels is not square"
        )));
    }
    Ok(edge * 8)
}
