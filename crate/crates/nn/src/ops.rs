//! Layer math as free functions over [`Tensor`]. All loops run in a fixed
//! order with contiguous inner accumulations, so results are deterministic
//! and the compiler can vectorize the channel loops.

use crate::{NnError, Result, Scalar, Tensor};

fn conv_shapes<T: Scalar>(
    x: &Tensor<T>,
    w: &Tensor<T>,
    b: Option<&Tensor<T>>,
) -> Result<(usize, usize, usize, usize)> {
    let [h, wd, cin] = x.shape[..] else {
        return Err(NnError::InvalidArgument(format!(
            "conv input must be [H, W, C], got {:?}",
            x.shape
        )));
    };
    let [kh, kw, wcin, cout] = w.shape[..] else {
        return Err(NnError::InvalidArgument(format!(
            "conv kernel must be [3, 3, Cin, Cout], got {:?}",
            w.shape
        )));
    };
    if kh != 3 || kw != 3 {
        return Err(NnError::InvalidArgument(format!(
            "kernel must be 3x3, got {kh}x{kw}"
        )));
    }
    if wcin != cin {
        return Err(NnError::InvalidArgument(format!(
            "kernel expects {wcin} input channels, input has {cin}"
        )));
    }
    if let Some(b) = b {
        if b.shape != [cout] {
            return Err(NnError::InvalidArgument(format!(
                "bias shape {:?} does not match {cout} output channels",
                b.shape
            )));
        }
    }
    Ok((h, wd, cin, cout))
}

/// Stride-1, zero-padded 3x3 cross-correlation plus bias:
/// [H, W, Cin] * [3, 3, Cin, Cout] -> [H, W, Cout].
pub fn conv2d_forward<T: Scalar>(
    x: &Tensor<T>,
    w: &Tensor<T>,
    b: &Tensor<T>,
) -> Result<Tensor<T>> {
    let (h, wd, cin, cout) = conv_shapes(x, w, Some(b))?;
    let mut out = Tensor::zeros(vec![h, wd, cout]);

    let mut acc = vec![T::zero(); cout];
    for oy in 0..h {
        for ox in 0..wd {
            acc.copy_from_slice(&b.data);
            for ky in 0..3 {
                let iy = oy as isize + ky as isize - 1;
                if iy < 0 || iy >= h as isize {
                    continue;
                }
                for kx in 0..3 {
                    let ix = ox as isize + kx as isize - 1;
                    if ix < 0 || ix >= wd as isize {
                        continue;
                    }
                    let xbase = (iy as usize * wd + ix as usize) * cin;
                    let wrow = (ky * 3 + kx) * cin;
                    for ci in 0..cin {
                        let xv = x.data[xbase + ci];
                        let wbase = (wrow + ci) * cout;
                        let wslice = &w.data[wbase..wbase + cout];
                        for (a, &wv) in acc.iter_mut().zip(wslice) {
                            *a = *a + xv * wv;
                        }
                    }
                }
            }
            let obase = (oy * wd + ox) * cout;
            out.data[obase..obase + cout].copy_from_slice(&acc);
        }
    }
    Ok(out)
}

/// Exact gradients of `conv2d_forward` with respect to input, weights, and
/// bias, given the upstream gradient and the cached forward input.
pub fn conv2d_backward<T: Scalar>(
    grad_out: &Tensor<T>,
    x: &Tensor<T>,
    w: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>, Tensor<T>)> {
    let (h, wd, cin, cout) = conv_shapes(x, w, None)?;
    if grad_out.shape != [h, wd, cout] {
        return Err(NnError::InvalidArgument(format!(
            "upstream gradient shape {:?} does not match output [{h}, {wd}, {cout}]",
            grad_out.shape
        )));
    }

    let mut gx = Tensor::zeros(x.shape.clone());
    let mut gw = Tensor::zeros(w.shape.clone());
    let mut gb = Tensor::zeros(vec![cout]);

    for oy in 0..h {
        for ox in 0..wd {
            let gbase = (oy * wd + ox) * cout;
            let gout = &grad_out.data[gbase..gbase + cout];
            for (acc, &g) in gb.data.iter_mut().zip(gout) {
                *acc = *acc + g;
            }
            for ky in 0..3 {
                let iy = oy as isize + ky as isize - 1;
                if iy < 0 || iy >= h as isize {
                    continue;
                }
                for kx in 0..3 {
                    let ix = ox as isize + kx as isize - 1;
                    if ix < 0 || ix >= wd as isize {
                        continue;
                    }
                    let xbase = (iy as usize * wd + ix as usize) * cin;
                    let wrow = (ky * 3 + kx) * cin;
                    for ci in 0..cin {
                        let xv = x.data[xbase + ci];
                        let wbase = (wrow + ci) * cout;
                        let wslice = &w.data[wbase..wbase + cout];
                        let gwslice = &mut gw.data[wbase..wbase + cout];
                        let mut dot = T::zero();
                        for co in 0..cout {
                            let g = gout[co];
                            gwslice[co] = gwslice[co] + xv * g;
                            dot = dot + wslice[co] * g;
                        }
                        gx.data[xbase + ci] = gx.data[xbase + ci] + dot;
                    }
                }
            }
        }
    }
    Ok((gx, gw, gb))
}

/// 2x2 stride-2 max pooling; odd trailing rows/columns are excluded. Also
/// returns, per output element, the flat input index of the maximum (ties
/// broken by first position in row-major scan order) for the backward pass.
pub fn maxpool_forward<T: Scalar>(x: &Tensor<T>) -> Result<(Tensor<T>, Vec<u32>)> {
    let [h, w, c] = x.shape[..] else {
        return Err(NnError::InvalidArgument(format!(
            "pool input must be [H, W, C], got {:?}",
            x.shape
        )));
    };
    let (oh, ow) = (h / 2, w / 2);
    if oh == 0 || ow == 0 {
        return Err(NnError::InvalidArgument(format!(
            "input {h}x{w} too small for 2x2 pooling"
        )));
    }
    let mut out = Tensor::zeros(vec![oh, ow, c]);
    let mut argmax = vec![0u32; oh * ow * c];

    for oy in 0..oh {
        for ox in 0..ow {
            for ch in 0..c {
                let mut best_idx = ((2 * oy) * w + 2 * ox) * c + ch;
                let mut best = x.data[best_idx];
                for (dy, dx) in [(0usize, 1usize), (1, 0), (1, 1)] {
                    let idx = ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
                    if x.data[idx] > best {
                        best = x.data[idx];
                        best_idx = idx;
                    }
                }
                let o = (oy * ow + ox) * c + ch;
                out.data[o] = best;
                argmax[o] = best_idx as u32;
            }
        }
    }
    Ok((out, argmax))
}

/// Routes each upstream gradient to the input position that won the max;
/// all other positions get zero.
pub fn maxpool_backward<T: Scalar>(
    grad_out: &Tensor<T>,
    argmax: &[u32],
    input_shape: &[usize],
) -> Result<Tensor<T>> {
    if grad_out.numel() != argmax.len() {
        return Err(NnError::InvalidArgument(format!(
            "gradient holds {} values but {} argmax entries were recorded",
            grad_out.numel(),
            argmax.len()
        )));
    }
    let numel: usize = input_shape.iter().product();
    let mut gx = Tensor::zeros(input_shape.to_vec());
    for (&idx, &g) in argmax.iter().zip(&grad_out.data) {
        let idx = idx as usize;
        if idx >= numel {
            return Err(NnError::InvalidArgument(format!(
                "argmax index {idx} outside input of {numel} elements"
            )));
        }
        gx.data[idx] = gx.data[idx] + g;
    }
    Ok(gx)
}

fn dense_shapes<T: Scalar>(
    x: &Tensor<T>,
    w: &Tensor<T>,
    b: Option<&Tensor<T>>,
) -> Result<(usize, usize)> {
    let [fin] = x.shape[..] else {
        return Err(NnError::InvalidArgument(format!(
            "dense input must be a vector, got {:?}",
            x.shape
        )));
    };
    let [win, wout] = w.shape[..] else {
        return Err(NnError::InvalidArgument(format!(
            "dense weights must be [in, out], got {:?}",
            w.shape
        )));
    };
    if win != fin {
        return Err(NnError::InvalidArgument(format!(
            "weights expect {win} inputs, got {fin}"
        )));
    }
    if let Some(b) = b {
        if b.shape != [wout] {
            return Err(NnError::InvalidArgument(format!(
                "bias shape {:?} does not match {wout} outputs",
                b.shape
            )));
        }
    }
    Ok((fin, wout))
}

/// Affine map y[o] = sum_i x[i] w[i,o] + b[o].
pub fn dense_forward<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    let (fin, fout) = dense_shapes(x, w, Some(b))?;
    let mut out = b.data.clone();
    for i in 0..fin {
        let xv = x.data[i];
        let wrow = &w.data[i * fout..(i + 1) * fout];
        for (o, &wv) in out.iter_mut().zip(wrow) {
            *o = *o + xv * wv;
        }
    }
    Tensor::new(vec![fout], out)
}

/// Exact gradients of `dense_forward`.
pub fn dense_backward<T: Scalar>(
    grad_out: &Tensor<T>,
    x: &Tensor<T>,
    w: &Tensor<T>,
) -> Result<(Tensor<T>, Tensor<T>, Tensor<T>)> {
    let (fin, fout) = dense_shapes(x, w, None)?;
    if grad_out.shape != [fout] {
        return Err(NnError::InvalidArgument(format!(
            "upstream gradient shape {:?} does not match {fout} outputs",
            grad_out.shape
        )));
    }
    let mut gx = Tensor::zeros(vec![fin]);
    let mut gw = Tensor::zeros(w.shape.clone());
    let gb = grad_out.clone();

    for i in 0..fin {
        let xv = x.data[i];
        let wrow = &w.data[i * fout..(i + 1) * fout];
        let gwrow = &mut gw.data[i * fout..(i + 1) * fout];
        let mut dot = T::zero();
        for o in 0..fout {
            let g = grad_out.data[o];
            gwrow[o] = gwrow[o] + xv * g;
            dot = dot + wrow[o] * g;
        }
        gx.data[i] = dot;
    }
    Ok((gx, gw, gb))
}

/// Elementwise max(x, 0).
pub fn relu_forward<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    Tensor {
        shape: x.shape.clone(),
        data: x
            .data
            .iter()
            .map(|&v| if v > T::zero() { v } else { T::zero() })
            .collect(),
    }
}

/// Masks the upstream gradient by x > 0; the subgradient at exactly 0 is 0.
pub fn relu_backward<T: Scalar>(grad_out: &Tensor<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    if grad_out.shape != x.shape {
        return Err(NnError::InvalidArgument(format!(
            "gradient shape {:?} does not match input {:?}",
            grad_out.shape, x.shape
        )));
    }
    Ok(Tensor {
        shape: x.shape.clone(),
        data: grad_out
            .data
            .iter()
            .zip(&x.data)
            .map(|(&g, &v)| if v > T::zero() { g } else { T::zero() })
            .collect(),
    })
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum = exps.iter().fold(T::zero(), |a, &b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Fused softmax + categorical cross-entropy: returns the loss
/// -log p[target] and the gradient with respect to the logits, p - target.
pub fn softmax_xent<T: Scalar>(logits: &[T], target_one_hot: &[T]) -> Result<(T, Vec<T>)> {
    if logits.len() != target_one_hot.len() {
        return Err(NnError::InvalidArgument(format!(
            "{} logits vs {} target entries",
            logits.len(),
            target_one_hot.len()
        )));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(NnError::InvalidArgument("non-finite logits".into()));
    }
    let ones = target_one_hot.iter().filter(|&&v| v == T::one()).count();
    let zeros = target_one_hot.iter().filter(|&&v| v == T::zero()).count();
    if ones != 1 || zeros != target_one_hot.len() - 1 {
        return Err(NnError::InvalidArgument(
            "target must be one-hot (a single 1, rest 0)".into(),
        ));
    }
    let target_idx = target_one_hot
        .iter()
        .position(|&v| v == T::one())
        .unwrap();

    let p = softmax(logits);
    let eps = T::from_f64_exact(1e-300);
    let loss = -(p[target_idx].max(eps)).ln();
    let grad = p
        .iter()
        .zip(target_one_hot)
        .map(|(&pi, &ti)| pi - ti)
        .collect();
    Ok((loss, grad))
}

/// One bias-corrected Adam update over a flat parameter slice, in place.
/// `t` is the 1-based step count after this update.
#[allow(clippy::too_many_arguments)]
pub fn adam_step<T: Scalar>(
    params: &mut [T],
    grads: &[T],
    m: &mut [T],
    v: &mut [T],
    t: u64,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
) -> Result<()> {
    if grads.len() != params.len() || m.len() != params.len() || v.len() != params.len() {
        return Err(NnError::InvalidArgument(format!(
            "parameter/gradient/moment lengths disagree: {} / {} / {} / {}",
            params.len(),
            grads.len(),
            m.len(),
            v.len()
        )));
    }
    if t == 0 {
        return Err(NnError::InvalidArgument(
            "step count must be 1-based at update time".into(),
        ));
    }
    let one = T::one();
    let bc1 = one - beta1.powi(t as i32);
    let bc2 = one - beta2.powi(t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (one - beta1) * g;
        v[i] = beta2 * v[i] + (one - beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
