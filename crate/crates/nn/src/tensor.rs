use crate::{NnError, Result, Scalar};

/// Dense row-major tensor. Convolution activations use channel-last
/// [height, width, channels] layout, so flattening is a pure reshape.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let numel: usize = shape.iter().product();
        if shape.is_empty() || numel == 0 {
            return Err(NnError::InvalidArgument(format!(
                "degenerate tensor shape {shape:?}"
            )));
        }
        if data.len() != numel {
            return Err(NnError::InvalidArgument(format!(
                "shape {shape:?} wants {numel} values, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NnError::InvalidArgument(
                "tensor holds non-finite values".into(),
            ));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let numel: usize = shape.iter().product();
        Tensor {
            shape,
            data: vec![T::zero(); numel],
        }
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    /// Casts element-wise; used to lift an f32 model into the f64
    /// gradient-check domain.
    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .map(|v| U::from_f64_exact(v.to_f64().unwrap()))
                .collect(),
        }
    }
}
