//! A small convolutional classifier implemented from first principles:
//! conv/pool/dense forward and backward passes, Adam, central-difference
//! gradient checking, and a versioned binary model format. Training runs in
//! single precision; gradient checks instantiate the same code at double
//! precision.

mod gradcheck;
mod model;
mod ops;
mod rng;
mod serialize;
mod tensor;

pub use gradcheck::{check_against_numeric, grad_check_model, LayerCheckReport};
pub use model::{
    argmax_lowest, image_to_tensor, train_step, AdamState, CnnModel, ForwardTrace, Layer,
    LayerGrads, LayerKind, LayerMoments, StepStats, NUM_CLASSES,
};
pub use ops::{
    adam_step, conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool_backward,
    maxpool_forward, relu_backward, relu_forward, softmax, softmax_xent,
};
pub use serialize::{load_model, save_model};
pub use tensor::Tensor;

/// Floating-point scalar the network runs on: f32 for training and
/// inference, f64 for gradient checking.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static
{
    fn from_f64_exact(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NnError>;
