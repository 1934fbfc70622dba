//! Minimal classical network stack: dense, 2-D convolution, 2×2 max pooling,
//! ReLU, inverted dropout, softmax with a per-class binary cross-entropy loss,
//! uniform initializers and plain SGD with milestone step decay.

mod init;
mod layers;
mod loss;
mod ops;
mod optim;
mod tensor;

pub use init::{init_kaiming_uniform, init_uniform_inverse_sqrt, UniformInit};
pub use layers::{Conv2d, Dense, Dropout, MaxPool2, Relu};
pub use loss::{one_hot, softmax, softmax_cross_entropy, PROB_CLAMP};
pub use ops::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, dropout, maxpool2,
    maxpool2_backward, relu, relu_backward, DropoutSpec, PoolIndices,
};
pub use optim::{sgd_step, SgdState};
pub use tensor::RealTensor;

/// Anything owning trainable tensors.
pub trait Parameterized<T> {
    /// Visit every trainable tensor in a fixed order with a stable name.
    fn visit_params(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>));
}
