//! Differentiable building blocks with verifiable forward/backward math.
//!
//! Each operator is a pure function pair `*_forward` / `*_backward`; the
//! backward contracts are checked against central finite differences by
//! [`gradcheck`].

mod bilinear;
mod conv;
mod dsconv;
mod gelu;
pub mod gradcheck;
mod simam;

pub use bilinear::{bilinear_sample, bilinear_sample_detailed, BilinearSample};
pub use conv::{conv2d_reference, conv_flops, ConvLayerSpec};
pub use dsconv::{dsconv_backward, dsconv_forward, ConvAxis, DsConvGradients, DsConvKernel};
pub use gelu::{gelu_backward, gelu_forward};
pub use gradcheck::{finite_diff_gradcheck, InputBundle};
pub use simam::{simam_attend, simam_attention, simam_backward, SimAmConfig};
