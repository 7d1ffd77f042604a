//! GELU activation: `y = x * Phi(x)` with the exact standard normal CDF.
//!
//! `Phi` is evaluated through `erfc` rather than the tanh approximation, so
//! oracle comparisons are limited only by the libm error function (< 1 ulp).

use crate::{Result, Tensor};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF. `erfc` keeps the negative tail accurate where
/// `0.5 * (1 + erf)` would cancel.
#[inline]
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal PDF.
#[inline]
pub(crate) fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Elementwise `x * Phi(x)`. Output shape equals input shape.
pub fn gelu_forward(x: &Tensor) -> Tensor {
    Tensor::from_parts(
        x.shape().to_vec(),
        x.data().iter().map(|&v| v * normal_cdf(v)).collect(),
    )
}

/// Given the upstream gradient `g`, returns `g * (Phi(x) + x * phi(x))`.
pub fn gelu_backward(x: &Tensor, upstream: &Tensor) -> Result<Tensor> {
    if x.shape() != upstream.shape() {
        return Err(crate::Error::ShapeMismatch(format!(
            "gelu upstream gradient shape {:?} != input shape {:?}",
            upstream.shape(),
            x.shape()
        )));
    }
    let data = x
        .data()
        .iter()
        .zip(upstream.data())
        .map(|(&v, &g)| g * (normal_cdf(v) + v * normal_pdf(v)))
        .collect();
    Ok(Tensor::from_parts(x.shape().to_vec(), data))
}
