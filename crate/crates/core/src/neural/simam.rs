//! SimAM: parameter-free attention from a per-neuron energy function.
//!
//! For every neuron `x_t`, with channel mean `mu` and population variance
//! `var` over the spatial positions of its (batch, channel) slice:
//!
//! ```text
//! e_t = 4 (var + lambda) / ((x_t - mu)^2 + 2 var + 2 lambda)
//! out_t = sigmoid(1 / e_t) * x_t
//! ```
//!
//! The module creates no learned parameters and holds no state; the inverse
//! energy simplifies to `1/e_t = (x_t - mu)^2 / (4 (var + lambda)) + 1/2`,
//! which is the form used here.

use crate::{Error, Result, Tensor};

/// Configuration for SimAM attention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimAmConfig {
    lambda: f64,
}

impl SimAmConfig {
    /// `lambda` must be strictly positive: it guards the division when a
    /// channel has zero variance.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "SimAM lambda must be a positive finite value, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Default for SimAmConfig {
    /// The customary compensation value, 1e-4.
    fn default() -> Self {
        Self { lambda: 1e-4 }
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn channel_stats(slice: &[f64]) -> (f64, f64) {
    let m = slice.len() as f64;
    let mean = slice.iter().sum::<f64>() / m;
    let var = slice.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / m;
    (mean, var)
}

fn for_each_channel(
    features: &Tensor,
    mut f: impl FnMut(std::ops::Range<usize>, f64, f64),
) -> Result<()> {
    features.expect_rank(4, "SimAM features")?;
    let (n, c, h, w) = (
        features.shape()[0],
        features.shape()[1],
        features.shape()[2],
        features.shape()[3],
    );
    let plane = h * w;
    for b in 0..n {
        for ch in 0..c {
            let start = (b * c + ch) * plane;
            let range = start..start + plane;
            let (mean, var) = channel_stats(&features.data()[range.clone()]);
            f(range, mean, var);
        }
    }
    Ok(())
}

/// Attention coefficients `sigmoid(1/e_t)`, same shape as `features`.
/// Every coefficient lies in `(0.5, 1)` because `1/e_t > 0`.
pub fn simam_attention(features: &Tensor, config: &SimAmConfig) -> Result<Tensor> {
    let mut out = vec![0.0; features.len()];
    for_each_channel(features, |range, mean, var| {
        let v4 = 4.0 * (var + config.lambda);
        for i in range {
            let u = features.data()[i] - mean;
            out[i] = sigmoid(u * u / v4 + 0.5);
        }
    })?;
    Ok(Tensor::from_parts(features.shape().to_vec(), out))
}

/// Attention-weighted features: `sigmoid(1/e_t) * x_t`.
pub fn simam_attend(features: &Tensor, config: &SimAmConfig) -> Result<Tensor> {
    let weights = simam_attention(features, config)?;
    let data = features
        .data()
        .iter()
        .zip(weights.data())
        .map(|(&x, &a)| a * x)
        .collect();
    Ok(Tensor::from_parts(features.shape().to_vec(), data))
}

/// Gradient of `simam_attend` with respect to the features, given the
/// upstream gradient. Accounts for the dependence of the channel mean and
/// variance on every neuron in the slice.
pub fn simam_backward(features: &Tensor, config: &SimAmConfig, upstream: &Tensor) -> Result<Tensor> {
    if features.shape() != upstream.shape() {
        return Err(Error::ShapeMismatch(format!(
            "SimAM upstream gradient shape {:?} != features shape {:?}",
            upstream.shape(),
            features.shape()
        )));
    }
    let x = features.data();
    let g = upstream.data();
    let mut grad = vec![0.0; x.len()];
    for_each_channel(features, |range, mean, var| {
        let m = range.len() as f64;
        let v = var + config.lambda;
        // w_t = g_t * x_t * a_t * (1 - a_t), the chain through the sigmoid.
        let mut s1 = 0.0; // sum w_t * u_t
        let mut s2 = 0.0; // sum w_t * u_t^2
        let mut w = vec![0.0; range.len()];
        let mut a = vec![0.0; range.len()];
        for (k, i) in range.clone().enumerate() {
            let u = x[i] - mean;
            let at = sigmoid(u * u / (4.0 * v) + 0.5);
            let wt = g[i] * x[i] * at * (1.0 - at);
            a[k] = at;
            w[k] = wt;
            s1 += wt * u;
            s2 += wt * u * u;
        }
        for (k, i) in range.enumerate() {
            let u = x[i] - mean;
            grad[i] = g[i] * a[k] + w[k] * u / (2.0 * v)
                - s1 / (2.0 * v * m)
                - u * s2 / (2.0 * m * v * v);
        }
    })?;
    Ok(Tensor::from_parts(features.shape().to_vec(), grad))
}
