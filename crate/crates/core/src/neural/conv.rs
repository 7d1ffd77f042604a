//! Reference 2-D convolution (cross-correlation) and FLOPs accounting.
//!
//! The reference path is the equivalence baseline for the deformable
//! convolution and the ground truth for the FLOPs formula.

use crate::{Error, Result, Tensor};

/// Dimensions of one convolution layer for FLOPs accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvLayerSpec {
    pub c_in: u64,
    pub c_out: u64,
    pub k_h: u64,
    pub k_w: u64,
    pub h_out: u64,
    pub w_out: u64,
}

impl ConvLayerSpec {
    pub fn new(c_in: u64, c_out: u64, k_h: u64, k_w: u64, h_out: u64, w_out: u64) -> Result<Self> {
        let spec = Self {
            c_in,
            c_out,
            k_h,
            k_w,
            h_out,
            w_out,
        };
        if [c_in, c_out, k_h, k_w, h_out, w_out].iter().any(|&v| v == 0) {
            return Err(Error::InvalidInput(format!(
                "conv layer extents must all be >= 1, got {spec:?}"
            )));
        }
        Ok(spec)
    }
}

/// `2 * C_in * H_out * W_out * K_H * K_W * C_out`, exact.
pub fn conv_flops(spec: &ConvLayerSpec) -> u64 {
    let product = 2u128
        * spec.c_in as u128
        * spec.h_out as u128
        * spec.w_out as u128
        * spec.k_h as u128
        * spec.k_w as u128
        * spec.c_out as u128;
    u64::try_from(product).expect("FLOPs count exceeds u64")
}

/// Standard cross-correlation with zero padding.
///
/// `input` is NCHW, `kernel` is `[C_out, C_in, K_H, K_W]`; output extents
/// follow `floor((H + 2*pad - K) / stride) + 1`.
pub fn conv2d_reference(
    input: &Tensor,
    kernel: &Tensor,
    stride: usize,
    padding: usize,
) -> Result<Tensor> {
    input.expect_rank(4, "conv input")?;
    kernel.expect_rank(4, "conv kernel")?;
    if stride == 0 {
        return Err(Error::InvalidInput("stride must be positive".into()));
    }
    let (n, c_in, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let (c_out, kc_in, k_h, k_w) = (
        kernel.shape()[0],
        kernel.shape()[1],
        kernel.shape()[2],
        kernel.shape()[3],
    );
    if kc_in != c_in {
        return Err(Error::ShapeMismatch(format!(
            "kernel expects {kc_in} input channels, input has {c_in}"
        )));
    }
    if h + 2 * padding < k_h || w + 2 * padding < k_w {
        return Err(Error::ShapeMismatch(format!(
            "kernel {k_h}x{k_w} larger than padded input {}x{}",
            h + 2 * padding,
            w + 2 * padding
        )));
    }
    let h_out = (h + 2 * padding - k_h) / stride + 1;
    let w_out = (w + 2 * padding - k_w) / stride + 1;

    let mut out = Tensor::zeros(vec![n, c_out, h_out, w_out]);
    for b in 0..n {
        for oc in 0..c_out {
            for oy in 0..h_out {
                for ox in 0..w_out {
                    let mut acc = 0.0;
                    for ic in 0..c_in {
                        for ky in 0..k_h {
                            for kx in 0..k_w {
                                let iy = (oy * stride + ky) as isize - padding as isize;
                                let ix = (ox * stride + kx) as isize - padding as isize;
                                if iy < 0 || ix < 0 || iy >= h as isize || ix >= w as isize {
                                    continue; // zero padding
                                }
                                acc += input.at4(b, ic, iy as usize, ix as usize)
                                    * kernel.at4(oc, ic, ky, kx);
                            }
                        }
                    }
                    let idx = out.nchw_index(b, oc, oy, ox);
                    out.data_mut()[idx] = acc;
                }
            }
        }
    }
    Ok(out)
}
