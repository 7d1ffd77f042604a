//! Dynamic snake convolution: a 1-D kernel whose taps follow a chain of
//! cumulative offsets perpendicular to the kernel axis.
//!
//! For a horizontal kernel centered at `(x_p, y_p)`, tap `c` samples
//! `(x_p + c, y_p + sum of per-step offsets)`; a vertical kernel swaps the
//! roles. The per-step offsets are clamped to `[-1, 1]` before accumulation
//! so the chain stays contiguous, and accumulation runs outward from the
//! center independently for each direction. Fractional sampling positions
//! are resolved with [`bilinear_sample_detailed`].
//!
//! Offsets are an explicit input tensor (one value per tap per input pixel),
//! not an internal parameter: this module verifies the operator math, not
//! training.

use super::bilinear::bilinear_sample_detailed;
use crate::{Error, Result, Tensor};

/// Orientation of the kernel's fixed axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvAxis {
    /// Taps march along x; offsets bend the chain in y.
    Horizontal,
    /// Taps march along y; offsets bend the chain in x.
    Vertical,
}

/// A snake-convolution kernel: per-tap weights plus a field of per-step
/// offsets.
#[derive(Debug, Clone)]
pub struct DsConvKernel {
    axis: ConvAxis,
    /// Rank 1, length = kernel extent (odd).
    weights: Tensor,
    /// Rank 3, `[extent, H, W]` where `H x W` is the input spatial shape.
    /// Entry `[c_max + c]` is the per-step offset used when extending the
    /// chain to tap `c`; the center entry is unused.
    offsets: Tensor,
}

impl DsConvKernel {
    pub fn new(axis: ConvAxis, weights: Tensor, offsets: Tensor) -> Result<Self> {
        weights.expect_rank(1, "DSConv weights")?;
        offsets.expect_rank(3, "DSConv offsets")?;
        let extent = weights.shape()[0];
        if extent % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "DSConv kernel extent must be odd so a center tap exists, got {extent}"
            )));
        }
        if offsets.shape()[0] != extent {
            return Err(Error::ShapeMismatch(format!(
                "offsets tap dimension {} != kernel extent {extent}",
                offsets.shape()[0]
            )));
        }
        Ok(Self {
            axis,
            weights,
            offsets,
        })
    }

    pub fn axis(&self) -> ConvAxis {
        self.axis
    }

    pub fn extent(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn weights(&self) -> &Tensor {
        &self.weights
    }

    pub fn offsets(&self) -> &Tensor {
        &self.offsets
    }

    fn check_input(&self, input: &Tensor) -> Result<(usize, usize, usize, usize)> {
        input.expect_rank(4, "DSConv input")?;
        let (n, c, h, w) = (
            input.shape()[0],
            input.shape()[1],
            input.shape()[2],
            input.shape()[3],
        );
        if self.offsets.shape()[1] != h || self.offsets.shape()[2] != w {
            return Err(Error::ShapeMismatch(format!(
                "offsets spatial shape {}x{} != input spatial shape {h}x{w}",
                self.offsets.shape()[1],
                self.offsets.shape()[2]
            )));
        }
        let span = self.extent() - 1;
        let (have, axis) = match self.axis {
            ConvAxis::Horizontal => (w, "width"),
            ConvAxis::Vertical => (h, "height"),
        };
        if have <= span {
            return Err(Error::ShapeMismatch(format!(
                "input {axis} {have} too small for kernel extent {}",
                self.extent()
            )));
        }
        Ok((n, c, h, w))
    }

    /// Offset tensor index for tap entry `j` at center `(x, y)`.
    #[inline]
    fn offset_at(&self, j: usize, y: usize, x: usize) -> f64 {
        let (h, w) = (self.offsets.shape()[1], self.offsets.shape()[2]);
        self.offsets.data()[(j * h + y) * w + x]
    }

    /// Cumulative perpendicular shift for signed tap `c` at center `(x, y)`.
    pub(crate) fn chain_shift(&self, c: isize, y: usize, x: usize) -> f64 {
        let c_max = (self.extent() / 2) as isize;
        let mut shift = 0.0;
        for step in 1..=c.unsigned_abs() {
            let j = (c_max + if c > 0 { step as isize } else { -(step as isize) }) as usize;
            shift += self.offset_at(j, y, x).clamp(-1.0, 1.0);
        }
        shift
    }
}

/// Gradients of the scalar-valued loss with respect to every DSConv input.
#[derive(Debug, Clone)]
pub struct DsConvGradients {
    pub input: Tensor,
    pub weights: Tensor,
    pub offsets: Tensor,
}

/// Forward pass. The output keeps the perpendicular extent and shrinks the
/// kernel axis by `extent - 1` (no padding), so zero offsets reproduce the
/// axial reference convolution exactly.
pub fn dsconv_forward(input: &Tensor, kernel: &DsConvKernel) -> Result<Tensor> {
    let (n, c, h, w) = kernel.check_input(input)?;
    let extent = kernel.extent();
    let c_max = (extent / 2) as isize;
    let (h_out, w_out) = match kernel.axis {
        ConvAxis::Horizontal => (h, w - (extent - 1)),
        ConvAxis::Vertical => (h - (extent - 1), w),
    };

    let plane = h * w;
    let mut out = Tensor::zeros(vec![n, c, h_out, w_out]);
    for b in 0..n {
        for ch in 0..c {
            let start = (b * c + ch) * plane;
            let map = Tensor::from_parts(vec![h, w], input.data()[start..start + plane].to_vec());
            for oy in 0..h_out {
                for ox in 0..w_out {
                    let (x_p, y_p) = match kernel.axis {
                        ConvAxis::Horizontal => (ox + c_max as usize, oy),
                        ConvAxis::Vertical => (ox, oy + c_max as usize),
                    };
                    let mut acc = 0.0;
                    for tap in -c_max..=c_max {
                        let shift = kernel.chain_shift(tap, y_p, x_p);
                        let (sx, sy) = match kernel.axis {
                            ConvAxis::Horizontal => (x_p as f64 + tap as f64, y_p as f64 + shift),
                            ConvAxis::Vertical => (x_p as f64 + shift, y_p as f64 + tap as f64),
                        };
                        let weight = kernel.weights.data()[(tap + c_max) as usize];
                        acc += weight * bilinear_sample_detailed(&map, sx, sy).value;
                    }
                    let idx = out.nchw_index(b, ch, oy, ox);
                    out.data_mut()[idx] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Backward pass: gradients with respect to the input map, the tap weights,
/// and the offset field, given the upstream gradient of the output.
pub fn dsconv_backward(
    input: &Tensor,
    kernel: &DsConvKernel,
    upstream: &Tensor,
) -> Result<DsConvGradients> {
    let (n, c, h, w) = kernel.check_input(input)?;
    let extent = kernel.extent();
    let c_max = (extent / 2) as isize;
    let (h_out, w_out) = match kernel.axis {
        ConvAxis::Horizontal => (h, w - (extent - 1)),
        ConvAxis::Vertical => (h - (extent - 1), w),
    };
    if upstream.shape() != [n, c, h_out, w_out] {
        return Err(Error::ShapeMismatch(format!(
            "upstream shape {:?} != output shape {:?}",
            upstream.shape(),
            [n, c, h_out, w_out]
        )));
    }

    let plane = h * w;
    let mut d_input = vec![0.0; input.len()];
    let mut d_weights = vec![0.0; extent];
    let mut d_offsets = vec![0.0; kernel.offsets.len()];

    for b in 0..n {
        for ch in 0..c {
            let start = (b * c + ch) * plane;
            let map = Tensor::from_parts(vec![h, w], input.data()[start..start + plane].to_vec());
            for oy in 0..h_out {
                for ox in 0..w_out {
                    let g = upstream.at4(b, ch, oy, ox);
                    if g == 0.0 {
                        continue;
                    }
                    let (x_p, y_p) = match kernel.axis {
                        ConvAxis::Horizontal => (ox + c_max as usize, oy),
                        ConvAxis::Vertical => (ox, oy + c_max as usize),
                    };
                    for tap in -c_max..=c_max {
                        let shift = kernel.chain_shift(tap, y_p, x_p);
                        let (sx, sy) = match kernel.axis {
                            ConvAxis::Horizontal => (x_p as f64 + tap as f64, y_p as f64 + shift),
                            ConvAxis::Vertical => (x_p as f64 + shift, y_p as f64 + tap as f64),
                        };
                        let j = (tap + c_max) as usize;
                        let weight = kernel.weights.data()[j];
                        let sample = bilinear_sample_detailed(&map, sx, sy);

                        d_weights[j] += g * sample.value;
                        for (row, col, tw) in sample.taps {
                            d_input[start + row * w + col] += g * weight * tw;
                        }

                        // Chain rule through the cumulative sum: the shift is the
                        // sum of the clamped per-step offsets between the center
                        // and this tap, so each contributing step receives the
                        // full coordinate gradient (clamp derivative is 1 inside
                        // [-1, 1] and 0 outside).
                        let d_coord = match kernel.axis {
                            ConvAxis::Horizontal => g * weight * sample.dy,
                            ConvAxis::Vertical => g * weight * sample.dx,
                        };
                        if d_coord != 0.0 {
                            for step in 1..=tap.unsigned_abs() {
                                let jj = (c_max
                                    + if tap > 0 {
                                        step as isize
                                    } else {
                                        -(step as isize)
                                    }) as usize;
                                let raw = kernel.offset_at(jj, y_p, x_p);
                                if raw.abs() < 1.0 {
                                    d_offsets[(jj * h + y_p) * w + x_p] += d_coord;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(DsConvGradients {
        input: Tensor::from_parts(input.shape().to_vec(), d_input),
        weights: Tensor::from_parts(vec![extent], d_weights),
        offsets: Tensor::from_parts(kernel.offsets.shape().to_vec(), d_offsets),
    })
}
