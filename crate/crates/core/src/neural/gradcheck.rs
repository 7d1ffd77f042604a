//! Finite-difference verification of the backward contracts.
//!
//! Every differentiable input of a block is perturbed by `+-epsilon`; the
//! central-difference gradient of the scalar loss `sum(outputs)` is compared
//! against the analytic backward pass. The reported figure is the maximum
//! elementwise relative error, falling back to absolute error when both
//! sides are below 1e-8 in magnitude.
//!
//! Random instances keep sampling coordinates at least 1e-3 away from
//! integers: bilinear interpolation is only piecewise differentiable in its
//! coordinates, so checks must stay clear of the grid lines.

use rand::Rng;

use super::bilinear::bilinear_sample_detailed;
use super::dsconv::{dsconv_backward, dsconv_forward, ConvAxis, DsConvKernel};
use super::gelu::{gelu_backward, gelu_forward};
use super::simam::{simam_attend, simam_backward, SimAmConfig};
use crate::{Error, Result, Tensor};

/// Blocks exposed to the checker. `Conv2dReference` carries no backward
/// contract and is rejected with an unsupported-operation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Gelu,
    Simam,
    Bilinear,
    DsConv,
    Conv2dReference,
}

impl Block {
    /// The blocks that have a backward contract.
    pub const CHECKABLE: [Block; 4] = [Block::Gelu, Block::Simam, Block::Bilinear, Block::DsConv];

    pub fn name(self) -> &'static str {
        match self {
            Block::Gelu => "gelu",
            Block::Simam => "simam",
            Block::Bilinear => "bilinear",
            Block::DsConv => "dsconv",
            Block::Conv2dReference => "conv2d_reference",
        }
    }
}

/// A concrete input instance for one block.
#[derive(Debug, Clone)]
pub enum InputBundle {
    Gelu {
        x: Tensor,
    },
    Simam {
        features: Tensor,
        config: SimAmConfig,
    },
    Bilinear {
        map: Tensor,
        x: f64,
        y: f64,
    },
    DsConv {
        input: Tensor,
        kernel: DsConvKernel,
    },
}

/// Analytic and numeric gradients of the scalar loss, packed in the same
/// parameter order.
#[derive(Debug, Clone)]
pub struct GradCheckDetail {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

impl GradCheckDetail {
    pub fn max_relative_error(&self) -> f64 {
        max_relative_error(&self.analytic, &self.numeric)
    }
}

/// Elementwise relative error with absolute fallback below 1e-8 magnitude.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| {
            let diff = (a - n).abs();
            let denom = a.abs().max(n.abs());
            if denom < 1e-8 {
                diff
            } else {
                diff / denom
            }
        })
        .fold(0.0, f64::max)
}

/// Central-difference gradient of an arbitrary scalar function.
pub fn finite_diff_gradient(
    loss: impl Fn(&[f64]) -> f64,
    params: &[f64],
    epsilon: f64,
) -> Vec<f64> {
    let mut work = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for i in 0..params.len() {
        let saved = work[i];
        work[i] = saved + epsilon;
        let plus = loss(&work);
        work[i] = saved - epsilon;
        let minus = loss(&work);
        work[i] = saved;
        grad[i] = (plus - minus) / (2.0 * epsilon);
    }
    grad
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(Error::Config(format!(
            "gradcheck epsilon must lie in (0, 1e-3], got {epsilon}"
        )));
    }
    Ok(())
}

fn pack(bundle: &InputBundle) -> Vec<f64> {
    match bundle {
        InputBundle::Gelu { x } => x.data().to_vec(),
        InputBundle::Simam { features, .. } => features.data().to_vec(),
        InputBundle::Bilinear { map, x, y } => {
            let mut p = map.data().to_vec();
            p.push(*x);
            p.push(*y);
            p
        }
        InputBundle::DsConv { input, kernel } => {
            let mut p = input.data().to_vec();
            p.extend_from_slice(kernel.weights().data());
            p.extend_from_slice(kernel.offsets().data());
            p
        }
    }
}

fn loss_at(bundle: &InputBundle, params: &[f64]) -> Result<f64> {
    Ok(match bundle {
        InputBundle::Gelu { x } => {
            let t = Tensor::new(x.shape().to_vec(), params.to_vec())?;
            gelu_forward(&t).data().iter().sum()
        }
        InputBundle::Simam { features, config } => {
            let t = Tensor::new(features.shape().to_vec(), params.to_vec())?;
            simam_attend(&t, config)?.data().iter().sum()
        }
        InputBundle::Bilinear { map, .. } => {
            let n = map.len();
            let m = Tensor::new(map.shape().to_vec(), params[..n].to_vec())?;
            bilinear_sample_detailed(&m, params[n], params[n + 1]).value
        }
        InputBundle::DsConv { input, kernel } => {
            let ni = input.len();
            let nw = kernel.weights().len();
            let t = Tensor::new(input.shape().to_vec(), params[..ni].to_vec())?;
            let k = DsConvKernel::new(
                kernel.axis(),
                Tensor::new(vec![nw], params[ni..ni + nw].to_vec())?,
                Tensor::new(kernel.offsets().shape().to_vec(), params[ni + nw..].to_vec())?,
            )?;
            dsconv_forward(&t, &k)?.data().iter().sum()
        }
    })
}

fn analytic_gradient(bundle: &InputBundle) -> Result<Vec<f64>> {
    Ok(match bundle {
        InputBundle::Gelu { x } => {
            let ones = Tensor::from_parts(x.shape().to_vec(), vec![1.0; x.len()]);
            gelu_backward(x, &ones)?.data().to_vec()
        }
        InputBundle::Simam { features, config } => {
            let ones = Tensor::from_parts(features.shape().to_vec(), vec![1.0; features.len()]);
            simam_backward(features, config, &ones)?.data().to_vec()
        }
        InputBundle::Bilinear { map, x, y } => {
            let s = bilinear_sample_detailed(map, *x, *y);
            let mut g = vec![0.0; map.len()];
            let w = map.shape()[1];
            for (row, col, weight) in s.taps {
                g[row * w + col] += weight;
            }
            g.push(s.dx);
            g.push(s.dy);
            g
        }
        InputBundle::DsConv { input, kernel } => {
            let out = dsconv_forward(input, kernel)?;
            let ones = Tensor::from_parts(out.shape().to_vec(), vec![1.0; out.len()]);
            let grads = dsconv_backward(input, kernel, &ones)?;
            let mut g = grads.input.data().to_vec();
            g.extend_from_slice(grads.weights.data());
            g.extend_from_slice(grads.offsets.data());
            g
        }
    })
}

/// Both gradient vectors for a bundle, for callers that want to inspect or
/// post-process them (the CLI's harness-sensitivity fixture does).
pub fn gradcheck_detailed(bundle: &InputBundle, epsilon: f64) -> Result<GradCheckDetail> {
    check_epsilon(epsilon)?;
    let params = pack(bundle);
    let numeric = finite_diff_gradient(
        |p| loss_at(bundle, p).expect("loss evaluation failed during finite differencing"),
        &params,
        epsilon,
    );
    let analytic = analytic_gradient(bundle)?;
    Ok(GradCheckDetail { analytic, numeric })
}

/// Maximum relative error between the analytic backward pass and central
/// finite differences over every differentiable input of the block.
pub fn finite_diff_gradcheck(bundle: &InputBundle, epsilon: f64) -> Result<f64> {
    Ok(gradcheck_detailed(bundle, epsilon)?.max_relative_error())
}

fn near_integer(v: f64, tol: f64) -> bool {
    (v - v.round()).abs() < tol
}

fn coord_clear_of_grid(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.gen_range(lo..hi);
        if !near_integer(v, 1e-3) {
            return v;
        }
    }
}

/// A randomized non-degenerate instance of `block`, suitable for gradient
/// checking. Returns an unsupported-operation error for blocks without a
/// backward contract.
pub fn random_bundle(block: Block, rng: &mut impl Rng) -> Result<InputBundle> {
    match block {
        Block::Gelu => Ok(InputBundle::Gelu {
            x: Tensor::from_fn(vec![100], |_| rng.gen_range(-3.0..3.0))?,
        }),
        Block::Simam => Ok(InputBundle::Simam {
            features: Tensor::from_fn(vec![1, 2, 4, 4], |_| rng.gen_range(-2.0..2.0))?,
            config: SimAmConfig::new(1e-4)?,
        }),
        Block::Bilinear => {
            let (h, w) = (6, 7);
            let map = Tensor::from_fn(vec![h, w], |_| rng.gen_range(-2.0..2.0))?;
            Ok(InputBundle::Bilinear {
                map,
                x: coord_clear_of_grid(rng, 0.1, (w - 1) as f64 - 0.1),
                y: coord_clear_of_grid(rng, 0.1, (h - 1) as f64 - 0.1),
            })
        }
        Block::DsConv => {
            let (h, w) = (8, 10);
            let extent = 5usize;
            let c_max = extent / 2;
            let axis = if rng.gen_bool(0.5) {
                ConvAxis::Horizontal
            } else {
                ConvAxis::Vertical
            };
            let input = Tensor::from_fn(vec![1, 1, h, w], |_| rng.gen_range(-2.0..2.0))?;
            let weights = Tensor::from_fn(vec![extent], |_| rng.gen_range(-1.0..1.0))?;
            // Resample until every tap's perpendicular coordinate stays clear
            // of the bilinear grid lines.
            'draw: for _ in 0..1000 {
                let offsets = Tensor::from_fn(vec![extent, h, w], |_| rng.gen_range(-0.85..0.85))?;
                let kernel = DsConvKernel::new(axis, weights.clone(), offsets)?;
                let (y_range, x_range) = match axis {
                    ConvAxis::Horizontal => (0..h, c_max..w - c_max),
                    ConvAxis::Vertical => (c_max..h - c_max, 0..w),
                };
                for y_p in y_range {
                    for x_p in x_range.clone() {
                        for tap in 1..=c_max as isize {
                            for signed in [tap, -tap] {
                                let shift = kernel.chain_shift(signed, y_p, x_p);
                                let coord = match axis {
                                    ConvAxis::Horizontal => y_p as f64 + shift,
                                    ConvAxis::Vertical => x_p as f64 + shift,
                                };
                                if near_integer(coord, 1e-3) {
                                    continue 'draw;
                                }
                            }
                        }
                    }
                }
                return Ok(InputBundle::DsConv { input, kernel });
            }
            Err(Error::InvalidInput(
                "failed to draw a non-degenerate DSConv offset field".into(),
            ))
        }
        Block::Conv2dReference => Err(Error::Unsupported(
            "conv2d_reference (no backward contract)".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_function_is_exact_regardless_of_epsilon() {
        // Central differences have no truncation error on affine maps; only
        // rounding noise of order eps_machine / epsilon remains, so any
        // epsilon that keeps that noise below 1e-10 must pass.
        let params = [0.25, -0.5, 0.125];
        for eps in [1e-3, 1e-4, 1e-5] {
            let numeric =
                finite_diff_gradient(|p| 3.0 * p.iter().sum::<f64>(), &params, eps);
            let analytic = [3.0, 3.0, 3.0];
            assert!(max_relative_error(&analytic, &numeric) <= 1e-10);
        }
    }

    #[test]
    fn all_blocks_pass_at_default_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for block in Block::CHECKABLE {
            for trial in 0..5 {
                let bundle = random_bundle(block, &mut rng).unwrap();
                let err = finite_diff_gradcheck(&bundle, 1e-6).unwrap();
                assert!(
                    err <= 1e-5,
                    "{} trial {trial}: max relative error {err}",
                    block.name()
                );
            }
        }
    }

    #[test]
    fn detects_a_corrupted_backward() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bundle = random_bundle(Block::Gelu, &mut rng).unwrap();
        let mut detail = gradcheck_detailed(&bundle, 1e-6).unwrap();
        detail.analytic[0] *= 1.5;
        assert!(detail.max_relative_error() > 1e-3);
    }

    #[test]
    fn epsilon_range_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bundle = random_bundle(Block::Gelu, &mut rng).unwrap();
        assert!(finite_diff_gradcheck(&bundle, 0.0).is_err());
        assert!(finite_diff_gradcheck(&bundle, 2e-3).is_err());
    }

    #[test]
    fn reference_conv_has_no_backward_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = random_bundle(Block::Conv2dReference, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
