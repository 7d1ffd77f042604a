//! Depth frames, camera intrinsics, and the height statistics of the
//! measurement pipeline.

use super::mask::InstanceMask;
use crate::{Error, Result};

/// Per-pixel depth in millimeters with a validity mask. Invalid pixels are
/// sensor no-returns and are excluded from every statistic rather than
/// inpainted.
#[derive(Debug, Clone)]
pub struct DepthFrame {
    width: usize,
    height: usize,
    depth_mm: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthFrame {
    pub fn new(width: usize, height: usize, depth_mm: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        let n = width * height;
        if depth_mm.len() != n || valid.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "depth/valid lengths {}/{} != {width}x{height}",
                depth_mm.len(),
                valid.len()
            )));
        }
        for (i, (&d, &v)) in depth_mm.iter().zip(&valid).enumerate() {
            if v && !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "valid depth at pixel {i} must be finite and >= 0, got {d}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            depth_mm,
            valid,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn depth_at(&self, x: usize, y: usize) -> f64 {
        self.depth_mm[y * self.width + x]
    }

    #[inline]
    pub fn valid_at(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    pub fn depths(&self) -> &[f64] {
        &self.depth_mm
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn matches_mask(&self, mask: &InstanceMask) -> bool {
        self.width == mask.width() && self.height == mask.height()
    }
}

/// Pinhole camera intrinsics (focal lengths and principal point in pixels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::InvalidInput(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }
}

/// Which statistic of the valid in-mask depths defines the pothole height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthStatistic {
    /// Deepest valid reading; fragile under sensor speckle.
    Max,
    /// Sample percentile `q` in `[0, 100]`, linear interpolation between
    /// order statistics.
    Percentile(f64),
}

impl Default for DepthStatistic {
    /// 95th percentile: near-max but insensitive to isolated speckle.
    fn default() -> Self {
        DepthStatistic::Percentile(95.0)
    }
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn percentile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = q / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Ground-plane height `h_c`: the median of the valid depth values at
/// pixels not covered by any exclusion mask.
pub fn ground_plane_height(frame: &DepthFrame, exclusions: &[InstanceMask]) -> Result<f64> {
    for (i, mask) in exclusions.iter().enumerate() {
        if !frame.matches_mask(mask) {
            return Err(Error::ShapeMismatch(format!(
                "exclusion mask {i} is {}x{}, frame is {}x{}",
                mask.width(),
                mask.height(),
                frame.width(),
                frame.height()
            )));
        }
    }
    let mut samples = Vec::new();
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            if !frame.valid_at(x, y) {
                continue;
            }
            if exclusions.iter().any(|m| m.get(x, y)) {
                continue;
            }
            samples.push(frame.depth_at(x, y));
        }
    }
    if samples.is_empty() {
        return Err(Error::NoGroundPlane);
    }
    samples.sort_unstable_by(f64::total_cmp);
    Ok(median_of_sorted(&samples))
}

/// Pothole depth `d = h_p - h_c`, where `h_p` is the chosen statistic of the
/// valid depths inside the mask. Returns `(d, h_p)`.
pub fn pothole_depth(
    frame: &DepthFrame,
    mask: &InstanceMask,
    h_c: f64,
    statistic: DepthStatistic,
) -> Result<(f64, f64)> {
    if !frame.matches_mask(mask) {
        return Err(Error::ShapeMismatch(format!(
            "mask is {}x{}, frame is {}x{}",
            mask.width(),
            mask.height(),
            frame.width(),
            frame.height()
        )));
    }
    if let DepthStatistic::Percentile(q) = statistic {
        if !(0.0..=100.0).contains(&q) {
            return Err(Error::Config(format!(
                "percentile must lie in [0, 100], got {q}"
            )));
        }
    }
    let mut samples = Vec::new();
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            if mask.get(x, y) && frame.valid_at(x, y) {
                samples.push(frame.depth_at(x, y));
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::NoDepth);
    }
    samples.sort_unstable_by(f64::total_cmp);
    let h_p = match statistic {
        DepthStatistic::Max => *samples.last().unwrap(),
        DepthStatistic::Percentile(q) => percentile_of_sorted(&samples, q),
    };
    Ok((h_p - h_c, h_p))
}

/// Physical length of one pixel at `reference_depth_mm` under the pinhole
/// model: `s_x = depth / fx`, `s_y = depth / fy`, in mm per pixel.
pub fn pixel_scales(intrinsics: &CameraIntrinsics, reference_depth_mm: f64) -> Result<(f64, f64)> {
    if !(reference_depth_mm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reference depth must be positive, got {reference_depth_mm}"
        )));
    }
    Ok((
        reference_depth_mm / intrinsics.fx,
        reference_depth_mm / intrinsics.fy,
    ))
}
