//! Frame-level measurement: compose the plane height, boundary trace, pixel
//! scale, perimeter, and depth into one record per instance.

use super::boundary::{boundary_perimeter, trace_boundary, PerimeterMode};
use super::depth::{
    ground_plane_height, pixel_scales, pothole_depth, CameraIntrinsics, DepthFrame, DepthStatistic,
};
use super::mask::InstanceMask;
use crate::{Error, Result};

/// Tunables of [`measure_frame`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureOptions {
    pub statistic: DepthStatistic,
    pub perimeter_mode: PerimeterMode,
}

/// One measured instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PotholeMeasurement {
    /// Metric outline length `L` of the dominant boundary chain.
    pub perimeter_mm: f64,
    /// `d = h_p - h_c`; negative only when `degenerate` is set.
    pub depth_mm: f64,
    pub h_p_mm: f64,
    pub h_c_mm: f64,
    /// Member-pixel count of the mask.
    pub pixel_area: usize,
    /// `(s_x, s_y)` in mm per pixel, evaluated at the ground-plane depth.
    pub scales: (f64, f64),
    /// The region is shallower than the plane (a bump, not a pothole).
    pub degenerate: bool,
    /// Number of 8-connected components in the mask; the longest chain is
    /// the measured outline.
    pub component_count: usize,
}

/// Measure every mask against one frame. The ground plane is computed once,
/// excluding all masks; each mask then contributes one measurement, in input
/// order. Errors carry the index of the offending mask.
pub fn measure_frame(
    frame: &DepthFrame,
    masks: &[InstanceMask],
    intrinsics: &CameraIntrinsics,
    options: &MeasureOptions,
) -> Result<Vec<PotholeMeasurement>> {
    for (i, mask) in masks.iter().enumerate() {
        if !frame.matches_mask(mask) {
            return Err(Error::ShapeMismatch(format!(
                "mask is {}x{}, frame is {}x{}",
                mask.width(),
                mask.height(),
                frame.width(),
                frame.height()
            ))
            .at_mask(i));
        }
    }
    if masks.is_empty() {
        return Ok(Vec::new());
    }

    let h_c = ground_plane_height(frame, masks)?;
    let (s_x, s_y) = pixel_scales(intrinsics, h_c)?;

    let mut out = Vec::with_capacity(masks.len());
    for (i, mask) in masks.iter().enumerate() {
        let chains = trace_boundary(mask);
        let outline = chains
            .iter()
            .max_by_key(|c| c.points.len())
            .ok_or(Error::NoDepth)
            .map_err(|e| e.at_mask(i))?;
        let (depth_mm, h_p_mm) = pothole_depth(frame, mask, h_c, options.statistic)
            .map_err(|e| e.at_mask(i))?;
        out.push(PotholeMeasurement {
            perimeter_mm: boundary_perimeter(outline, s_x, s_y, options.perimeter_mode),
            depth_mm,
            h_p_mm,
            h_c_mm: h_c,
            pixel_area: mask.area(),
            scales: (s_x, s_y),
            degenerate: depth_mm < 0.0,
            component_count: chains.len(),
        });
    }
    Ok(out)
}
