//! Physical pothole measurement from a depth frame and instance masks.
//!
//! The pipeline: take the median of valid depths outside every mask as the
//! ground-plane height, apply a robust statistic to the valid in-mask depths
//! to get the pothole height, difference the two for the depth, trace the
//! mask boundary with Moore-neighbor tracing, and sum the boundary segment
//! lengths under the pinhole pixel scale for the metric perimeter.

mod boundary;
mod depth;
mod mask;
mod measure;

pub use boundary::{boundary_perimeter, trace_boundary, BoundaryChain, PerimeterMode};
pub use depth::{
    ground_plane_height, pixel_scales, pothole_depth, CameraIntrinsics, DepthFrame, DepthStatistic,
};
pub use mask::InstanceMask;
pub use measure::{measure_frame, MeasureOptions, PotholeMeasurement};
