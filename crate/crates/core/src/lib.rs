//! RGB-D pothole measurement and model building blocks.
//!
//! The crate has three layers:
//!
//! 1. **Neural operators** ([`neural`]) — GELU, SimAM attention, dynamic
//!    snake convolution (axis-aligned deformable taps with cumulative
//!    offsets), a reference 2-D convolution, bilinear sampling, FLOPs
//!    accounting, and a finite-difference gradient checker that verifies
//!    every backward contract.
//! 2. **Measurement geometry** ([`geometry`]) — converts a depth frame plus
//!    instance masks into physical measurements: ground-plane height from
//!    the median of non-pothole depths, pothole depth as a robust statistic
//!    of in-mask depths minus the plane, Moore-neighbor boundary tracing,
//!    and metric perimeter under the pinhole scale.
//! 3. **Data plumbing** — [`dataset`] loads/writes YOLO-style polygon
//!    labels, 16-bit depth PNGs, intrinsics and manifests; [`eval`] scores
//!    predicted masks (IoU matching, precision/recall, AP@50) and builds
//!    measurement-error reports; [`synth`] renders synthetic scenes with
//!    analytically known geometry for end-to-end accuracy checks.
//!
//! All numeric work is in `f64`. Every operation is a pure function of its
//! inputs and safe to call concurrently.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod neural;
pub mod synth;
pub mod tensor;

pub use error::Error;
pub use tensor::Tensor;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
