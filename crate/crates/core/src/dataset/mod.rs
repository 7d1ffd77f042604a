//! Dataset plumbing: YOLO-style segmentation labels, 16-bit depth PNGs,
//! camera-intrinsics files, and line-oriented manifests.
//!
//! On-disk formats:
//!
//! * label file — one polygon per line: `<class_id> u1 v1 u2 v2 ...`,
//!   normalized floats in `[0, 1]`; prediction files append one trailing
//!   confidence value per line;
//! * depth file — 16-bit single-channel PNG, raw count times the configured
//!   unit gives millimeters, count 0 means no sensor return;
//! * intrinsics — `key=value` lines: fx, fy, cx, cy, width, height,
//!   depth_unit;
//! * manifest — header `intrinsics=<path>`, then `<rgb> <depth> <labels>`
//!   per record, paths relative to the manifest.

mod files;
mod label;
mod manifest;
mod raster;

pub use files::{
    load_depth_frame, load_intrinsics, save_depth_png, save_intrinsics, IntrinsicsFile,
};
pub use label::{
    format_polygon_line, load_polygon_labels, load_scored_polygons, parse_scored_polygon_line,
    parse_yolo_polygon_line, PolygonLabel, ScoredPolygon,
};
pub use manifest::{load_manifest, DatasetRecord, Manifest, RecordEntry};
pub use raster::rasterize_polygon;
