//! Segmentation evaluation: IoU matching, precision/recall, average
//! precision at IoU 0.5, and measurement-error reporting.

mod matching;
mod pr;
mod report;

pub use matching::{mask_iou, match_instances, ConfusionCounts, MatchResult, ScoredDetection};
pub use pr::{average_precision, average_precision_50, precision_recall, EvalSample, PrPoint, PrecisionRecall, PrCurve};
pub use report::{measurement_report, MeasurementErrorRow, MeasurementPair, MeasurementReport};
