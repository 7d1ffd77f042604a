//! Precision, recall, and average precision at IoU 0.5.

use super::matching::{match_instances, ConfusionCounts, ScoredDetection};
use crate::geometry::InstanceMask;
use crate::Result;

/// Precision/recall with explicit 0/0 handling: an undefined ratio is
/// reported as 0 and flagged degenerate instead of panicking or yielding
/// NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub precision_degenerate: bool,
    pub recall_degenerate: bool,
}

/// `precision = tp / (tp + fp)`, `recall = tp / (tp + fn)`.
pub fn precision_recall(counts: &ConfusionCounts) -> PrecisionRecall {
    let p_den = counts.tp + counts.fp;
    let r_den = counts.tp + counts.fn_;
    PrecisionRecall {
        precision: if p_den == 0 {
            0.0
        } else {
            counts.tp as f64 / p_den as f64
        },
        recall: if r_den == 0 {
            0.0
        } else {
            counts.tp as f64 / r_den as f64
        },
        precision_degenerate: p_den == 0,
        recall_degenerate: r_den == 0,
    }
}

/// One point of the precision/recall sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    pub confidence: f64,
}

/// PR points ordered by descending confidence threshold; recall is
/// non-decreasing along the sweep.
#[derive(Debug, Clone, Default)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

/// Detections and ground truths of one image.
#[derive(Debug, Clone)]
pub struct EvalSample {
    pub detections: Vec<ScoredDetection>,
    pub ground_truths: Vec<InstanceMask>,
}

/// Average precision across a set of images.
///
/// Matching runs per image (greedy, confidence-ordered, IoU >= threshold);
/// the pooled detections are then swept in descending confidence,
/// accumulating PR points, and integrated with the 101-point interpolation
/// of the monotone precision envelope. With no ground truth anywhere the AP
/// is 0 by convention.
pub fn average_precision(samples: &[EvalSample], iou_threshold: f64) -> Result<(f64, PrCurve)> {
    let mut flagged: Vec<(f64, bool)> = Vec::new(); // (confidence, is_tp)
    let mut total_gt = 0usize;
    for sample in samples {
        total_gt += sample.ground_truths.len();
        let result = match_instances(&sample.detections, &sample.ground_truths, iou_threshold)?;
        for (det, tp) in sample.detections.iter().zip(result.tp_flags()) {
            flagged.push((det.confidence, tp));
        }
    }
    flagged.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut curve = PrCurve::default();
    let (mut tp, mut fp) = (0usize, 0usize);
    for (confidence, is_tp) in flagged {
        if is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        curve.points.push(PrPoint {
            recall: if total_gt == 0 {
                0.0
            } else {
                tp as f64 / total_gt as f64
            },
            precision: tp as f64 / (tp + fp) as f64,
            confidence,
        });
    }
    if total_gt == 0 {
        return Ok((0.0, curve));
    }

    // Monotone envelope: for each point, the max precision at equal or
    // higher recall.
    let mut envelope: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.recall, p.precision))
        .collect();
    let mut running = 0.0f64;
    for entry in envelope.iter_mut().rev() {
        running = running.max(entry.1);
        entry.1 = running;
    }

    // 101-point interpolation over recall levels 0.00, 0.01, ..., 1.00.
    let precision_at = |r: f64| -> f64 {
        let idx = envelope.partition_point(|&(recall, _)| recall < r);
        envelope.get(idx).map_or(0.0, |&(_, p)| p)
    };
    let ap = (0..=100).map(|i| precision_at(i as f64 / 100.0)).sum::<f64>() / 101.0;
    Ok((ap, curve))
}

/// Single-image AP at the mAP@50 threshold. With one class, mAP@50 equals
/// this AP.
pub fn average_precision_50(
    preds: &[ScoredDetection],
    gts: &[InstanceMask],
) -> Result<(f64, PrCurve)> {
    average_precision(
        &[EvalSample {
            detections: preds.to_vec(),
            ground_truths: gts.to_vec(),
        }],
        0.5,
    )
}
