//! Mask IoU and greedy confidence-ordered instance matching.

use crate::geometry::InstanceMask;
use crate::{Error, Result};

/// A predicted mask with its confidence score.
#[derive(Debug, Clone)]
pub struct ScoredDetection {
    pub mask: InstanceMask,
    pub confidence: f64,
}

impl ScoredDetection {
    pub fn new(mask: InstanceMask, confidence: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidInput(format!(
                "confidence must lie in [0, 1], got {confidence}"
            )));
        }
        Ok(Self { mask, confidence })
    }
}

/// Detection-level confusion counts. Instance detection has no countable
/// true negatives, so `tn` is fixed at 0 and kept only so the confusion
/// table can be displayed in full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, fp, fn_, tn: 0 }
    }

    /// Merge counts from independent images.
    pub fn merge(self, other: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
            tn: 0,
        }
    }
}

/// Outcome of matching one image's detections against its ground truths.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub counts: ConfusionCounts,
    /// Matched ground-truth index per detection, in input order.
    pub assignments: Vec<Option<usize>>,
}

impl MatchResult {
    /// TP flag per detection, in input order.
    pub fn tp_flags(&self) -> Vec<bool> {
        self.assignments.iter().map(|a| a.is_some()).collect()
    }
}

/// Intersection-over-union of two masks; 0 when both are empty.
pub fn mask_iou(a: &InstanceMask, b: &InstanceMask) -> Result<f64> {
    if !a.same_size(b) {
        return Err(Error::ShapeMismatch(format!(
            "IoU masks are {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&pa, &pb) in a.pixels().iter().zip(b.pixels()) {
        inter += (pa && pb) as usize;
        union += (pa || pb) as usize;
    }
    if union == 0 {
        Ok(0.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Greedy matching in descending confidence order: each detection takes the
/// highest-IoU still-unmatched ground truth if that IoU reaches the
/// threshold, otherwise it is a false positive. Every unmatched ground
/// truth is a false negative.
pub fn match_instances(
    preds: &[ScoredDetection],
    gts: &[InstanceMask],
    iou_threshold: f64,
) -> Result<MatchResult> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(Error::Config(format!(
            "IoU threshold must lie in (0, 1], got {iou_threshold}"
        )));
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| {
        preds[b]
            .confidence
            .partial_cmp(&preds[a].confidence)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b)) // stable on ties
    });

    let mut gt_taken = vec![false; gts.len()];
    let mut assignments = vec![None; preds.len()];
    for &pi in &order {
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in gts.iter().enumerate() {
            if gt_taken[gi] {
                continue;
            }
            let iou = mask_iou(&preds[pi].mask, gt)?;
            if iou >= iou_threshold && best.map_or(true, |(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        if let Some((gi, _)) = best {
            gt_taken[gi] = true;
            assignments[pi] = Some(gi);
        }
    }
    let tp = assignments.iter().filter(|a| a.is_some()).count();
    Ok(MatchResult {
        counts: ConfusionCounts::new(tp, preds.len() - tp, gts.len() - tp),
        assignments,
    })
}
