//! Detection evaluation: IoU, greedy matching, precision–recall curves,
//! per-category AP50 and mAP50.
//!
//! Matching follows the usual convention: detections are processed in
//! descending score order and each one greedily claims the unmatched ground
//! truth with the highest IoU, provided that IoU meets the threshold. AP is
//! the area under the interpolated precision envelope; all-point
//! interpolation is the default, the eleven-point variant is available for
//! comparison.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::annotations::{BoundingBox, DatasetManifest, GroundTruthInstance};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("detection score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("iou threshold {0} outside (0, 1]")]
    BadIouThreshold(f64),
    #[error("match_detections inputs span multiple images or categories")]
    MixedMatchInput,
    #[error("pr curve invariant violated: {0}")]
    BadCurve(&'static str),
    #[error("predictions reference unknown image ids: {0}")]
    UnknownImages(String),
    #[error("predictions reference unknown categories: {0}")]
    UnknownCategories(String),
}

/// A predicted bounding box with confidence score.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub image_id: String,
    pub category: String,
    pub bbox: BoundingBox,
    pub score: f64,
}

/// Intersection over union of two boxes; 0 when disjoint.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let ih = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

/// Outcome of matching one detection against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchFlag {
    TruePositive,
    FalsePositive,
}

/// Greedily match detections of one (image, category) group to ground truth.
///
/// Detections are taken in descending score order, ties broken by input
/// order. Each detection claims the unmatched ground truth with the highest
/// IoU when that IoU is at least `iou_threshold` (ties on IoU keep the first
/// ground truth in instance order); every ground truth is matched at most
/// once. Returns the detections in processing order with their flags.
pub fn match_detections(
    detections: &[Detection],
    truths: &[GroundTruthInstance],
    iou_threshold: f64,
) -> Result<Vec<(Detection, MatchFlag)>, MetricsError> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(MetricsError::BadIouThreshold(iou_threshold));
    }
    if let Some(first) = detections.first() {
        let same_group = detections
            .iter()
            .all(|d| d.image_id == first.image_id && d.category == first.category)
            && truths.iter().all(|t| t.category == first.category);
        if !same_group {
            return Err(MetricsError::MixedMatchInput);
        }
    }
    for det in detections {
        if !(0.0..=1.0).contains(&det.score) || det.score.is_nan() {
            return Err(MetricsError::ScoreOutOfRange(det.score));
        }
    }

    let mut order: Vec<usize> = (0..detections.len()).collect();
    // Stable sort keeps input order for equal scores.
    order.sort_by(|&a, &b| detections[b].score.total_cmp(&detections[a].score));

    let mut gt_taken = alloc::vec![false; truths.len()];
    let mut out = Vec::with_capacity(detections.len());
    for &det_idx in &order {
        let det = &detections[det_idx];
        let mut best: Option<(usize, f64)> = None;
        for (gt_idx, truth) in truths.iter().enumerate() {
            if gt_taken[gt_idx] {
                continue;
            }
            let overlap = iou(&det.bbox, &truth.bbox);
            // Strict `>` keeps the first ground truth on IoU ties.
            if best.map_or(true, |(_, b)| overlap > b) {
                best = Some((gt_idx, overlap));
            }
        }
        let flag = match best {
            Some((gt_idx, overlap)) if overlap >= iou_threshold => {
                gt_taken[gt_idx] = true;
                MatchFlag::TruePositive
            }
            _ => MatchFlag::FalsePositive,
        };
        out.push((det.clone(), flag));
    }
    Ok(out)
}

/// One cumulative precision–recall point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
}

/// A precision–recall curve: one point per detection, recall non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    points: Vec<PrPoint>,
    n_ground_truth: usize,
}

impl PrCurve {
    /// Build a curve from explicit points, checking the invariants.
    pub fn from_points(points: Vec<PrPoint>, n_ground_truth: usize) -> Result<Self, MetricsError> {
        let mut prev = 0.0f64;
        for p in &points {
            if !(0.0..=1.0).contains(&p.recall) || !(0.0..=1.0).contains(&p.precision) {
                return Err(MetricsError::BadCurve("values must lie in [0, 1]"));
            }
            if p.recall < prev {
                return Err(MetricsError::BadCurve("recall must be non-decreasing"));
            }
            prev = p.recall;
        }
        Ok(Self {
            points,
            n_ground_truth,
        })
    }

    pub fn points(&self) -> &[PrPoint] {
        &self.points
    }

    pub fn n_ground_truth(&self) -> usize {
        self.n_ground_truth
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Cumulative PR curve from score-ordered TP/FP flags.
///
/// `flags` must already be ordered by descending score across all images of
/// one category. `n_ground_truth == 0` yields an empty curve.
pub fn pr_curve(flags: &[MatchFlag], n_ground_truth: usize) -> PrCurve {
    if n_ground_truth == 0 {
        return PrCurve {
            points: Vec::new(),
            n_ground_truth: 0,
        };
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let points = flags
        .iter()
        .map(|flag| {
            match flag {
                MatchFlag::TruePositive => tp += 1,
                MatchFlag::FalsePositive => fp += 1,
            }
            PrPoint {
                recall: tp as f64 / n_ground_truth as f64,
                precision: tp as f64 / (tp + fp) as f64,
            }
        })
        .collect();
    PrCurve {
        points,
        n_ground_truth,
    }
}

/// AP interpolation variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Area under the full precision envelope (modern convention).
    #[default]
    AllPoint,
    /// Mean envelope precision at recalls 0.0, 0.1, …, 1.0.
    ElevenPoint,
}

/// Average precision: area under the precision envelope
/// `p(r) = max{precision_i : recall_i >= r}` over recall.
///
/// An empty curve (no detections or no ground truth) has AP 0.
pub fn average_precision(curve: &PrCurve, interpolation: Interpolation) -> f64 {
    if curve.is_empty() || curve.n_ground_truth() == 0 {
        return 0.0;
    }
    let points = curve.points();
    // Envelope, right to left: env[i] = max(precision[i..]).
    let mut envelope = alloc::vec![0.0f64; points.len()];
    let mut running = 0.0f64;
    for i in (0..points.len()).rev() {
        running = running.max(points[i].precision);
        envelope[i] = running;
    }
    match interpolation {
        Interpolation::AllPoint => {
            let mut ap = 0.0;
            let mut prev_recall = 0.0;
            for (p, env) in points.iter().zip(&envelope) {
                ap += (p.recall - prev_recall) * env;
                prev_recall = p.recall;
            }
            ap
        }
        Interpolation::ElevenPoint => {
            let mut sum = 0.0;
            for k in 0..=10 {
                let r = k as f64 / 10.0;
                // First point with recall >= r carries the envelope max.
                let p = points
                    .iter()
                    .zip(&envelope)
                    .find(|(pt, _)| pt.recall >= r)
                    .map_or(0.0, |(_, env)| *env);
                sum += p;
            }
            sum / 11.0
        }
    }
}

/// Per-category evaluation outcome.
#[derive(Debug, Clone)]
pub struct CategoryEvaluation {
    pub category: String,
    pub ap: f64,
    pub n_ground_truth: usize,
    pub curve: PrCurve,
}

/// A category that had predictions but no ground truth anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct UnevaluatedCategory {
    pub category: String,
    pub n_predictions: usize,
}

/// Full evaluation result.
#[derive(Debug, Clone)]
pub struct EvaluationResult {
    pub iou_threshold: f64,
    pub interpolation: Interpolation,
    /// Categories with at least one ground-truth instance, in category-set order.
    pub per_category: Vec<CategoryEvaluation>,
    /// Unweighted mean AP over `per_category`; 0 when that set is empty.
    pub map: f64,
    /// Categories excluded from the mean because they have predictions but no
    /// ground truth.
    pub unevaluated: Vec<UnevaluatedCategory>,
}

#[derive(Debug, Clone, Copy)]
pub struct EvaluateOptions {
    pub iou_threshold: f64,
    pub interpolation: Interpolation,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            interpolation: Interpolation::AllPoint,
        }
    }
}

/// Evaluate predictions against a manifest: per-category AP and mAP.
///
/// Categories with ground truth but no predictions score 0; categories with
/// predictions but no ground truth anywhere are excluded from the mean and
/// reported in `unevaluated`. Every prediction must reference a known image
/// id and category.
pub fn evaluate(
    predictions: &[Detection],
    manifest: &DatasetManifest,
    options: &EvaluateOptions,
) -> Result<EvaluationResult, MetricsError> {
    if !(options.iou_threshold > 0.0 && options.iou_threshold <= 1.0) {
        return Err(MetricsError::BadIouThreshold(options.iou_threshold));
    }

    let mut unknown_images: Vec<&str> = Vec::new();
    let mut unknown_categories: Vec<&str> = Vec::new();
    for det in predictions {
        if !manifest.images().iter().any(|i| i.image_id == det.image_id)
            && !unknown_images.contains(&det.image_id.as_str())
        {
            unknown_images.push(&det.image_id);
        }
        if !manifest.has_category(&det.category)
            && !unknown_categories.contains(&det.category.as_str())
        {
            unknown_categories.push(&det.category);
        }
        if !(0.0..=1.0).contains(&det.score) || det.score.is_nan() {
            return Err(MetricsError::ScoreOutOfRange(det.score));
        }
    }
    if !unknown_images.is_empty() {
        return Err(MetricsError::UnknownImages(unknown_images.join(", ")));
    }
    if !unknown_categories.is_empty() {
        return Err(MetricsError::UnknownCategories(unknown_categories.join(", ")));
    }

    let mut per_category = Vec::new();
    let mut unevaluated = Vec::new();

    for category in manifest.categories() {
        let n_ground_truth: usize = manifest
            .images()
            .iter()
            .map(|img| {
                img.instances
                    .iter()
                    .filter(|t| t.category == *category)
                    .count()
            })
            .sum();
        let n_predictions = predictions
            .iter()
            .filter(|d| d.category == *category)
            .count();

        if n_ground_truth == 0 {
            if n_predictions > 0 {
                unevaluated.push(UnevaluatedCategory {
                    category: category.clone(),
                    n_predictions,
                });
            }
            continue;
        }

        // Per-image matching, then a global stable sort by descending score so
        // the PR curve is independent of evaluation order.
        let mut scored: Vec<(f64, MatchFlag)> = Vec::with_capacity(n_predictions);
        for img in manifest.images() {
            let dets: Vec<Detection> = predictions
                .iter()
                .filter(|d| d.image_id == img.image_id && d.category == *category)
                .cloned()
                .collect();
            if dets.is_empty() {
                continue;
            }
            let truths: Vec<GroundTruthInstance> = img
                .instances
                .iter()
                .filter(|t| t.category == *category)
                .cloned()
                .collect();
            for (det, flag) in match_detections(&dets, &truths, options.iou_threshold)? {
                scored.push((det.score, flag));
            }
        }
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let flags: Vec<MatchFlag> = scored.iter().map(|(_, f)| *f).collect();
        let curve = pr_curve(&flags, n_ground_truth);
        let ap = average_precision(&curve, options.interpolation);
        per_category.push(CategoryEvaluation {
            category: category.clone(),
            ap,
            n_ground_truth,
            curve,
        });
    }

    let map = if per_category.is_empty() {
        0.0
    } else {
        per_category.iter().map(|c| c.ap).sum::<f64>() / per_category.len() as f64
    };

    Ok(EvaluationResult {
        iou_threshold: options.iou_threshold,
        interpolation: options.interpolation,
        per_category,
        map,
        unevaluated,
    })
}
