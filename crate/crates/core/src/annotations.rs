//! Dataset manifests and ground-truth preprocessing.
//!
//! A [`DatasetManifest`] holds validated images with axis-aligned box ground
//! truth, each image tagged with its source domain (real or synthetic).
//! Construction enforces every structural invariant, so downstream code can
//! rely on well-formed boxes and known categories.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("category set must be non-empty")]
    EmptyCategorySet,
    #[error("duplicate category label '{0}' in category set")]
    DuplicateCategory(String),
    #[error("duplicate image id '{0}'")]
    DuplicateImageId(String),
    #[error("image '{image_id}': instance category '{category}' is not in the category set")]
    UnknownCategory { image_id: String, category: String },
    #[error("image '{image_id}': box {field} out of bounds ({value} beyond {limit})")]
    BoxOutOfBounds {
        image_id: String,
        field: &'static str,
        value: f64,
        limit: f64,
    },
    #[error("image '{image_id}': invalid box ({reason})")]
    InvalidBox {
        image_id: String,
        reason: &'static str,
    },
    #[error("invalid box: {0}")]
    Geometry(&'static str),
    #[error("polygon needs at least 3 vertices, got {0}")]
    PolygonTooSmall(usize),
    #[error("polygon vertex coordinates must be finite")]
    PolygonNotFinite,
    #[error("polygon is degenerate: its bounding box has zero width or height")]
    DegeneratePolygon,
    #[error("category '{0}' is not in the manifest's category set")]
    CategoryNotInSet(String),
    #[error("manifest has no images")]
    EmptyManifest,
}

/// Axis-aligned box in image-local pixel coordinates.
///
/// Invariants (enforced at construction): all coordinates finite,
/// `x_min < x_max`, `y_min < y_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, AnnotationError> {
        if !(x_min.is_finite() && y_min.is_finite() && x_max.is_finite() && y_max.is_finite()) {
            return Err(AnnotationError::Geometry("coordinates must be finite"));
        }
        if x_min >= x_max {
            return Err(AnnotationError::Geometry("x_min must be < x_max"));
        }
        if y_min >= y_max {
            return Err(AnnotationError::Geometry("y_min must be < y_max"));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Box center `((x_min+x_max)/2, (y_min+y_max)/2)`.
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    /// Coordinate-wise union: the smallest box containing both inputs.
    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            x_min: self.x_min.min(other.x_min),
            y_min: self.y_min.min(other.y_min),
            x_max: self.x_max.max(other.x_max),
            y_max: self.y_max.max(other.y_max),
        }
    }

    pub fn contains(&self, other: &BoundingBox) -> bool {
        self.x_min <= other.x_min
            && self.y_min <= other.y_min
            && self.x_max >= other.x_max
            && self.y_max >= other.y_max
    }
}

/// Squared Euclidean distance between two box centers.
///
/// Square roots are monotone, so comparisons on the squared value give the
/// same nearest neighbour without leaving exact arithmetic.
fn center_distance_sq(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    let dx = ax - bx;
    let dy = ay - by;
    dx * dx + dy * dy
}

/// Tight axis-aligned box over a polygon's vertices.
pub fn bbox_from_polygon(vertices: &[(f64, f64)]) -> Result<BoundingBox, AnnotationError> {
    if vertices.len() < 3 {
        return Err(AnnotationError::PolygonTooSmall(vertices.len()));
    }
    if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(AnnotationError::PolygonNotFinite);
    }
    let mut x_min = f64::INFINITY;
    let mut y_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &(x, y) in vertices {
        x_min = x_min.min(x);
        y_min = y_min.min(y);
        x_max = x_max.max(x);
        y_max = y_max.max(y);
    }
    if x_min >= x_max || y_min >= y_max {
        return Err(AnnotationError::DegeneratePolygon);
    }
    BoundingBox::new(x_min, y_min, x_max, y_max)
}

/// Source domain of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Real,
    Synthetic,
}

impl Domain {
    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::Real => "real",
            Domain::Synthetic => "synthetic",
        }
    }
}

/// One labeled ground-truth instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthInstance {
    pub category: String,
    pub bbox: BoundingBox,
}

/// One image with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub domain: Domain,
    pub instances: Vec<GroundTruthInstance>,
}

/// A validated detection dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    name: String,
    categories: Vec<String>,
    images: Vec<ImageRecord>,
}

impl DatasetManifest {
    /// Build a manifest, checking every structural invariant.
    ///
    /// Rejects empty or duplicated category labels, duplicate image ids,
    /// instances of unknown categories, and boxes outside `[0,width]×[0,height]`.
    pub fn new(
        name: impl Into<String>,
        categories: Vec<String>,
        images: Vec<ImageRecord>,
    ) -> Result<Self, AnnotationError> {
        if categories.is_empty() {
            return Err(AnnotationError::EmptyCategorySet);
        }
        for (i, cat) in categories.iter().enumerate() {
            if categories[..i].contains(cat) {
                return Err(AnnotationError::DuplicateCategory(cat.clone()));
            }
        }
        let mut seen_ids: Vec<&str> = Vec::with_capacity(images.len());
        for image in &images {
            if seen_ids.binary_search(&image.image_id.as_str()).is_ok() {
                return Err(AnnotationError::DuplicateImageId(image.image_id.clone()));
            }
            let pos = seen_ids
                .binary_search(&image.image_id.as_str())
                .unwrap_err();
            seen_ids.insert(pos, image.image_id.as_str());

            for inst in &image.instances {
                if !categories.contains(&inst.category) {
                    return Err(AnnotationError::UnknownCategory {
                        image_id: image.image_id.clone(),
                        category: inst.category.clone(),
                    });
                }
                let (w, h) = (image.width as f64, image.height as f64);
                if inst.bbox.x_min() < 0.0 {
                    return Err(AnnotationError::BoxOutOfBounds {
                        image_id: image.image_id.clone(),
                        field: "x_min",
                        value: inst.bbox.x_min(),
                        limit: 0.0,
                    });
                }
                if inst.bbox.y_min() < 0.0 {
                    return Err(AnnotationError::BoxOutOfBounds {
                        image_id: image.image_id.clone(),
                        field: "y_min",
                        value: inst.bbox.y_min(),
                        limit: 0.0,
                    });
                }
                if inst.bbox.x_max() > w {
                    return Err(AnnotationError::BoxOutOfBounds {
                        image_id: image.image_id.clone(),
                        field: "x_max",
                        value: inst.bbox.x_max(),
                        limit: w,
                    });
                }
                if inst.bbox.y_max() > h {
                    return Err(AnnotationError::BoxOutOfBounds {
                        image_id: image.image_id.clone(),
                        field: "y_max",
                        value: inst.bbox.y_max(),
                        limit: h,
                    });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            categories,
            images,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Ordered category set.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn images(&self) -> &[ImageRecord] {
        &self.images
    }

    pub fn n_images(&self) -> usize {
        self.images.len()
    }

    pub fn n_instances(&self) -> usize {
        self.images.iter().map(|img| img.instances.len()).sum()
    }

    pub fn has_category(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }
}

/// What to do with a rider that has no rideable candidate in its image.
#[derive(Debug, Clone, PartialEq)]
pub enum RiderFallback {
    /// Remove the instance (default).
    Drop,
    /// Keep it, relabeled to the given category (e.g. `person`).
    ReassignTo(String),
}

/// One rider fused with its nearest rideable object.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeEvent {
    pub image_id: String,
    pub rider_box: BoundingBox,
    pub rideable_box: BoundingBox,
    pub merged_box: BoundingBox,
    pub category: String,
}

/// Result of [`merge_riders`]: the rewritten manifest plus an audit trail.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub manifest: DatasetManifest,
    pub merges: Vec<MergeEvent>,
    pub dropped: usize,
    pub reassigned: usize,
}

impl MergeOutcome {
    pub fn merged(&self) -> usize {
        self.merges.len()
    }
}

/// Fuse each rider instance with the rideable instance whose box center is
/// nearest (Euclidean distance, ties broken by instance order).
///
/// The pair is replaced by a single instance of the rideable's category whose
/// box is the coordinate-wise union of both boxes. Riders are processed in
/// instance order; a merged instance stays available as a candidate for later
/// riders, so tandem scenes collapse into one box. Riders with no candidate in
/// their image follow `fallback`. The output contains no rider instances.
pub fn merge_riders(
    manifest: &DatasetManifest,
    rider_category: &str,
    rideable_categories: &[&str],
    fallback: RiderFallback,
) -> Result<MergeOutcome, AnnotationError> {
    if !manifest.has_category(rider_category) {
        return Err(AnnotationError::CategoryNotInSet(rider_category.to_string()));
    }
    for cat in rideable_categories {
        if !manifest.has_category(cat) {
            return Err(AnnotationError::CategoryNotInSet((*cat).to_string()));
        }
    }
    if let RiderFallback::ReassignTo(cat) = &fallback {
        if !manifest.has_category(cat) {
            return Err(AnnotationError::CategoryNotInSet(cat.clone()));
        }
    }

    let mut merges = Vec::new();
    let mut dropped = 0usize;
    let mut reassigned = 0usize;
    let mut images = Vec::with_capacity(manifest.n_images());

    for image in manifest.images() {
        let mut working: Vec<Option<GroundTruthInstance>> =
            image.instances.iter().cloned().map(Some).collect();

        for idx in 0..working.len() {
            let is_rider = matches!(&working[idx], Some(inst) if inst.category == rider_category);
            if !is_rider {
                continue;
            }
            let rider = working[idx].take().expect("rider slot checked above");

            // Nearest rideable by current box center; strict `<` keeps the
            // first occurrence on ties.
            let mut best: Option<(usize, f64)> = None;
            for (j, slot) in working.iter().enumerate() {
                let Some(candidate) = slot else { continue };
                if !rideable_categories.contains(&candidate.category.as_str()) {
                    continue;
                }
                let d = center_distance_sq(&rider.bbox, &candidate.bbox);
                if best.map_or(true, |(_, best_d)| d < best_d) {
                    best = Some((j, d));
                }
            }

            match best {
                Some((j, _)) => {
                    let rideable = working[j].take().expect("candidate slot non-empty");
                    let merged_box = rider.bbox.union(&rideable.bbox);
                    merges.push(MergeEvent {
                        image_id: image.image_id.clone(),
                        rider_box: rider.bbox,
                        rideable_box: rideable.bbox,
                        merged_box,
                        category: rideable.category.clone(),
                    });
                    working[j] = Some(GroundTruthInstance {
                        category: rideable.category,
                        bbox: merged_box,
                    });
                }
                None => match &fallback {
                    RiderFallback::Drop => dropped += 1,
                    RiderFallback::ReassignTo(cat) => {
                        reassigned += 1;
                        working[idx] = Some(GroundTruthInstance {
                            category: cat.clone(),
                            bbox: rider.bbox,
                        });
                    }
                },
            }
        }

        images.push(ImageRecord {
            image_id: image.image_id.clone(),
            width: image.width,
            height: image.height,
            domain: image.domain,
            instances: working.into_iter().flatten().collect(),
        });
    }

    let manifest = DatasetManifest::new(
        manifest.name().to_string(),
        manifest.categories().to_vec(),
        images,
    )?;
    Ok(MergeOutcome {
        manifest,
        merges,
        dropped,
        reassigned,
    })
}

/// Instance counts for one category.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryCount {
    pub category: String,
    pub total: u64,
    /// `total / n_images`; images without the category still count in the
    /// denominator.
    pub average: f64,
}

/// Per-category instance statistics over a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    pub n_images: usize,
    /// One entry per category, in category-set order.
    pub per_category: Vec<CategoryCount>,
}

impl ClassDistribution {
    pub fn total_instances(&self) -> u64 {
        self.per_category.iter().map(|c| c.total).sum()
    }
}

/// Count instances per category and average them over all images.
pub fn class_distribution(manifest: &DatasetManifest) -> Result<ClassDistribution, AnnotationError> {
    if manifest.n_images() == 0 {
        return Err(AnnotationError::EmptyManifest);
    }
    let categories = manifest.categories();
    let mut totals = alloc::vec![0u64; categories.len()];
    for image in manifest.images() {
        for inst in &image.instances {
            // Membership is guaranteed by manifest validation.
            let idx = categories
                .iter()
                .position(|c| *c == inst.category)
                .expect("validated category");
            totals[idx] += 1;
        }
    }
    let n_images = manifest.n_images();
    let per_category = categories
        .iter()
        .zip(totals)
        .map(|(category, total)| CategoryCount {
            category: category.clone(),
            total,
            average: total as f64 / n_images as f64,
        })
        .collect();
    Ok(ClassDistribution {
        n_images,
        per_category,
    })
}
