//! Converter for Cityscapes-style polygon annotation files.
//!
//! Each input file describes one image:
//!
//! ```json
//! {
//!   "imgHeight": 1024,
//!   "imgWidth": 2048,
//!   "objects": [
//!     {"label": "car", "polygon": [[0.0, 0.0], [10.0, 0.0], [10.0, 8.0]]}
//!   ]
//! }
//! ```
//!
//! The image id is the file name with its `_gtFine_polygons.json` /
//! `_polygons.json` / `.json` suffix stripped. Labels outside the requested
//! category set are skipped; degenerate polygons (fewer than 3 vertices or a
//! zero-area tight box) are skipped and counted.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use synmix_core::annotations::bbox_from_polygon;
use synmix_core::{DatasetManifest, Domain, GroundTruthInstance, ImageRecord};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
struct PolygonFile {
    #[serde(rename = "imgHeight")]
    img_height: u32,
    #[serde(rename = "imgWidth")]
    img_width: u32,
    objects: Vec<PolygonObject>,
}

#[derive(Debug, Deserialize)]
struct PolygonObject {
    label: String,
    polygon: Vec<[f64; 2]>,
}

#[derive(Debug, Default)]
pub struct ConvertStats {
    pub images: usize,
    pub instances: usize,
    /// Objects whose label is outside the category set.
    pub skipped_labels: usize,
    /// Objects with degenerate polygons.
    pub skipped_degenerate: usize,
}

fn image_id_from_path(path: &Path) -> String {
    let name = path.file_name().map_or_else(String::new, |n| {
        n.to_string_lossy().into_owned()
    });
    for suffix in ["_gtFine_polygons.json", "_polygons.json", ".json"] {
        if let Some(stripped) = name.strip_suffix(suffix) {
            return stripped.to_string();
        }
    }
    name
}

/// Collect annotation files: a single file as-is, a directory recursively
/// for `*.json`, sorted by path for a deterministic image order.
pub fn collect_input_files(input: &Path) -> Result<Vec<PathBuf>> {
    let meta = std::fs::metadata(input).map_err(|e| CliError::io(input, &e))?;
    if meta.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files = Vec::new();
    let mut stack = vec![input.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = std::fs::read_dir(&dir).map_err(|e| CliError::io(&dir, &e))?;
        for entry in entries {
            let entry = entry.map_err(|e| CliError::io(&dir, &e))?;
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "json") {
                files.push(path);
            }
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::validation(format!(
            "no .json annotation files found under {}",
            input.display()
        )));
    }
    Ok(files)
}

/// Convert polygon annotation files into a manifest.
///
/// With `categories = Some(set)`, the manifest uses that ordered category set
/// and skips objects outside it. Otherwise the category set is the sorted
/// list of labels encountered.
pub fn convert(
    files: &[PathBuf],
    name: &str,
    domain: Domain,
    categories: Option<Vec<String>>,
) -> Result<(DatasetManifest, ConvertStats)> {
    let mut stats = ConvertStats::default();
    let mut raw: Vec<(String, u32, u32, Vec<(String, Vec<(f64, f64)>)>)> = Vec::new();
    for path in files {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, &e))?;
        let file: PolygonFile = serde_json::from_slice(&bytes).map_err(|e| {
            CliError::validation(format!(
                "{}: malformed annotation file at line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        let objects = file
            .objects
            .into_iter()
            .map(|o| {
                let points = o.polygon.iter().map(|[x, y]| (*x, *y)).collect();
                (o.label, points)
            })
            .collect();
        raw.push((
            image_id_from_path(path),
            file.img_width,
            file.img_height,
            objects,
        ));
    }

    let categories = match categories {
        Some(c) => c,
        None => {
            let mut labels: Vec<String> = raw
                .iter()
                .flat_map(|(_, _, _, objs)| objs.iter().map(|(l, _)| l.clone()))
                .collect();
            labels.sort();
            labels.dedup();
            labels
        }
    };

    let mut images = Vec::with_capacity(raw.len());
    for (id, width, height, objects) in raw {
        let mut instances = Vec::new();
        for (label, points) in objects {
            if !categories.contains(&label) {
                stats.skipped_labels += 1;
                continue;
            }
            match bbox_from_polygon(&points) {
                Ok(bbox) => {
                    stats.instances += 1;
                    instances.push(GroundTruthInstance {
                        category: label,
                        bbox,
                    });
                }
                Err(_) => stats.skipped_degenerate += 1,
            }
        }
        stats.images += 1;
        images.push(ImageRecord {
            image_id: id,
            width,
            height,
            domain,
            instances,
        });
    }

    let manifest = DatasetManifest::new(name, categories, images)
        .map_err(|e| CliError::validation(e.to_string()))?;
    Ok((manifest, stats))
}
