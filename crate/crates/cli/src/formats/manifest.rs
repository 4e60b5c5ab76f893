//! Manifest file format: a single JSON document.
//!
//! ```json
//! {
//!   "name": "cityscapes-train",
//!   "domain": "real",
//!   "categories": ["car", "person"],
//!   "images": [
//!     {
//!       "id": "munich_000000",
//!       "width": 2048,
//!       "height": 1024,
//!       "instances": [
//!         {"category": "car", "bbox": [10.0, 20.0, 110.0, 80.0]},
//!         {"category": "person", "polygon": [[5.0, 5.0], [9.0, 5.0], [7.0, 12.0]]}
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! An instance carries either `bbox` ([x_min, y_min, x_max, y_max], pixels)
//! or `polygon` (list of [x, y] vertices); polygons become their tight
//! axis-aligned box on load. Serialization always emits the canonical bbox
//! form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use synmix_core::annotations::{bbox_from_polygon, BoundingBox};
use synmix_core::{DatasetManifest, Domain, GroundTruthInstance, ImageRecord};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub domain: String,
    pub categories: Vec<String>,
    pub images: Vec<ImageEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<InstanceEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub category: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

pub fn parse_domain(s: &str) -> Result<Domain> {
    match s {
        "real" => Ok(Domain::Real),
        "synthetic" => Ok(Domain::Synthetic),
        other => Err(CliError::validation(format!(
            "domain must be 'real' or 'synthetic', got '{other}'"
        ))),
    }
}

/// Parse and validate a manifest from raw bytes.
pub fn parse_manifest(bytes: &[u8], source: &str) -> Result<DatasetManifest> {
    let file: ManifestFile = serde_json::from_slice(bytes).map_err(|e| {
        CliError::validation(format!(
            "{source}: malformed manifest at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    manifest_from_file(file, source)
}

fn manifest_from_file(file: ManifestFile, source: &str) -> Result<DatasetManifest> {
    let domain = parse_domain(&file.domain)?;
    let mut images = Vec::with_capacity(file.images.len());
    for entry in file.images {
        let mut instances = Vec::with_capacity(entry.instances.len());
        for inst in entry.instances {
            let bbox = match (inst.bbox, inst.polygon) {
                (Some([x0, y0, x1, y1]), None) => {
                    BoundingBox::new(x0, y0, x1, y1).map_err(|e| {
                        CliError::validation(format!(
                            "{source}: image '{}': {e}",
                            entry.id
                        ))
                    })?
                }
                (None, Some(vertices)) => {
                    let points: Vec<(f64, f64)> =
                        vertices.iter().map(|[x, y]| (*x, *y)).collect();
                    bbox_from_polygon(&points).map_err(|e| {
                        CliError::validation(format!(
                            "{source}: image '{}': {e}",
                            entry.id
                        ))
                    })?
                }
                _ => {
                    return Err(CliError::validation(format!(
                        "{source}: image '{}': instance needs exactly one of 'bbox' or 'polygon'",
                        entry.id
                    )))
                }
            };
            instances.push(GroundTruthInstance {
                category: inst.category,
                bbox,
            });
        }
        images.push(ImageRecord {
            image_id: entry.id,
            width: entry.width,
            height: entry.height,
            domain,
            instances,
        });
    }
    DatasetManifest::new(file.name, file.categories, images)
        .map_err(|e| CliError::validation(format!("{source}: {e}")))
}

/// Serialize a manifest back to its canonical JSON form.
///
/// All instances come out as bboxes; `parse_manifest` of the output
/// reconstructs the input manifest exactly.
pub fn serialize_manifest(manifest: &DatasetManifest) -> Vec<u8> {
    let domain = manifest
        .images()
        .first()
        .map_or("real", |img| img.domain.as_str());
    let file = ManifestFile {
        name: manifest.name().to_string(),
        domain: domain.to_string(),
        categories: manifest.categories().to_vec(),
        images: manifest
            .images()
            .iter()
            .map(|img| ImageEntry {
                id: img.image_id.clone(),
                width: img.width,
                height: img.height,
                instances: img
                    .instances
                    .iter()
                    .map(|inst| InstanceEntry {
                        category: inst.category.clone(),
                        bbox: Some([
                            inst.bbox.x_min(),
                            inst.bbox.y_min(),
                            inst.bbox.x_max(),
                            inst.bbox.y_max(),
                        ]),
                        polygon: None,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("manifest serialization is infallible");
    out.push(b'\n');
    out
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, &e))?;
    parse_manifest(&bytes, &path.display().to_string())
}

pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    std::fs::write(path, serialize_manifest(manifest)).map_err(|e| CliError::io(path, &e))
}
