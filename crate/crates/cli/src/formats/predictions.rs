//! Prediction file format: a JSON array of detection records.
//!
//! ```json
//! [
//!   {"image_id": "a", "category": "car", "bbox": [0.0, 0.0, 10.0, 10.0], "score": 0.93}
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use synmix_core::annotations::BoundingBox;
use synmix_core::Detection;

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct PredictionEntry {
    pub image_id: String,
    pub category: String,
    pub bbox: [f64; 4],
    pub score: f64,
}

pub fn parse_predictions(bytes: &[u8], source: &str) -> Result<Vec<Detection>> {
    let entries: Vec<PredictionEntry> = serde_json::from_slice(bytes).map_err(|e| {
        CliError::validation(format!(
            "{source}: malformed predictions at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    entries
        .into_iter()
        .enumerate()
        .map(|(idx, entry)| {
            let [x0, y0, x1, y1] = entry.bbox;
            let bbox = BoundingBox::new(x0, y0, x1, y1).map_err(|e| {
                CliError::validation(format!(
                    "{source}: record {idx} (image '{}'): {e}",
                    entry.image_id
                ))
            })?;
            if !(0.0..=1.0).contains(&entry.score) || entry.score.is_nan() {
                return Err(CliError::validation(format!(
                    "{source}: record {idx} (image '{}'): score {} outside [0, 1]",
                    entry.image_id, entry.score
                )));
            }
            Ok(Detection {
                image_id: entry.image_id,
                category: entry.category,
                bbox,
                score: entry.score,
            })
        })
        .collect()
}

pub fn read_predictions(path: &Path) -> Result<Vec<Detection>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, &e))?;
    parse_predictions(&bytes, &path.display().to_string())
}
