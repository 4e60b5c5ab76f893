//! Mix-plan output file: everything an external training pipeline needs to
//! assemble the planned subsets, plus the provenance to reproduce the draw.

use std::path::Path;

use serde::{Deserialize, Serialize};

use synmix_core::mixing::PlannedMix;

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanFile {
    pub ratio: f64,
    pub seed: u64,
    pub real_manifest: String,
    pub synthetic_manifest: String,
    pub sizes: Vec<PlanSizeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanSizeEntry {
    pub n_total: u64,
    pub n_real: u64,
    pub n_synthetic: u64,
    /// Seed this size's selection was drawn with (plan seed XOR 1-based index).
    pub seed: u64,
    pub real_ids: Vec<String>,
    pub synthetic_ids: Vec<String>,
}

pub fn plan_file(planned: &PlannedMix) -> PlanFile {
    let (real_manifest, synthetic_manifest) = planned
        .selections
        .first()
        .map(|s| {
            (
                s.provenance.real_manifest.clone(),
                s.provenance.synthetic_manifest.clone(),
            )
        })
        .unwrap_or_default();
    PlanFile {
        ratio: planned.plan.ratio,
        seed: planned.plan.seed,
        real_manifest,
        synthetic_manifest,
        sizes: planned
            .plan
            .sizes
            .iter()
            .zip(&planned.selections)
            .map(|(sp, sel)| PlanSizeEntry {
                n_total: sp.n_total,
                n_real: sp.n_real,
                n_synthetic: sp.n_synthetic,
                seed: sp.seed,
                real_ids: sel.real_ids.clone(),
                synthetic_ids: sel.synthetic_ids.clone(),
            })
            .collect(),
    }
}

pub fn serialize_plan(planned: &PlannedMix) -> Vec<u8> {
    let mut out =
        serde_json::to_vec_pretty(&plan_file(planned)).expect("plan serialization is infallible");
    out.push(b'\n');
    out
}

pub fn write_plan(path: &Path, planned: &PlannedMix) -> Result<()> {
    std::fs::write(path, serialize_plan(planned)).map_err(|e| CliError::io(path, &e))
}
