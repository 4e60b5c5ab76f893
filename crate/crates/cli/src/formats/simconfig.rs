//! Simulation config file (JSON).
//!
//! ```json
//! {
//!   "metric": "map50",
//!   "curves": [{"ratio": 0.1, "beta": -0.05, "gamma": -0.20}],
//!   "sizes": [272, 2727],
//!   "repeats": 5,
//!   "sigma": 0.01
//! }
//! ```
//!
//! Instead of explicit `sizes`, the ladder can be derived from
//! `n_max`/`points`/`decades`. The seed is not part of the config; it must
//! come from the command line so no run has hidden entropy.

use std::path::Path;

use serde::Deserialize;

use synmix_core::mixing::plan_sizes;
use synmix_core::simulate::RatioCurve;
use synmix_core::SimulationSpec;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfigFile {
    #[serde(default = "default_metric")]
    pub metric: String,
    pub curves: Vec<CurveEntry>,
    #[serde(default)]
    pub sizes: Option<Vec<u64>>,
    #[serde(default)]
    pub n_max: Option<u64>,
    #[serde(default)]
    pub points: Option<u32>,
    #[serde(default)]
    pub decades: Option<f64>,
    pub repeats: u32,
    #[serde(default)]
    pub sigma: f64,
}

fn default_metric() -> String {
    "map50".to_string()
}

#[derive(Debug, Deserialize)]
pub struct CurveEntry {
    pub ratio: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn read_sim_config(path: &Path, seed: u64) -> Result<SimulationSpec> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, &e))?;
    let source = path.display().to_string();
    let file: SimConfigFile = serde_json::from_slice(&bytes).map_err(|e| {
        CliError::validation(format!(
            "{source}: malformed simulation config at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    spec_from_config(file, seed, &source)
}

pub fn spec_from_config(
    file: SimConfigFile,
    seed: u64,
    source: &str,
) -> Result<SimulationSpec> {
    let sizes = match (file.sizes, file.n_max) {
        (Some(sizes), _) => sizes,
        (None, Some(n_max)) => plan_sizes(
            n_max,
            file.points.unwrap_or(10),
            file.decades.unwrap_or(1.0),
        )
        .map_err(|e| CliError::validation(format!("{source}: {e}")))?,
        (None, None) => {
            return Err(CliError::validation(format!(
                "{source}: provide either 'sizes' or 'n_max' (with optional 'points'/'decades')"
            )))
        }
    };
    Ok(SimulationSpec {
        curves: file
            .curves
            .into_iter()
            .map(|c| RatioCurve {
                ratio: c.ratio,
                beta: c.beta,
                gamma: c.gamma,
            })
            .collect(),
        sizes,
        repeats: file.repeats,
        sigma: file.sigma,
        seed,
        metric: file.metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derives_sizes_from_ladder_parameters() {
        let file: SimConfigFile = serde_json::from_str(
            r#"{"curves": [{"ratio": 0.2, "beta": -0.1, "gamma": -0.2}],
                "n_max": 1000, "points": 4, "repeats": 5, "sigma": 0.0}"#,
        )
        .unwrap();
        let spec = spec_from_config(file, 7, "test").unwrap();
        assert_eq!(spec.sizes, vec![100, 215, 464, 1000]);
        assert_eq!(spec.metric, "map50");
        assert_eq!(spec.seed, 7);
    }

    #[test]
    fn requires_some_size_description() {
        let file: SimConfigFile = serde_json::from_str(
            r#"{"curves": [], "repeats": 1}"#,
        )
        .unwrap();
        assert!(spec_from_config(file, 7, "test").is_err());
    }
}
