//! Synthetic run records from known power-law parameters.
//!
//! This closes the loop around the fitting chain without training anything:
//! records are generated as `error = 10^(beta + gamma*log10(N) + eps)` with
//! `eps ~ Normal(0, sigma)` in log space, so a fit on noiseless output must
//! recover the parameters exactly and noisy output behaves like repeated
//! training runs.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::mixing::split_counts;
use crate::rng::{derive_seed, SplitMix64};
use crate::scaling::RunRecord;

#[derive(Debug, Error, PartialEq)]
pub enum SimulateError {
    #[error("gamma must be negative, got {gamma} for ratio {ratio}")]
    BadGamma { ratio: f64, gamma: f64 },
    #[error("sigma must be non-negative, got {0}")]
    BadSigma(f64),
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("sizes must be non-empty and positive")]
    BadSizes,
    #[error("ratio must be in [0, 1], got {0}")]
    BadRatio(f64),
    #[error(
        "generated error {error} outside (0, 1) at ratio {ratio}, n_total {n_total}; \
         adjust beta/gamma or sizes"
    )]
    ErrorOutOfRange {
        ratio: f64,
        n_total: u64,
        error: f64,
    },
}

/// Power-law parameters for one mixing ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCurve {
    pub ratio: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Full description of a simulated experiment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub curves: Vec<RatioCurve>,
    pub sizes: Vec<u64>,
    pub repeats: u32,
    /// Log10-space noise standard deviation.
    pub sigma: f64,
    pub seed: u64,
    /// Metric name to stamp on the records, e.g. `map50`.
    pub metric: String,
}

/// Generate one record per (ratio, size, repeat).
///
/// Each record draws its noise from a SplitMix64 stream seeded by chaining
/// `derive_seed` over (ratio index, size index, repeat index), so the output
/// is fully deterministic and independent of generation order.
pub fn generate_runs(spec: &SimulationSpec) -> Result<Vec<RunRecord>, SimulateError> {
    if !(spec.sigma >= 0.0) || !spec.sigma.is_finite() {
        return Err(SimulateError::BadSigma(spec.sigma));
    }
    if spec.repeats < 1 {
        return Err(SimulateError::NoRepeats);
    }
    if spec.sizes.is_empty() || spec.sizes.contains(&0) {
        return Err(SimulateError::BadSizes);
    }
    for curve in &spec.curves {
        if !(0.0..=1.0).contains(&curve.ratio) || curve.ratio.is_nan() {
            return Err(SimulateError::BadRatio(curve.ratio));
        }
        if !(curve.gamma < 0.0) {
            return Err(SimulateError::BadGamma {
                ratio: curve.ratio,
                gamma: curve.gamma,
            });
        }
    }

    let mut records = Vec::with_capacity(spec.curves.len() * spec.sizes.len() * spec.repeats as usize);
    for (ratio_idx, curve) in spec.curves.iter().enumerate() {
        for (size_idx, &n_total) in spec.sizes.iter().enumerate() {
            let log_error = curve.beta + curve.gamma * libm::log10(n_total as f64);
            for repeat in 1..=spec.repeats {
                let stream = derive_seed(
                    derive_seed(derive_seed(spec.seed, ratio_idx as u64), size_idx as u64),
                    repeat as u64,
                );
                let mut rng = SplitMix64::new(stream);
                let eps = if spec.sigma > 0.0 {
                    spec.sigma * rng.next_normal()
                } else {
                    0.0
                };
                let error = libm::exp10(log_error + eps);
                if !(error > 0.0 && error < 1.0) {
                    return Err(SimulateError::ErrorOutOfRange {
                        ratio: curve.ratio,
                        n_total,
                        error,
                    });
                }
                let (n_real, _) = split_counts(n_total, curve.ratio);
                records.push(RunRecord {
                    ratio: curve.ratio,
                    n_total,
                    n_real,
                    repeat,
                    metric: spec.metric.clone(),
                    value: 1.0 - error,
                });
            }
        }
    }
    Ok(records)
}
