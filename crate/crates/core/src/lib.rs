//! Core algorithms for quantifying how much real-world training data a mixed
//! real/synthetic object-detection dataset saves.
//!
//! The crate covers the full desk-side pipeline around externally trained
//! detectors:
//!
//! * [`annotations`] — dataset manifests, polygon→box conversion, rider
//!   merging, and class-distribution statistics.
//! * [`metrics`] — IoU, greedy detection matching, precision–recall curves,
//!   AP50 and mAP50.
//! * [`mixing`] — log-spaced subset-size planning and deterministic
//!   real/synthetic subset sampling.
//! * [`scaling`] — power-law fits of error vs. dataset size, inversion to
//!   required sample counts, savings tables, and strategy comparison.
//! * [`simulate`] — synthetic run records from known power-law parameters for
//!   end-to-end validation of the fitting chain.
//!
//! Everything here is pure computation over in-memory data; file formats and
//! the command-line interface live in the companion `synmix-cli` crate. The
//! crate is `no_std` (with `alloc`) and routes all transcendental math through
//! `libm` so results are bit-identical across platforms.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotations;
pub mod metrics;
pub mod mixing;
pub mod rng;
pub mod scaling;
pub mod simulate;
pub mod stats;

pub use annotations::{BoundingBox, DatasetManifest, Domain, GroundTruthInstance, ImageRecord};
pub use metrics::{Detection, EvaluationResult, PrCurve};
pub use mixing::{MixPlan, SubsetSelection};
pub use scaling::{PowerLawFit, RunRecord, SavingsRow, StrategyComparison};
pub use simulate::SimulationSpec;
