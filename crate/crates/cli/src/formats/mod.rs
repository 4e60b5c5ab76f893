//! File formats consumed and produced by the toolkit.

pub mod cityscapes;
pub mod manifest;
pub mod plan;
pub mod predictions;
pub mod records;
pub mod simconfig;
