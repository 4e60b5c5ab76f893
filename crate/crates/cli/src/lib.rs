//! File formats, report rendering, and the command-line surface of the
//! toolkit. All algorithms live in `synmix-core`; this crate owns I/O.

pub mod cli;
pub mod error;
pub mod formats;
pub mod report;
