//! File formats, configuration, pipeline orchestration and batch evaluation
//! on top of [`demoseg_core`].
//!
//! The `demoseg` binary exposes the pipeline as subcommands (`split`,
//! `match`, `fit`, `eval-split`, `eval-match`, `synth`); everything it does
//! is also callable from here.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod formats;
pub mod pipeline;
pub mod schema;
pub mod synth;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use pipeline::run_pipeline;
