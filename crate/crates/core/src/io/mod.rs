//! Frame ingestion, output encoding, configuration and the per-frame pipeline.

pub mod config;
pub mod frame;
pub mod netpbm;
pub mod pipeline;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{ConfigError, EmitFlags, InputSource, RunConfig, SegmentationParams};
pub use frame::{render_overlay, ClassMap, Frame};
pub use netpbm::{decode_frame, decode_mask, decode_raw_frame, encode_frame, encode_mask, CodecError};
pub use pipeline::{run_pipeline, run_pipeline_from, FrameOutput, Pipeline, RunStats, StageTimings};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input unavailable at {path}: {reason}")]
    InputUnavailable { path: PathBuf, reason: String },
    #[error("cannot write output {path}: {source}")]
    OutputUnwritable { path: PathBuf, source: std::io::Error },
    #[error("frame {frame}: dimensions changed from {expected:?} to {found:?}")]
    DimensionChangedMidStream { frame: u64, expected: (usize, usize), found: (usize, usize) },
    #[error("frame {frame}: {source}")]
    Decode { frame: u64, source: CodecError },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error(transparent)]
    Config(#[from] ConfigError),
}
