//! Synthetic scenes, ground-truth scoring and throughput measurement.

pub mod bench;
pub mod scene;
pub mod score;

use thiserror::Error;

use crate::io::PipelineError;

pub use bench::{benchmark, benchmark_frames, BenchReport, StageBreakdown};
pub use scene::{generate_scene, Actor, BackgroundSpec, Flicker, GainKey, GroundTruth, Path, SceneSpec, ShadowCaster, Waypoint};
pub use score::{score, ClassScore, Confusion, ScoreReport};

/// Frames excluded from scoring while the bootstrap model settles.
pub const DEFAULT_WARMUP: usize = 30;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("scene spec out of bounds: {0}")]
    SpecOutOfBounds(String),
    #[error("prediction has {pred} frames but ground truth has {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("frame {frame}: prediction is {pred:?} but ground truth is {truth:?}")]
    DimensionMismatch { frame: usize, pred: (usize, usize), truth: (usize, usize) },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}
