//! In-memory throughput measurement of the full pipeline.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::scene::{generate_scene, SceneSpec};
use super::EvalError;
use crate::io::{Frame, Pipeline, RunConfig, StageTimings};

/// Mean milliseconds per frame spent in each stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageBreakdown {
    pub model_update_ms: f64,
    pub shadow_ms: f64,
    pub ccl_ms: f64,
    pub events_ms: f64,
}

impl StageBreakdown {
    pub fn sum_ms(&self) -> f64 {
        self.model_update_ms + self.shadow_ms + self.ccl_ms + self.events_ms
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub repetitions: usize,
    pub workers: usize,
    pub k: usize,
    pub mean_fps: f64,
    pub min_fps: f64,
    /// Mean milliseconds per frame for the whole pipeline.
    pub total_ms: f64,
    pub stages: StageBreakdown,
}

/// Generates the scene once, then runs a fresh pipeline over it `repetitions` times.
pub fn benchmark(cfg: &RunConfig, spec: &SceneSpec, repetitions: usize, seed: u64) -> Result<BenchReport, EvalError> {
    let (frames, _) = generate_scene(spec, seed)?;
    benchmark_frames(cfg, &frames, repetitions)
}

pub fn benchmark_frames(cfg: &RunConfig, frames: &[Frame], repetitions: usize) -> Result<BenchReport, EvalError> {
    let repetitions = repetitions.max(1);
    let mut fps = Vec::with_capacity(repetitions);
    let mut stages = StageTimings::default();
    let mut total_secs = 0.0;
    for _ in 0..repetitions {
        let mut pipeline = Pipeline::new(cfg);
        let start = Instant::now();
        for f in frames {
            let out = pipeline.process(f)?;
            stages.accumulate(&out.timings);
        }
        let secs = start.elapsed().as_secs_f64();
        total_secs += secs;
        fps.push(frames.len() as f64 / secs);
    }
    let n = (frames.len() * repetitions) as f64;
    let per_frame = |d: std::time::Duration| d.as_secs_f64() * 1000.0 / n;
    let (width, height) = frames.first().map_or((0, 0), Frame::dims);
    Ok(BenchReport {
        width,
        height,
        frames: frames.len(),
        repetitions,
        workers: cfg.workers,
        k: cfg.model.k,
        mean_fps: fps.iter().sum::<f64>() / fps.len() as f64,
        min_fps: fps.iter().copied().fold(f64::INFINITY, f64::min),
        total_ms: total_secs * 1000.0 / n,
        stages: StageBreakdown {
            model_update_ms: per_frame(stages.model_update),
            shadow_ms: per_frame(stages.shadow),
            ccl_ms: per_frame(stages.ccl),
            events_ms: per_frame(stages.events),
        },
    })
}
