//! Per-frame processing: mixture update, shadow refinement, labeling, events.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::config::{InputSource, RunConfig, SegmentationParams};
use super::frame::{render_overlay, ClassMap, Frame};
use super::netpbm::{decode_frame, decode_raw_frame, encode_frame, encode_mask};
use super::PipelineError;
use crate::events::{Event, EventKind, EventTracker};
use crate::gmm::{init_pixel_model, process_pixel, ModelParams, PixelLabel, PixelModel, PixelStep};
use crate::segmentation::{extract_blobs, label_components, BinaryMask, Blob};
use crate::shadow::{refine_label, PixelClass, ShadowParams};

/// Wall-clock time spent in each stage of one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub model_update: Duration,
    pub shadow: Duration,
    pub ccl: Duration,
    pub events: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.model_update + self.shadow + self.ccl + self.events
    }

    pub fn accumulate(&mut self, other: &StageTimings) {
        self.model_update += other.model_update;
        self.shadow += other.shadow;
        self.ccl += other.ccl;
        self.events += other.events;
    }
}

#[derive(Clone, Debug)]
pub struct FrameOutput {
    pub index: u64,
    pub class_map: ClassMap,
    pub blobs: Vec<Blob>,
    pub events: Vec<Event>,
    pub timings: StageTimings,
}

/// Stateful engine for one stream.
pub struct Pipeline {
    model_params: ModelParams,
    shadow_params: ShadowParams,
    segmentation: SegmentationParams,
    workers: usize,
    dims: Option<(usize, usize)>,
    models: Vec<PixelModel>,
    steps: Vec<PixelStep>,
    tracker: EventTracker,
    zones: crate::events::ZoneConfig,
    frames_processed: u64,
}

impl Pipeline {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            model_params: cfg.model,
            shadow_params: cfg.shadow,
            segmentation: cfg.segmentation,
            workers: cfg.workers.max(1),
            dims: None,
            models: Vec::new(),
            steps: Vec::new(),
            tracker: EventTracker::new(cfg.events.params, cfg.events.zones.clone()),
            zones: cfg.events.zones.clone(),
            frames_processed: 0,
        }
    }

    pub fn frames_processed(&self) -> u64 {
        self.frames_processed
    }

    pub fn models(&self) -> &[PixelModel] {
        &self.models
    }

    pub fn tracker(&self) -> &EventTracker {
        &self.tracker
    }

    /// Processes the next frame of the stream. The first frame seeds the models and
    /// is classified entirely as background.
    pub fn process(&mut self, frame: &Frame) -> Result<FrameOutput, PipelineError> {
        let index = self.frames_processed;
        let (w, h) = frame.dims();
        let mut timings = StageTimings::default();

        let class_map = match self.dims {
            None => {
                self.zones
                    .validate(w, h)
                    .map_err(|e| PipelineError::Config(e.into()))?;
                let t0 = Instant::now();
                let params = &self.model_params;
                self.models = frame
                    .pixels
                    .iter()
                    .map(|&px| init_pixel_model(px.into(), params))
                    .collect();
                self.steps = vec![
                    PixelStep { label: PixelLabel::Background, component: 0, background_count: 1 };
                    w * h
                ];
                self.dims = Some((w, h));
                timings.model_update = t0.elapsed();
                ClassMap::new(w, h)
            }
            Some(expected) => {
                if expected != (w, h) {
                    return Err(PipelineError::DimensionChangedMidStream { frame: index, expected, found: (w, h) });
                }
                let t0 = Instant::now();
                self.update_models(frame);
                let t1 = Instant::now();
                let classes = self.refine(frame);
                timings.model_update = t1 - t0;
                timings.shadow = t1.elapsed();
                ClassMap::from_classes(w, h, classes)
            }
        };

        let t0 = Instant::now();
        let mask = BinaryMask::from_bits(
            w,
            h,
            class_map.classes.iter().map(|&c| c == PixelClass::Foreground).collect(),
        );
        let labels = label_components(&mask, self.segmentation.connectivity);
        let blobs = extract_blobs(&labels, self.segmentation.min_area);
        timings.ccl = t0.elapsed();

        let t0 = Instant::now();
        let events = self.tracker.step(index, &blobs);
        timings.events = t0.elapsed();

        self.frames_processed += 1;
        Ok(FrameOutput { index, class_map, blobs, events, timings })
    }

    fn band_rows(&self, height: usize) -> usize {
        height.div_ceil(self.workers).max(1)
    }

    fn update_models(&mut self, frame: &Frame) {
        let params = &self.model_params;
        let update = |models: &mut [PixelModel], steps: &mut [PixelStep], pixels: &[[u8; 3]]| {
            for ((m, s), &px) in models.iter_mut().zip(steps.iter_mut()).zip(pixels) {
                *s = process_pixel(m, px.into(), params);
            }
        };
        if self.workers == 1 {
            update(&mut self.models, &mut self.steps, &frame.pixels);
            return;
        }
        let chunk = self.band_rows(frame.height) * frame.width;
        thread::scope(|scope| {
            for ((models, steps), pixels) in self
                .models
                .chunks_mut(chunk)
                .zip(self.steps.chunks_mut(chunk))
                .zip(frame.pixels.chunks(chunk))
            {
                scope.spawn(move || update(models, steps, pixels));
            }
        });
    }

    fn refine(&self, frame: &Frame) -> Vec<PixelClass> {
        let sp = &self.shadow_params;
        let refine = |models: &[PixelModel], steps: &[PixelStep], pixels: &[[u8; 3]], out: &mut [PixelClass]| {
            for (((m, s), &px), o) in models.iter().zip(steps).zip(pixels).zip(out.iter_mut()) {
                *o = match s.label {
                    PixelLabel::Background => PixelClass::Background,
                    PixelLabel::Foreground => refine_label(s.label, px.into(), m, s.background_count, sp),
                };
            }
        };
        let mut classes = vec![PixelClass::Background; frame.pixels.len()];
        if self.workers == 1 {
            refine(&self.models, &self.steps, &frame.pixels, &mut classes);
            return classes;
        }
        let chunk = self.band_rows(frame.height) * frame.width;
        thread::scope(|scope| {
            for (((models, steps), pixels), out) in self
                .models
                .chunks(chunk)
                .zip(self.steps.chunks(chunk))
                .zip(frame.pixels.chunks(chunk))
                .zip(classes.chunks_mut(chunk))
            {
                scope.spawn(move || refine(models, steps, pixels, out));
            }
        });
        classes
    }
}

/// Frames in stream order.
pub type FrameSource = Box<dyn Iterator<Item = Result<Frame, PipelineError>> + Send>;

/// `frame_*.ppm` files of `dir` in lexicographic order.
pub fn directory_source(dir: &Path) -> Result<FrameSource, PipelineError> {
    let unavailable = |reason: String| PipelineError::InputUnavailable { path: dir.to_path_buf(), reason };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| unavailable(e.to_string()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".ppm"))
        })
        .collect();
    if paths.is_empty() {
        return Err(unavailable("no frame_*.ppm files".into()));
    }
    paths.sort();
    Ok(Box::new(paths.into_iter().enumerate().map(|(i, path)| {
        let index = i as u64;
        let bytes = fs::read(&path)
            .map_err(|e| PipelineError::InputUnavailable { path: path.clone(), reason: e.to_string() })?;
        decode_frame(&bytes, index).map_err(|source| PipelineError::Decode { frame: index, source })
    })))
}

/// Consecutive raw RGB24 frames from `reader`; a clean end of stream ends the source.
pub fn raw_source<R: Read + Send + 'static>(mut reader: R, width: usize, height: usize) -> FrameSource {
    let frame_len = width * height * 3;
    let mut index = 0u64;
    let mut done = false;
    Box::new(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut buf = vec![0u8; frame_len];
        let mut filled = 0;
        while filled < frame_len {
            match reader.read(&mut buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    done = true;
                    return Some(Err(PipelineError::InputUnavailable {
                        path: PathBuf::from("-"),
                        reason: e.to_string(),
                    }));
                }
            }
        }
        if filled == 0 {
            done = true;
            return None;
        }
        let frame = decode_raw_frame(&buf[..filled], width, height, index)
            .map_err(|source| PipelineError::Decode { frame: index, source });
        done = frame.is_err();
        index += 1;
        Some(frame)
    }))
}

/// Frames already held in memory.
pub fn memory_source(frames: Vec<Frame>) -> FrameSource {
    Box::new(frames.into_iter().map(Ok))
}

/// Decodes ahead on a separate thread, keeping at most `depth` frames buffered.
pub fn queued(source: FrameSource, depth: usize) -> FrameSource {
    if depth == 0 {
        return source;
    }
    let (tx, rx) = mpsc::sync_channel(depth);
    thread::spawn(move || {
        for item in source {
            let stop = item.is_err();
            if tx.send(item).is_err() || stop {
                break;
            }
        }
    });
    Box::new(rx.into_iter())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub intrusion: u64,
    pub abandoned: u64,
    pub motion_started: u64,
}

impl EventCounts {
    pub fn record(&mut self, kind: EventKind) {
        match kind {
            EventKind::Intrusion => self.intrusion += 1,
            EventKind::AbandonedObject => self.abandoned += 1,
            EventKind::MotionStarted => self.motion_started += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.intrusion + self.abandoned + self.motion_started
    }
}

/// Summary written to `stats.json`. Timing covers processing only, not decode or disk I/O.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub frames: u64,
    pub mean_fps: f64,
    pub p95_frame_ms: f64,
    pub events: EventCounts,
}

/// Nearest-rank percentile of `samples` (milliseconds); 0 when empty.
pub fn percentile(samples: &[f64], pct: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn summarize(frame_ms: &[f64], events: EventCounts) -> RunStats {
    let total_ms: f64 = frame_ms.iter().sum();
    let mean_fps = if total_ms > 0.0 { frame_ms.len() as f64 * 1000.0 / total_ms } else { 0.0 };
    RunStats { frames: frame_ms.len() as u64, mean_fps, p95_frame_ms: percentile(frame_ms, 95.0), events }
}

fn open_source(cfg: &RunConfig) -> Result<FrameSource, PipelineError> {
    match &cfg.input {
        InputSource::Directory(dir) => directory_source(dir),
        InputSource::Stdin => match (cfg.width, cfg.height) {
            (Some(w), Some(h)) => Ok(raw_source(std::io::stdin(), w, h)),
            _ => Err(PipelineError::Config(super::config::ConfigError::Invalid(
                "reading raw frames from standard input requires width and height".into(),
            ))),
        },
    }
}

/// Runs the configured input through the pipeline, writing the enabled outputs.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunStats, PipelineError> {
    cfg.validate()?;
    let source = open_source(cfg)?;
    run_pipeline_from(cfg, source)
}

/// As [`run_pipeline`] with an explicit frame source.
pub fn run_pipeline_from(cfg: &RunConfig, source: FrameSource) -> Result<RunStats, PipelineError> {
    cfg.validate()?;
    let out_dir = &cfg.output;
    let unwritable = |path: &Path, e: std::io::Error| PipelineError::OutputUnwritable { path: path.to_path_buf(), source: e };
    fs::create_dir_all(out_dir).map_err(|e| unwritable(out_dir, e))?;

    let events_path = out_dir.join("events.jsonl");
    let mut event_log = if cfg.emit.events {
        let f = fs::File::create(&events_path).map_err(|e| unwritable(&events_path, e))?;
        Some(BufWriter::new(f))
    } else {
        None
    };

    let mut pipeline = Pipeline::new(cfg);
    let mut frame_ms = Vec::new();
    let mut counts = EventCounts::default();
    let limit = cfg.frames.unwrap_or(u64::MAX);

    for item in queued(source, cfg.queue_depth) {
        if pipeline.frames_processed() >= limit {
            break;
        }
        let frame = item?;
        let start = Instant::now();
        let out = pipeline.process(&frame)?;
        frame_ms.push(start.elapsed().as_secs_f64() * 1000.0);

        let i = out.index;
        if cfg.emit.masks {
            let path = out_dir.join(format!("mask_{i:06}.pgm"));
            fs::write(&path, encode_mask(&out.class_map)).map_err(|e| unwritable(&path, e))?;
        }
        if cfg.emit.overlays {
            let path = out_dir.join(format!("overlay_{i:06}.ppm"));
            let overlay = render_overlay(&frame, &out.class_map)?;
            fs::write(&path, encode_frame(&overlay)).map_err(|e| unwritable(&path, e))?;
        }
        for e in &out.events {
            counts.record(e.kind);
            if let Some(log) = event_log.as_mut() {
                writeln!(log, "{}", e.to_json_line()).map_err(|err| unwritable(&events_path, err))?;
            }
        }
    }
    if let Some(mut log) = event_log {
        log.flush().map_err(|e| unwritable(&events_path, e))?;
    }

    let stats = summarize(&frame_ms, counts);
    if cfg.emit.stats {
        let path = out_dir.join("stats.json");
        let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
        fs::write(&path, text).map_err(|e| unwritable(&path, e))?;
    }
    Ok(stats)
}
