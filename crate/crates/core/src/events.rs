//! Blob tracking and surveillance events.
//!
//! Blobs are tied to tracks frame to frame by greedy nearest-centroid association.
//! A track whose centroid stays put for `n_static` consecutive frames raises an
//! abandoned-object alarm once; a track whose box overlaps a configured zone raises
//! one intrusion alarm per zone per overlap episode. Because the mixture slowly
//! absorbs anything that stops moving, `n_static` has to stay below the absorption
//! time for the configured learning rate, otherwise the blob is gone before the
//! alarm can fire.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segmentation::Blob;

#[derive(Debug, Error, PartialEq)]
pub enum EventError {
    #[error("invalid event parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
    #[error("zone `{name}` {rect:?} does not fit a {width}x{height} frame")]
    ZoneOutOfBounds { name: String, rect: [usize; 4], width: usize, height: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EventParams {
    /// Largest centroid jump, in pixels, that still continues a track.
    pub max_assoc_dist: f64,
    /// Centroid displacement below which a track counts as static for the frame.
    pub eps_move: f64,
    /// Consecutive static frames before an abandoned-object alarm.
    pub n_static: u32,
    /// Frames a track may go unseen before it is dropped.
    pub track_timeout: u32,
}

impl Default for EventParams {
    fn default() -> Self {
        Self { max_assoc_dist: 20.0, eps_move: 2.0, n_static: 150, track_timeout: 10 }
    }
}

impl EventParams {
    // negated so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), EventError> {
        let bad = |name, v: f64| EventError::InvalidParams { name, reason: format!("must be positive, got {v}") };
        if !(self.max_assoc_dist > 0.0) {
            return Err(bad("max_assoc_dist", self.max_assoc_dist));
        }
        if !(self.eps_move > 0.0) {
            return Err(bad("eps_move", self.eps_move));
        }
        if self.n_static == 0 {
            return Err(bad("n_static", 0.0));
        }
        if self.track_timeout == 0 {
            return Err(bad("track_timeout", 0.0));
        }
        Ok(())
    }
}

/// Named inclusive rectangle `(x0, y0, x1, y1)` in pixel coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub name: String,
    pub rect: [usize; 4],
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneConfig {
    pub zones: Vec<Zone>,
}

impl ZoneConfig {
    pub fn validate(&self, width: usize, height: usize) -> Result<(), EventError> {
        for z in &self.zones {
            let [x0, y0, x1, y1] = z.rect;
            if x0 > x1 || y0 > y1 || x1 >= width || y1 >= height {
                return Err(EventError::ZoneOutOfBounds {
                    name: z.name.clone(),
                    rect: z.rect,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Intrusion,
    #[serde(rename = "abandoned")]
    AbandonedObject,
    MotionStarted,
}

/// One line of the event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub frame: u64,
    pub kind: EventKind,
    pub track: u64,
    pub bbox: [usize; 4],
    pub zone: Option<String>,
}

impl Event {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackedBlob {
    pub track_id: u64,
    pub last_centroid: (f64, f64),
    pub last_bbox: [usize; 4],
    pub frames_static: u32,
    pub frames_seen: u32,
    pub last_seen_frame: u64,
    pub alarm_raised: bool,
    /// Zones the track currently overlaps and has already alarmed on.
    pub zones_inside: BTreeSet<String>,
}

/// Outcome of [`associate_blobs`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Association {
    /// `(blob index, track id)` for every blob of the frame.
    pub assignments: Vec<(usize, u64)>,
    pub new_tracks: Vec<u64>,
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Greedy nearest-centroid pairs `(track index, blob index, distance)` within the gate.
///
/// Pairs are taken in ascending distance; ties break on track index, then blob index.
pub fn greedy_pairs(
    track_centroids: &[(f64, f64)],
    blob_centroids: &[(f64, f64)],
    max_dist: f64,
) -> Vec<(usize, usize, f64)> {
    let mut candidates: Vec<(usize, usize, f64)> = track_centroids
        .iter()
        .enumerate()
        .flat_map(|(ti, &tc)| {
            blob_centroids
                .iter()
                .enumerate()
                .map(move |(bi, &bc)| (ti, bi, distance(tc, bc)))
        })
        .filter(|&(_, _, d)| d <= max_dist)
        .collect();
    candidates.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    let mut track_used = vec![false; track_centroids.len()];
    let mut blob_used = vec![false; blob_centroids.len()];
    let mut pairs = Vec::new();
    for (ti, bi, d) in candidates {
        if !track_used[ti] && !blob_used[bi] {
            track_used[ti] = true;
            blob_used[bi] = true;
            pairs.push((ti, bi, d));
        }
    }
    pairs
}

/// Matches this frame's blobs to tracks, opens tracks for leftovers and drops stale ones.
pub fn associate_blobs(
    tracks: &mut Vec<TrackedBlob>,
    blobs: &[Blob],
    frame_index: u64,
    p: &EventParams,
    next_track_id: &mut u64,
) -> Association {
    let track_centroids: Vec<_> = tracks.iter().map(|t| t.last_centroid).collect();
    let blob_centroids: Vec<_> = blobs.iter().map(|b| b.centroid).collect();
    let pairs = greedy_pairs(&track_centroids, &blob_centroids, p.max_assoc_dist);

    let mut out = Association::default();
    let mut blob_taken = vec![false; blobs.len()];
    for (ti, bi, d) in pairs {
        let t = &mut tracks[ti];
        let b = &blobs[bi];
        t.frames_static = if d < p.eps_move { t.frames_static + 1 } else { 0 };
        t.frames_seen += 1;
        t.last_centroid = b.centroid;
        t.last_bbox = b.bbox;
        t.last_seen_frame = frame_index;
        blob_taken[bi] = true;
        out.assignments.push((bi, t.track_id));
    }

    tracks.retain(|t| frame_index - t.last_seen_frame < u64::from(p.track_timeout));

    for (bi, b) in blobs.iter().enumerate().filter(|(bi, _)| !blob_taken[*bi]) {
        let id = *next_track_id;
        *next_track_id += 1;
        tracks.push(TrackedBlob {
            track_id: id,
            last_centroid: b.centroid,
            last_bbox: b.bbox,
            frames_static: 0,
            frames_seen: 1,
            last_seen_frame: frame_index,
            alarm_raised: false,
            zones_inside: BTreeSet::new(),
        });
        out.assignments.push((bi, id));
        out.new_tracks.push(id);
    }
    out.assignments.sort_unstable();
    out
}

/// Abandoned-object alarms for tracks seen this frame that just reached `n_static`.
pub fn detect_static(tracks: &mut [TrackedBlob], frame_index: u64, p: &EventParams) -> Vec<Event> {
    tracks
        .iter_mut()
        .filter(|t| t.last_seen_frame == frame_index && !t.alarm_raised && t.frames_static >= p.n_static)
        .map(|t| {
            t.alarm_raised = true;
            Event {
                frame: frame_index,
                kind: EventKind::AbandonedObject,
                track: t.track_id,
                bbox: t.last_bbox,
                zone: None,
            }
        })
        .collect()
}

pub fn rects_intersect(a: &[usize; 4], b: &[usize; 4]) -> bool {
    a[0] <= b[2] && b[0] <= a[2] && a[1] <= b[3] && b[1] <= a[3]
}

/// Intrusion alarms for tracks seen this frame; a track re-arms for a zone once it
/// leaves it.
pub fn detect_intrusion(tracks: &mut [TrackedBlob], zones: &ZoneConfig, frame_index: u64) -> Vec<Event> {
    let mut events = Vec::new();
    for t in tracks.iter_mut() {
        if t.last_seen_frame != frame_index {
            t.zones_inside.clear();
            continue;
        }
        for z in &zones.zones {
            if rects_intersect(&t.last_bbox, &z.rect) {
                if t.zones_inside.insert(z.name.clone()) {
                    events.push(Event {
                        frame: frame_index,
                        kind: EventKind::Intrusion,
                        track: t.track_id,
                        bbox: t.last_bbox,
                        zone: Some(z.name.clone()),
                    });
                }
            } else {
                t.zones_inside.remove(&z.name);
            }
        }
    }
    events
}

/// Per-stream tracking state.
#[derive(Clone, Debug)]
pub struct EventTracker {
    params: EventParams,
    zones: ZoneConfig,
    tracks: Vec<TrackedBlob>,
    next_track_id: u64,
}

impl EventTracker {
    pub fn new(params: EventParams, zones: ZoneConfig) -> Self {
        Self { params, zones, tracks: Vec::new(), next_track_id: 1 }
    }

    pub fn tracks(&self) -> &[TrackedBlob] {
        &self.tracks
    }

    /// Runs association, then motion, intrusion and abandoned-object detection for one frame.
    pub fn step(&mut self, frame_index: u64, blobs: &[Blob]) -> Vec<Event> {
        let assoc = associate_blobs(&mut self.tracks, blobs, frame_index, &self.params, &mut self.next_track_id);
        let mut events: Vec<Event> = assoc
            .new_tracks
            .iter()
            .map(|&id| {
                let t = self.tracks.iter().find(|t| t.track_id == id).expect("new track exists");
                Event {
                    frame: frame_index,
                    kind: EventKind::MotionStarted,
                    track: id,
                    bbox: t.last_bbox,
                    zone: None,
                }
            })
            .collect();
        events.extend(detect_intrusion(&mut self.tracks, &self.zones, frame_index));
        events.extend(detect_static(&mut self.tracks, frame_index, &self.params));
        events
    }
}
