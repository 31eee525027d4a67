//! Synthetic scenes with analytically exact ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::io::{ClassMap, Frame};
use crate::shadow::PixelClass;

/// Top-left position of a moving rectangle at a given frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub frame: u64,
    pub x: f64,
    pub y: f64,
}

/// A rectangle that moves along waypoints.
///
/// It appears at the first waypoint's frame, moves linearly between waypoints and
/// rests at the last one. `halt_at` freezes it early; `vanish_at` removes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub trajectory: Vec<Waypoint>,
    #[serde(default)]
    pub halt_at: Option<u64>,
    #[serde(default)]
    pub vanish_at: Option<u64>,
}

impl Path {
    pub fn stationary(x: f64, y: f64, from: u64) -> Self {
        Self { trajectory: vec![Waypoint { frame: from, x, y }], halt_at: None, vanish_at: None }
    }

    /// Integer top-left corner at `frame`, or `None` while not visible.
    pub fn position(&self, frame: u64) -> Option<(usize, usize)> {
        let first = self.trajectory.first()?;
        if frame < first.frame || self.vanish_at.is_some_and(|v| frame >= v) {
            return None;
        }
        let t = self.halt_at.map_or(frame, |h| frame.min(h));
        let (x, y) = match self.trajectory.windows(2).find(|w| t < w[1].frame) {
            Some(w) => {
                let (a, b) = (w[0], w[1]);
                let u = (t - a.frame) as f64 / (b.frame - a.frame) as f64;
                (a.x + u * (b.x - a.x), a.y + u * (b.y - a.y))
            }
            None => {
                let last = self.trajectory.last().expect("non-empty");
                (last.x, last.y)
            }
        };
        Some(((x + 0.5).floor() as usize, (y + 0.5).floor() as usize))
    }

    fn validate(&self, what: &str, size: [usize; 2], width: usize, height: usize) -> Result<(), EvalError> {
        let oob = |reason: String| Err(EvalError::SpecOutOfBounds(format!("{what}: {reason}")));
        if self.trajectory.is_empty() {
            return oob("trajectory is empty".into());
        }
        if size[0] == 0 || size[1] == 0 {
            return oob(format!("size {size:?} is empty"));
        }
        if self.trajectory.windows(2).any(|w| w[1].frame <= w[0].frame) {
            return oob("waypoint frames must increase strictly".into());
        }
        for wp in &self.trajectory {
            let fits = wp.x >= 0.0
                && wp.y >= 0.0
                && (wp.x + 0.5).floor() as usize + size[0] <= width
                && (wp.y + 0.5).floor() as usize + size[1] <= height;
            if !fits {
                return oob(format!("waypoint {wp:?} puts a {size:?} rectangle outside {width}x{height}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Actor {
    /// `[width, height]`.
    pub size: [usize; 2],
    pub color: [u8; 3],
    #[serde(flatten)]
    pub path: Path,
}

/// A region whose background is multiplied by `gain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowCaster {
    pub size: [usize; 2],
    pub gain: f64,
    #[serde(flatten)]
    pub path: Path,
}

/// Region alternating between two colours, a bimodal background.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flicker {
    /// Inclusive `(x0, y0, x1, y1)`.
    pub rect: [usize; 4],
    pub colors: [[u8; 3]; 2],
    /// Frames spent on each colour before switching.
    #[serde(default = "one")]
    pub period: u64,
}

fn one() -> u64 {
    1
}

/// Illumination gain keyframe; gains are interpolated linearly between keys.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainKey {
    pub frame: u64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackgroundSpec {
    pub color: [u8; 3],
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub flicker: Option<Flicker>,
    #[serde(default)]
    pub illumination: Vec<GainKey>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub frames: u64,
    pub background: BackgroundSpec,
    #[serde(default)]
    pub actors: Vec<Actor>,
    #[serde(default)]
    pub shadow_caster: Option<ShadowCaster>,
}

impl SceneSpec {
    /// Reference scene at 160x120: a slowly brightening noisy backdrop, a walking
    /// figure trailed by its shadow, and a second object crossing diagonally.
    pub fn standard() -> Self {
        let wp = |frame, x, y| Waypoint { frame, x, y };
        Self {
            width: 160,
            height: 120,
            frames: 300,
            background: BackgroundSpec {
                color: [120, 140, 130],
                noise_sigma: 2.0,
                flicker: None,
                illumination: vec![GainKey { frame: 0, gain: 1.0 }, GainKey { frame: 299, gain: 1.04 }],
            },
            actors: vec![
                Actor {
                    size: [14, 30],
                    color: [180, 60, 50],
                    path: Path {
                        trajectory: vec![wp(20, 8.0, 30.0), wp(140, 138.0, 30.0), wp(260, 8.0, 30.0)],
                        halt_at: None,
                        vanish_at: Some(280),
                    },
                },
                Actor {
                    size: [20, 20],
                    color: [40, 60, 170],
                    path: Path {
                        trajectory: vec![wp(60, 130.0, 90.0), wp(200, 10.0, 75.0)],
                        halt_at: None,
                        vanish_at: Some(220),
                    },
                },
            ],
            shadow_caster: Some(ShadowCaster {
                size: [26, 10],
                gain: 0.6,
                path: Path {
                    trajectory: vec![wp(20, 2.0, 60.0), wp(140, 132.0, 60.0), wp(260, 2.0, 60.0)],
                    halt_at: None,
                    vanish_at: Some(280),
                },
            }),
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let oob = |reason: String| Err(EvalError::SpecOutOfBounds(reason));
        if self.width == 0 || self.height == 0 || self.frames == 0 {
            return oob(format!("empty scene {}x{}x{}", self.width, self.height, self.frames));
        }
        let bg = &self.background;
        if !(bg.noise_sigma >= 0.0 && bg.noise_sigma.is_finite()) {
            return oob(format!("noise_sigma {} must be >= 0", bg.noise_sigma));
        }
        if bg.illumination.iter().any(|k| !(k.gain > 0.0 && k.gain.is_finite())) {
            return oob("illumination gains must be positive".into());
        }
        if bg.illumination.windows(2).any(|w| w[1].frame <= w[0].frame) {
            return oob("illumination keyframes must increase strictly".into());
        }
        if let Some(f) = &bg.flicker {
            let [x0, y0, x1, y1] = f.rect;
            if x0 > x1 || y0 > y1 || x1 >= self.width || y1 >= self.height || f.period == 0 {
                return oob(format!("flicker rect {:?} / period {} invalid", f.rect, f.period));
            }
        }
        for (i, a) in self.actors.iter().enumerate() {
            a.path.validate(&format!("actor {i}"), a.size, self.width, self.height)?;
        }
        if let Some(s) = &self.shadow_caster {
            if !(s.gain > 0.0 && s.gain < 1.0) {
                return oob(format!("shadow gain {} must be in (0, 1)", s.gain));
            }
            s.path.validate("shadow caster", s.size, self.width, self.height)?;
        }
        Ok(())
    }

    fn illumination(&self, frame: u64) -> f64 {
        let keys = &self.background.illumination;
        let (Some(first), Some(last)) = (keys.first(), keys.last()) else {
            return 1.0;
        };
        if frame <= first.frame {
            return first.gain;
        }
        match keys.windows(2).find(|w| frame < w[1].frame) {
            Some(w) => {
                let u = (frame - w[0].frame) as f64 / (w[1].frame - w[0].frame) as f64;
                w[0].gain + u * (w[1].gain - w[0].gain)
            }
            None => last.gain,
        }
    }
}

/// Reference class maps, one per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub frames: Vec<ClassMap>,
}

fn inside(x: usize, y: usize, origin: (usize, usize), size: [usize; 2]) -> bool {
    x >= origin.0 && x < origin.0 + size[0] && y >= origin.1 && y < origin.1 + size[1]
}

/// Renders every frame of `spec` and its ground truth. Identical seeds give
/// bit-identical output.
pub fn generate_scene(spec: &SceneSpec, seed: u64) -> Result<(Vec<Frame>, GroundTruth), EvalError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = spec.background.noise_sigma;
    let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("finite sigma"));

    let mut frames = Vec::with_capacity(spec.frames as usize);
    let mut truth = Vec::with_capacity(spec.frames as usize);
    for t in 0..spec.frames {
        let gain = spec.illumination(t);
        let flicker = spec.background.flicker.as_ref().map(|f| (f, f.colors[((t / f.period) % 2) as usize]));
        let actors: Vec<_> = spec
            .actors
            .iter()
            .filter_map(|a| a.path.position(t).map(|p| (p, a)))
            .collect();
        let shadow = spec
            .shadow_caster
            .as_ref()
            .and_then(|s| s.path.position(t).map(|p| (p, s)));

        let mut pixels = Vec::with_capacity(w * h);
        let mut classes = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let base = match flicker {
                    Some((f, c)) if x >= f.rect[0] && x <= f.rect[2] && y >= f.rect[1] && y <= f.rect[3] => c,
                    _ => spec.background.color,
                };
                let mut value = base.map(|c| f64::from(c) * gain);
                let mut class = PixelClass::Background;
                if let Some((origin, s)) = shadow {
                    if inside(x, y, origin, s.size) {
                        value = value.map(|c| c * s.gain);
                        class = PixelClass::Shadow;
                    }
                }
                // later actors are drawn on top
                if let Some((_, a)) = actors.iter().rev().find(|(origin, a)| inside(x, y, *origin, a.size)) {
                    value = a.color.map(f64::from);
                    class = PixelClass::Foreground;
                }
                let rgb = value.map(|c| {
                    let n = noise.as_ref().map_or(0.0, |d| d.sample(&mut rng));
                    (c + n).round().clamp(0.0, 255.0) as u8
                });
                pixels.push(rgb);
                classes.push(class);
            }
        }
        frames.push(Frame::new(w, h, pixels, t));
        truth.push(ClassMap::from_classes(w, h, classes));
    }
    Ok((frames, GroundTruth { frames: truth }))
}
