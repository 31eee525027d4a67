//! Scene and config fixtures shared by the integration suites.

#![allow(dead_code)]

use agmm::eval::{Actor, BackgroundSpec, Path, SceneSpec, ShadowCaster, Waypoint};
use agmm::events::{Zone, ZoneConfig};
use agmm::io::{EmitFlags, RunConfig};

pub const HALT_FRAME: u64 = 50;
pub const N_STATIC: u32 = 100;
/// Learning rate slow enough that a halted object outlives `N_STATIC`.
pub const ABANDON_ALPHA: f64 = 0.002;
pub const ABANDON_BG: [u8; 3] = [100, 120, 110];
pub const ABANDON_SQUARE: [u8; 3] = [200, 40, 40];
pub const SQUARE_REST: (usize, usize) = (140, 50);

/// A 20x20 square enters at frame 5, slides right at 3 px/frame and stops at frame 50.
pub fn abandoned_scene(frames: u64) -> SceneSpec {
    SceneSpec {
        width: 160,
        height: 120,
        frames,
        background: BackgroundSpec { color: ABANDON_BG, noise_sigma: 2.0, flicker: None, illumination: vec![] },
        actors: vec![Actor {
            size: [20, 20],
            color: ABANDON_SQUARE,
            path: Path {
                trajectory: vec![
                    Waypoint { frame: 5, x: 5.0, y: 50.0 },
                    Waypoint { frame: HALT_FRAME, x: SQUARE_REST.0 as f64, y: SQUARE_REST.1 as f64 },
                ],
                halt_at: Some(HALT_FRAME),
                vanish_at: None,
            },
        }],
        shadow_caster: None,
    }
}

pub fn abandoned_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.model.alpha_learn = ABANDON_ALPHA;
    cfg.events.params.n_static = N_STATIC;
    cfg.events.params.eps_move = 2.0;
    cfg.events.zones = ZoneConfig { zones: vec![Zone { name: "gate".into(), rect: [60, 40, 80, 90] }] };
    cfg.emit = EmitFlags::default();
    cfg.queue_depth = 2;
    cfg
}

pub const SHADOW_ON: u64 = 200;
pub const SHADOW_OFF: u64 = 220;

/// Uniform noisy backdrop; a 60x40 region is dimmed by `gain` for frames 200..220.
pub fn shadow_band_scene(gain: f64) -> SceneSpec {
    SceneSpec {
        width: 160,
        height: 120,
        frames: 240,
        background: BackgroundSpec { color: [120, 140, 130], noise_sigma: 2.0, flicker: None, illumination: vec![] },
        actors: vec![],
        shadow_caster: Some(ShadowCaster {
            size: [60, 40],
            gain,
            path: Path {
                trajectory: vec![Waypoint { frame: SHADOW_ON, x: 50.0, y: 40.0 }],
                halt_at: None,
                vanish_at: Some(SHADOW_OFF),
            },
        }),
    }
}
