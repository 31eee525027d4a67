//! Run configuration. Every field has a default, so `{}` is a complete config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{EventError, EventParams, ZoneConfig};
use crate::gmm::{ModelError, ModelParams};
use crate::segmentation::Connectivity;
use crate::shadow::{ShadowError, ShadowParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Shadow(#[from] ShadowError),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error("{0}")]
    Invalid(String),
}

/// Where frames come from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum InputSource {
    /// `frame_*.ppm` files, processed in lexicographic order.
    Directory(PathBuf),
    /// Raw RGB24 frames on standard input.
    #[default]
    Stdin,
}

impl InputSource {
    /// `-` selects standard input, anything else is a directory.
    pub fn parse(s: &str) -> Self {
        if s == "-" {
            Self::Stdin
        } else {
            Self::Directory(PathBuf::from(s))
        }
    }
}

impl Serialize for InputSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Stdin => s.serialize_str("-"),
            Self::Directory(p) => s.serialize_str(&p.to_string_lossy()),
        }
    }
}

impl<'de> Deserialize<'de> for InputSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(|s| Self::parse(&s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationParams {
    pub connectivity: Connectivity,
    /// Blobs smaller than this are dropped; 0 keeps everything.
    pub min_area: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self { connectivity: Connectivity::Eight, min_area: 15 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EventsConfig {
    #[serde(flatten)]
    pub params: EventParams,
    pub zones: ZoneConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitFlags {
    pub masks: bool,
    pub overlays: bool,
    pub events: bool,
    pub stats: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self { masks: true, overlays: true, events: true, stats: true }
    }
}

impl EmitFlags {
    pub fn none() -> Self {
        Self { masks: false, overlays: false, events: false, stats: false }
    }

    /// Parses a comma-separated list such as `masks,events`.
    pub fn parse_list(list: &str) -> Result<Self, ConfigError> {
        let mut flags = Self::none();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "masks" => flags.masks = true,
                "overlays" => flags.overlays = true,
                "events" => flags.events = true,
                "stats" => flags.stats = true,
                other => return Err(ConfigError::Invalid(format!("unknown emit target `{other}`"))),
            }
        }
        Ok(flags)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSource,
    /// Required for raw standard-input streams.
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub output: PathBuf,
    /// Stop after this many frames.
    pub frames: Option<u64>,
    pub model: ModelParams,
    pub shadow: ShadowParams,
    pub segmentation: SegmentationParams,
    pub events: EventsConfig,
    pub emit: EmitFlags,
    /// Row bands processed in parallel during the model update.
    pub workers: usize,
    /// Decoded frames buffered ahead of processing; 0 decodes inline.
    pub queue_depth: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: InputSource::default(),
            width: None,
            height: None,
            output: PathBuf::from("out"),
            frames: None,
            model: ModelParams::default(),
            shadow: ShadowParams::default(),
            segmentation: SegmentationParams::default(),
            events: EventsConfig::default(),
            emit: EmitFlags::default(),
            workers: 1,
            queue_depth: 4,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Checks everything that does not depend on frame dimensions.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate()?;
        self.shadow.validate()?;
        self.events.params.validate()?;
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        if matches!((self.width, self.height), (Some(0), _) | (_, Some(0))) {
            return Err(ConfigError::Invalid("width and height must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmm::RhoMode;

    #[test]
    fn empty_object_is_valid() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.model.k, 3);
        assert_eq!(cfg.segmentation.min_area, 15);
        assert_eq!(cfg.events.params.n_static, 150);
    }

    #[test]
    fn nested_fields() {
        let cfg = RunConfig::from_json(
            r#"{
                "input": "frames", "output": "o",
                "model": {"alpha": 0.002, "rho_mode": "pdf_faithful"},
                "shadow": {"cd_max": 0.2},
                "segmentation": {"connectivity": "four", "min_area": 0},
                "events": {"n_static": 100, "zones": [{"name": "door", "rect": [0, 0, 10, 10]}]},
                "emit": {"overlays": false}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.input, InputSource::Directory("frames".into()));
        assert_eq!(cfg.model.alpha_learn, 0.002);
        assert_eq!(cfg.model.rho_mode, RhoMode::PdfFaithful);
        assert_eq!(cfg.shadow.cd_max, 0.2);
        assert_eq!(cfg.segmentation.connectivity, Connectivity::Four);
        assert_eq!(cfg.events.params.n_static, 100);
        assert_eq!(cfg.events.zones.zones[0].name, "door");
        assert!(!cfg.emit.overlays && cfg.emit.masks);
    }

    #[test]
    fn invalid_nested_params_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"model": {"k": 0}}"#), Err(ConfigError::Model(_))));
        assert!(matches!(
            RunConfig::from_json(r#"{"shadow": {"bd_low": 0.99}}"#),
            Err(ConfigError::Shadow(_))
        ));
        assert!(matches!(RunConfig::from_json(r#"{"workers": 0}"#), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::from_json(r#"{"bogus": 1}"#), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn emit_list() {
        let f = EmitFlags::parse_list("masks, events").unwrap();
        assert_eq!(f, EmitFlags { masks: true, overlays: false, events: true, stats: false });
        assert!(EmitFlags::parse_list("masks,video").is_err());
    }
}
