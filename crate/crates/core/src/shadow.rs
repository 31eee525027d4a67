//! Shadow refinement in RGB space.
//!
//! A foreground value `f` is compared against a background mean `b` through two
//! quantities: the brightness distortion (how far along the line through `b` the
//! projection of `f` lands, as a multiple of `b`) and the chromaticity distortion
//! (the perpendicular distance from `f` to that line, divided by `‖b‖`). A shadow
//! darkens a surface without changing its hue, so it shows up as a brightness
//! distortion below one with almost no chromaticity distortion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gmm::{PixelLabel, PixelModel, PixelValue};

/// Below this norm a background mean has no usable chromaticity line.
pub const MIN_BACKGROUND_NORM: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ShadowError {
    #[error("background mean is too close to black to define a chromaticity line")]
    DegenerateBackground,
    #[error("invalid shadow parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadowParams {
    pub bd_low: f64,
    pub bd_high: f64,
    pub cd_max: f64,
}

impl Default for ShadowParams {
    fn default() -> Self {
        Self { bd_low: 0.4, bd_high: 0.95, cd_max: 0.1 }
    }
}

impl ShadowParams {
    pub fn validate(&self) -> Result<(), ShadowError> {
        if !(self.bd_low > 0.0 && self.bd_low < self.bd_high && self.bd_high <= 1.0) {
            return Err(ShadowError::InvalidParams {
                name: "bd_low/bd_high",
                reason: format!(
                    "need 0 < bd_low < bd_high <= 1, got {} and {}",
                    self.bd_low, self.bd_high
                ),
            });
        }
        if !(self.cd_max > 0.0 && self.cd_max.is_finite()) {
            return Err(ShadowError::InvalidParams {
                name: "cd_max",
                reason: format!("must be positive, got {}", self.cd_max),
            });
        }
        Ok(())
    }
}

/// Final per-pixel class after shadow refinement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PixelClass {
    #[default]
    Background,
    Foreground,
    Shadow,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn background_norm_sq(b: &[f64; 3]) -> Result<f64, ShadowError> {
    let n2 = dot(b, b);
    if n2.sqrt() < MIN_BACKGROUND_NORM {
        Err(ShadowError::DegenerateBackground)
    } else {
        Ok(n2)
    }
}

/// `(f · b) / ‖b‖²`.
pub fn brightness_distortion(f: PixelValue, b: &[f64; 3]) -> Result<f64, ShadowError> {
    let n2 = background_norm_sq(b)?;
    Ok(dot(&f.0, b) / n2)
}

/// `‖f − BD·b‖ / ‖b‖`.
pub fn chromaticity_distortion(f: PixelValue, b: &[f64; 3]) -> Result<f64, ShadowError> {
    distortions(f, b).map(|(_, cd)| cd)
}

/// Brightness and chromaticity distortion in one pass.
pub fn distortions(f: PixelValue, b: &[f64; 3]) -> Result<(f64, f64), ShadowError> {
    let n2 = background_norm_sq(b)?;
    let bd = dot(&f.0, b) / n2;
    let r = [f.0[0] - bd * b[0], f.0[1] - bd * b[1], f.0[2] - bd * b[2]];
    Ok((bd, (dot(&r, &r) / n2).sqrt()))
}

/// Whether `f` falls inside the shadow cylinder around `b`. Degenerate backgrounds never do.
pub fn is_shadow_point(f: PixelValue, b: &[f64; 3], p: &ShadowParams) -> bool {
    match distortions(f, b) {
        Ok((bd, cd)) => bd >= p.bd_low && bd <= p.bd_high && cd <= p.cd_max,
        Err(_) => false,
    }
}

/// Promotes a mixture label to a [`PixelClass`], testing foreground values against
/// the means of the first `background_count` components.
pub fn refine_label(
    label: PixelLabel,
    f: PixelValue,
    model: &PixelModel,
    background_count: usize,
    p: &ShadowParams,
) -> PixelClass {
    match label {
        PixelLabel::Background => PixelClass::Background,
        PixelLabel::Foreground => {
            let shadow = model
                .components()
                .iter()
                .take(background_count)
                .any(|c| is_shadow_point(f, &c.mean, p));
            if shadow {
                PixelClass::Shadow
            } else {
                PixelClass::Foreground
            }
        }
    }
}
