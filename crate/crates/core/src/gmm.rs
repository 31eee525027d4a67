//! Per-pixel adaptive Gaussian mixture.
//!
//! Each pixel keeps up to `k` isotropic RGB Gaussians (covariance `σ²I`). Every new
//! observation is tested against the components in rank order (`w / σ`), the first
//! component within `d_match · σ` absorbs it, and the rest only decay. When nothing
//! matches, the lowest-weight component is replaced by a fresh, wide one centred on
//! the observation. The components whose cumulative weight first exceeds
//! `t_background` form the background set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// (2π)^(-3/2), the normalizer of a 3-variate standard Gaussian.
const INV_TWO_PI_POW_1_5: f64 = 0.063_493_635_934_240_97;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },
    #[error("component index {index} is not live (live count {live})")]
    ComponentNotLive { index: usize, live: usize },
}

/// An RGB observation with channels in `[0, 255]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PixelValue(pub [f64; 3]);

impl PixelValue {
    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Self([r, g, b])
    }

    pub fn from_rgb8(rgb: [u8; 3]) -> Self {
        Self([f64::from(rgb[0]), f64::from(rgb[1]), f64::from(rgb[2])])
    }

    #[inline]
    pub fn channels(&self) -> [f64; 3] {
        self.0
    }

    /// Squared Euclidean distance to `other`.
    #[inline]
    pub fn dist_sq(&self, other: &[f64; 3]) -> f64 {
        let d0 = self.0[0] - other[0];
        let d1 = self.0[1] - other[1];
        let d2 = self.0[2] - other[2];
        d0 * d0 + d1 * d1 + d2 * d2
    }
}

impl From<[u8; 3]> for PixelValue {
    fn from(rgb: [u8; 3]) -> Self {
        Self::from_rgb8(rgb)
    }
}

/// One mixture component: weight, RGB mean and a single shared variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: [f64; 3],
    pub variance: f64,
}

impl GaussianComponent {
    pub fn new(weight: f64, mean: PixelValue, variance: f64) -> Self {
        Self { weight, mean: mean.0, variance }
    }

    /// Sort key; higher means more likely background.
    #[inline]
    pub fn rank(&self) -> f64 {
        self.weight / self.variance.sqrt()
    }
}

/// How the mean/variance blending rate is derived from the learning rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    /// `ρ = α · g(z | μ, σ²I)`, evaluated at the pre-update component.
    PdfFaithful,
    /// `ρ = α`.
    #[default]
    FixedAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Components per pixel.
    pub k: usize,
    /// Weight learning rate α.
    #[serde(alias = "alpha")]
    pub alpha_learn: f64,
    /// Background proportion threshold T.
    pub t_background: f64,
    /// Match radius in standard deviations.
    pub d_match: f64,
    pub var_init: f64,
    pub w_init: f64,
    pub var_min: f64,
    pub rho_mode: RhoMode,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            k: 3,
            alpha_learn: 0.01,
            t_background: 0.7,
            d_match: 2.5,
            var_init: 225.0,
            w_init: 0.05,
            var_min: 4.0,
            rho_mode: RhoMode::FixedAlpha,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        fn bad(name: &'static str, reason: impl Into<String>) -> Result<(), ModelError> {
            Err(ModelError::InvalidParams { name, reason: reason.into() })
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.k == 0 || self.k > u8::MAX as usize {
            return bad("k", format!("must be in 1..=255, got {}", self.k));
        }
        if !open_unit(self.alpha_learn) {
            return bad("alpha_learn", format!("must be in (0, 1), got {}", self.alpha_learn));
        }
        if !open_unit(self.t_background) {
            return bad("t_background", format!("must be in (0, 1), got {}", self.t_background));
        }
        if !(self.d_match > 0.0 && self.d_match.is_finite()) {
            return bad("d_match", format!("must be positive, got {}", self.d_match));
        }
        if !(self.var_min > 0.0 && self.var_min.is_finite()) {
            return bad("var_min", format!("must be positive, got {}", self.var_min));
        }
        if !(self.var_init >= self.var_min && self.var_init.is_finite()) {
            return bad("var_init", format!("must be finite and >= var_min, got {}", self.var_init));
        }
        if !open_unit(self.w_init) {
            return bad("w_init", format!("must be in (0, 1), got {}", self.w_init));
        }
        Ok(())
    }
}

/// Binary decision produced by the mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PixelLabel {
    Background,
    Foreground,
}

/// Mixture for a single pixel, kept sorted by non-increasing rank.
///
/// Only the first `live_count()` slots exist; the vector never grows past `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelModel {
    components: Vec<GaussianComponent>,
}

/// Result of feeding one observation through [`process_pixel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PixelStep {
    pub label: PixelLabel,
    /// Post-sort position of the component that absorbed the observation.
    pub component: usize,
    /// Size of the background set.
    pub background_count: usize,
}

impl PixelModel {
    pub fn live_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn weight_sum(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    /// Builds a model from explicit components, sorting them by rank.
    ///
    /// Intended for tests and tools; the caller is responsible for weights summing to one.
    pub fn from_components(
        mut components: Vec<GaussianComponent>,
        params: &ModelParams,
    ) -> Result<Self, ModelError> {
        if components.is_empty() || components.len() > params.k {
            return Err(ModelError::InvalidParams {
                name: "components",
                reason: format!("expected 1..={} components, got {}", params.k, components.len()),
            });
        }
        components.sort_by(|a, b| b.rank().total_cmp(&a.rank()));
        let mut out = Vec::with_capacity(params.k);
        out.extend(components);
        Ok(Self { components: out })
    }

    /// Stable insertion sort by rank, returning the new index of `moved`.
    ///
    /// Mathematically only `moved` changes rank, but components scaled by the same
    /// factor can still drift apart by an ulp, so the whole vector is re-checked.
    fn resort(&mut self, moved: usize) -> usize {
        let c = &mut self.components;
        let mut pos = moved;
        for i in 1..c.len() {
            let mut j = i;
            while j > 0 && c[j].rank() > c[j - 1].rank() {
                c.swap(j, j - 1);
                if pos == j {
                    pos = j - 1;
                } else if pos == j - 1 {
                    pos = j;
                }
                j -= 1;
            }
        }
        pos
    }
}

/// Seeds a pixel with a single unit-weight component centred on its first observation.
pub fn init_pixel_model(first: PixelValue, params: &ModelParams) -> PixelModel {
    let mut components = Vec::with_capacity(params.k);
    components.push(GaussianComponent::new(1.0, first, params.var_init));
    PixelModel { components }
}

/// Index of the highest-rank component with `‖z − μ‖ < d · σ`.
pub fn match_gaussian(model: &PixelModel, z: PixelValue, params: &ModelParams) -> Option<usize> {
    let d2 = params.d_match * params.d_match;
    model
        .components
        .iter()
        .position(|c| z.dist_sq(&c.mean) < d2 * c.variance)
}

/// Isotropic 3-variate normal density.
pub fn component_pdf(c: &GaussianComponent, z: PixelValue) -> f64 {
    let var = c.variance;
    let sigma3 = var * var.sqrt();
    INV_TWO_PI_POW_1_5 / sigma3 * (-z.dist_sq(&c.mean) / (2.0 * var)).exp()
}

/// Blending rate for the mean and variance of a matched component.
pub fn rho_for(c: &GaussianComponent, z: PixelValue, params: &ModelParams) -> f64 {
    match params.rho_mode {
        RhoMode::FixedAlpha => params.alpha_learn,
        RhoMode::PdfFaithful => (params.alpha_learn * component_pdf(c, z)).clamp(0.0, 1.0),
    }
}

/// Applies the matched-component update and returns the component's new position.
pub fn update_on_match(
    model: &mut PixelModel,
    idx: usize,
    z: PixelValue,
    params: &ModelParams,
) -> Result<usize, ModelError> {
    let live = model.live_count();
    if idx >= live {
        return Err(ModelError::ComponentNotLive { index: idx, live });
    }
    let alpha = params.alpha_learn;
    let rho = rho_for(&model.components[idx], z, params);

    for c in model.components.iter_mut() {
        c.weight *= 1.0 - alpha;
    }
    let c = &mut model.components[idx];
    c.weight += alpha;

    let zc = z.channels();
    for (m, zi) in c.mean.iter_mut().zip(zc) {
        *m = (1.0 - rho) * *m + rho * zi;
    }
    // innovation against the already-updated mean
    let innovation = z.dist_sq(&c.mean);
    c.variance = ((1.0 - rho) * c.variance + rho * innovation).max(params.var_min);

    Ok(model.resort(idx))
}

/// Decays every component, inserts a fresh one for `z` (appending while there is
/// room, otherwise replacing the lowest weight), renormalizes, and returns the new
/// component's position.
pub fn update_on_no_match(model: &mut PixelModel, z: PixelValue, params: &ModelParams) -> usize {
    let fresh = GaussianComponent::new(params.w_init, z, params.var_init);
    for c in model.components.iter_mut() {
        c.weight *= 1.0 - params.alpha_learn;
    }
    let slot = if model.live_count() < params.k {
        model.components.push(fresh);
        model.live_count() - 1
    } else {
        // lowest weight; on ties the lowest-ranked one goes
        let mut slot = 0;
        for (i, c) in model.components.iter().enumerate() {
            if c.weight <= model.components[slot].weight {
                slot = i;
            }
        }
        model.components[slot] = fresh;
        slot
    };
    let total = model.weight_sum();
    for c in model.components.iter_mut() {
        c.weight /= total;
    }
    model.resort(slot)
}

/// Size of the smallest rank-ordered prefix whose weight strictly exceeds `t_background`.
pub fn background_count(model: &PixelModel, params: &ModelParams) -> usize {
    let mut acc = 0.0;
    for (i, c) in model.components.iter().enumerate() {
        acc += c.weight;
        if acc > params.t_background {
            return i + 1;
        }
    }
    model.live_count()
}

/// Match, update and classify one observation.
pub fn process_pixel(model: &mut PixelModel, z: PixelValue, params: &ModelParams) -> PixelStep {
    let component = match match_gaussian(model, z, params) {
        Some(idx) => update_on_match(model, idx, z, params).expect("matched index is live"),
        None => update_on_no_match(model, z, params),
    };
    let background_count = background_count(model, params);
    let label = if component < background_count {
        PixelLabel::Background
    } else {
        PixelLabel::Foreground
    };
    PixelStep { label, component, background_count }
}
