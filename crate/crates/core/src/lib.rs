//! Adaptive Gaussian-mixture background subtraction for surveillance video.
//!
//! The crate is organised as a per-frame pipeline:
//!
//! 1. [`gmm`] keeps an adaptive mixture of isotropic RGB Gaussians per pixel and labels
//!    each observation background or foreground.
//! 2. [`shadow`] reclassifies foreground pixels that are a darkened, hue-preserving copy
//!    of a background mean as shadow.
//! 3. [`segmentation`] labels connected foreground regions and summarises them as blobs.
//! 4. [`events`] tracks blobs over time and raises motion, intrusion and
//!    abandoned-object alarms.
//!
//! [`io`] wires these together behind a config file and netpbm frame I/O, and [`eval`]
//! generates synthetic scenes with exact ground truth for scoring and benchmarking.

pub mod eval;
pub mod events;
pub mod gmm;
pub mod io;
pub mod segmentation;
pub mod shadow;

pub use gmm::{ModelParams, PixelLabel, PixelModel, PixelValue, RhoMode};
pub use shadow::{PixelClass, ShadowParams};
