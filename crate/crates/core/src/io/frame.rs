use crate::gmm::PixelValue;
use crate::shadow::PixelClass;

use super::PipelineError;

pub const FOREGROUND_COLOR: [u8; 3] = [255, 0, 0];
pub const SHADOW_COLOR: [u8; 3] = [0, 255, 0];

/// An 8-bit RGB frame, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
    pub index: u64,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>, index: u64) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count must equal width * height");
        Self { width, height, pixels, index }
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3], index: u64) -> Self {
        Self::new(width, height, vec![rgb; width * height], index)
    }

    pub fn value(&self, i: usize) -> PixelValue {
        PixelValue::from_rgb8(self.pixels[i])
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Per-pixel classification raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    pub width: usize,
    pub height: usize,
    pub classes: Vec<PixelClass>,
}

impl ClassMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, classes: vec![PixelClass::Background; width * height] }
    }

    pub fn from_classes(width: usize, height: usize, classes: Vec<PixelClass>) -> Self {
        assert_eq!(classes.len(), width * height, "class count must equal width * height");
        Self { width, height, classes }
    }

    pub fn count(&self, class: PixelClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Paints foreground red and shadow green over a copy of `frame`.
pub fn render_overlay(frame: &Frame, cm: &ClassMap) -> Result<Frame, PipelineError> {
    if frame.dims() != cm.dims() {
        return Err(PipelineError::DimensionMismatch { expected: frame.dims(), found: cm.dims() });
    }
    let pixels = frame
        .pixels
        .iter()
        .zip(&cm.classes)
        .map(|(&px, class)| match class {
            PixelClass::Background => px,
            PixelClass::Foreground => FOREGROUND_COLOR,
            PixelClass::Shadow => SHADOW_COLOR,
        })
        .collect();
    Ok(Frame { pixels, ..frame.clone() })
}
