//! Raster types and the preprocessing applied before scanning: thresholding,
//! rotation to make dashes horizontal, and cropping to a region of interest.

mod pnm;
mod png;
mod transform;

pub use self::png::load_png;
pub use pnm::{load_pgm, save_gray_pgm, save_pgm};
pub use transform::{crop, rotate};

use crate::error::{argument, Result};

/// 8-bit luminance image, row-major, origin at the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }
}

/// Two-level raster. `true` marks a dash-line (foreground) pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, false)
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    /// Builds a mask from rows of text where `#` is foreground and anything
    /// else is background. Handy for small fixtures.
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if rows.iter().any(|r| r.chars().count() != width) {
            return Err(argument("ragged ascii mask rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        Self::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    /// Signed lookup; anything outside the raster reads as background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.get(x as usize, y as usize)
    }

    /// Sets every pixel of the rectangle, clipped to the raster bounds.
    pub fn fill_rect(&mut self, x0: usize, y0: usize, width: usize, height: usize, value: bool) {
        let x1 = x0.saturating_add(width).min(self.width);
        let y1 = y0.saturating_add(height).min(self.height);
        for y in y0.min(y1)..y1 {
            self.data[y * self.width + x0.min(x1)..y * self.width + x1].fill(value);
        }
    }

    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn row(&self, y: usize) -> &[bool] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Pixel-wise OR with a mask of the same size.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(crate::Error::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
        Ok(())
    }

    /// Foreground as 255, background as 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v { 255 } else { 0 }).collect(),
        }
    }
}

/// A rectangle in pixel coordinates: top-left `(x0, y0)` plus extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RectRegion {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl RectRegion {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { x0, y0, width, height }
    }

    pub fn fits_within(&self, width: usize, height: usize) -> bool {
        self.width >= 1
            && self.height >= 1
            && self.x0.checked_add(self.width).is_some_and(|x1| x1 <= width)
            && self.y0.checked_add(self.height).is_some_and(|y1| y1 <= height)
    }
}

/// Pixels with luminance `>= threshold` become foreground.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryMask {
    BinaryMask {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| v >= threshold).collect(),
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(argument(format!(
            "raster dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(argument(format!(
            "pixel buffer of length {len} does not match {width}x{height}"
        ))),
    }
}
