//! Binary silhouettes: validation against the pre-shape conditions, hole
//! repair, area and the fixed-area normalization.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::edt::distance_transform;
use crate::label::{label_components, Connectivity};
use crate::transform::{warp_with_phase, Linear};
use crate::{Error, Result};

/// Row-major boolean raster, `true` = foreground.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

/// Inclusive pixel bounds of the foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Bounds {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::BadDimensions { width, height, len: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    /// All-background mask. Panics on a zero dimension.
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> bool>(width: usize, height: usize, mut f: F) -> Self {
        let mut mask = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                mask.bits[y * width + x] = f(x, y);
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-canvas coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn bounds(&self) -> Option<Bounds> {
        let mut b: Option<Bounds> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                b = Some(match b {
                    None => Bounds { x0: x, y0: y, x1: x, y1: y },
                    Some(b) => Bounds {
                        x0: b.x0.min(x),
                        y0: b.y0.min(y),
                        x1: b.x1.max(x),
                        y1: b.y1.max(y),
                    },
                });
            }
        }
        b
    }

    /// Smallest number of background pixels between the foreground and any
    /// canvas edge. `None` for an empty mask.
    pub fn margin(&self) -> Option<usize> {
        self.bounds().map(|b| {
            b.x0.min(b.y0).min(self.width - 1 - b.x1).min(self.height - 1 - b.y1)
        })
    }

    /// Copy of the foreground bounding box. `None` for an empty mask.
    pub fn cropped(&self) -> Option<BinaryMask> {
        let b = self.bounds()?;
        Some(BinaryMask::from_fn(b.width(), b.height(), |x, y| self.get(b.x0 + x, b.y0 + y)))
    }

    /// Adds `margin` background pixels on every side.
    pub fn padded(&self, margin: usize) -> BinaryMask {
        let (w, h) = (self.width + 2 * margin, self.height + 2 * margin);
        let mut out = BinaryMask::empty(w, h);
        for y in 0..self.height {
            let src = &self.bits[y * self.width..(y + 1) * self.width];
            let row = (y + margin) * w + margin;
            out.bits[row..row + self.width].copy_from_slice(src);
        }
        out
    }

    /// Centroid of the foreground pixel centres, pixel `(x, y)` sitting at
    /// `(x, y)`.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let b = self.bounds()?;
        let (mut sx, mut sy, mut n) = (0u64, 0u64, 0u64);
        for y in b.y0..=b.y1 {
            for x in b.x0..=b.x1 {
                if self.get(x, y) {
                    sx += (x - b.x0) as u64;
                    sy += (y - b.y0) as u64;
                    n += 1;
                }
            }
        }
        Some((b.x0 as f64 + sx as f64 / n as f64, b.y0 as f64 + sy as f64 / n as f64))
    }

    /// Lossless rotation by `quarters` x 90 degrees, clockwise on screen
    /// (y axis pointing down).
    pub fn rotate_quarter(&self, quarters: i32) -> BinaryMask {
        let (w, h) = (self.width, self.height);
        match quarters.rem_euclid(4) {
            0 => self.clone(),
            1 => BinaryMask::from_fn(h, w, |x, y| self.get(y, h - 1 - x)),
            2 => BinaryMask::from_fn(w, h, |x, y| self.get(w - 1 - x, h - 1 - y)),
            _ => BinaryMask::from_fn(h, w, |x, y| self.get(w - 1 - y, x)),
        }
    }

    /// Lossless flip about the horizontal axis (row `y` becomes row `h-1-y`).
    pub fn reflect_x(&self) -> BinaryMask {
        let h = self.height;
        BinaryMask::from_fn(self.width, h, |x, y| self.get(x, h - 1 - y))
    }

    /// Euclidean dilation by a disk of radius `radius` pixels. The canvas grows
    /// by `ceil(radius)` on every side so nothing is clipped.
    pub fn dilated(&self, radius: f64) -> BinaryMask {
        let grow = libm::ceil(radius.max(0.0)) as usize;
        let padded = self.padded(grow);
        if self.is_empty() {
            return padded;
        }
        let field = distance_transform(&padded);
        let limit = radius * radius;
        let bits = field.squared().iter().map(|&d| (d as f64) <= limit).collect();
        BinaryMask { width: padded.width, height: padded.height, bits }
    }

    /// Keeps only the largest 8-connected foreground component (first in
    /// raster order on ties).
    pub fn largest_component(&self) -> BinaryMask {
        let labels = label_components(self.width, self.height, Connectivity::Eight, |i| self.bits[i]);
        let Some((best, _)) = labels
            .sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            return self.clone();
        };
        let keep = best as u32 + 1;
        let bits = labels.labels.iter().map(|&l| l == keep).collect();
        BinaryMask { width: self.width, height: self.height, bits }
    }
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMask({}x{}, area {})", self.width, self.height, self.area())?;
        if self.width <= 64 && self.height <= 64 {
            for y in 0..self.height {
                f.write_str("\n")?;
                for x in 0..self.width {
                    f.write_str(if self.get(x, y) { "#" } else { "." })?;
                }
            }
        }
        Ok(())
    }
}

/// Connectivity and hole report for a mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeValidation {
    pub connected: bool,
    pub hole_free: bool,
    pub component_count: usize,
    pub hole_count: usize,
    /// Total pixel count of all holes.
    pub hole_area: usize,
}

impl ShapeValidation {
    pub fn is_valid(&self) -> bool {
        self.connected && self.hole_free
    }
}

/// Foreground components use 8-connectivity; holes are 4-connected background
/// components that do not touch the canvas border.
pub fn validate_shape(mask: &BinaryMask) -> ShapeValidation {
    let fg = label_components(mask.width, mask.height, Connectivity::Eight, |i| mask.bits[i]);
    let bg = label_components(mask.width, mask.height, Connectivity::Four, |i| !mask.bits[i]);
    let touching = bg.touching_border();
    let (mut hole_count, mut hole_area) = (0, 0);
    for (k, &size) in bg.sizes.iter().enumerate() {
        if !touching[k + 1] {
            hole_count += 1;
            hole_area += size;
        }
    }
    ShapeValidation {
        connected: fg.count() == 1,
        hole_free: hole_count == 0,
        component_count: fg.count(),
        hole_count,
        hole_area,
    }
}

/// Turns every enclosed background component into foreground.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let bg = label_components(mask.width, mask.height, Connectivity::Four, |i| !mask.bits[i]);
    let touching = bg.touching_border();
    let bits = mask
        .bits
        .iter()
        .zip(&bg.labels)
        .map(|(&b, &l)| b || !touching[l as usize])
        .collect();
    BinaryMask { width: mask.width, height: mask.height, bits }
}

pub fn area(mask: &BinaryMask) -> usize {
    mask.area()
}

/// Rescales the mask about its centroid by `sqrt(target / area)` so that
/// its area lands near `target` pixels, leaving at least `margin` background
/// pixels on every side.
///
/// Thin parts can lose or gain a whole pixel row depending on where the
/// centroid falls between pixel centres, so three placements are rendered:
/// the centroid's own phase, a whole pixel and a half pixel. The area
/// closest to `target` wins. If it still misses by more than 2%, each
/// placement is retried with the scale corrected by the area it produced. Every choice depends on areas alone, which
/// quarter turns and flips preserve.
pub fn normalize_area(mask: &BinaryMask, target: f64, margin: usize) -> Result<BinaryMask> {
    let current = mask.area();
    if current == 0 {
        return Err(Error::EmptyMask);
    }
    if !target.is_finite() || target < 16.0 {
        return Err(Error::Degenerate { pixels: if target > 0.0 { target as usize } else { 0 } });
    }
    let s = libm::sqrt(target / current as f64);
    let miss = |m: &BinaryMask| (m.area() as f64 - target).abs();
    let phases = [None, Some(0.0), Some(0.5)];
    let mut out = warp_with_phase(mask, Linear::scale(s), margin, None)?;
    for phase in &phases[1..] {
        let candidate = warp_with_phase(mask, Linear::scale(s), margin, *phase)?;
        if miss(&candidate) < miss(&out) {
            out = candidate;
        }
    }
    if miss(&out) > 0.02 * target {
        for phase in phases {
            let plain = warp_with_phase(mask, Linear::scale(s), margin, phase)?.area().max(1);
            let candidate = warp_with_phase(mask, Linear::scale(s * libm::sqrt(target / plain as f64)), margin, phase)?;
            if miss(&candidate) < miss(&out) {
                out = candidate;
            }
        }
    }
    checked(out)
}

fn checked(out: BinaryMask) -> Result<BinaryMask> {
    let got = out.area();
    if got < 16 {
        return Err(Error::Degenerate { pixels: got });
    }
    Ok(out)
}

pub fn rotate_mask_quarter(mask: &BinaryMask, quarters: i32) -> BinaryMask {
    mask.rotate_quarter(quarters)
}

pub fn reflect_mask_x(mask: &BinaryMask) -> BinaryMask {
    mask.reflect_x()
}
