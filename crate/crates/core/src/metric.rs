//! Distances between shapes.
//!
//! [`descriptor_distance`] is the retrieval metric: a weighted L2 distance
//! between descriptor grids, minimized over the residual rotation/reflection
//! group, which acts on the grid as circular θ-shifts and θ-reversals.
//!
//! [`hausdorff_orbit_distance`] approximates the Hausdorff distance between
//! shapes modulo similarities. Translation is restricted to centroid
//! alignment and rotation is sampled, so it is an upper bound; it is a
//! diagnostic, never used for retrieval.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::descriptor::DescriptorGrid;
use crate::edt::{distance_transform, UNREACHABLE};
use crate::mask::{normalize_area, BinaryMask};
use crate::transform::{warp_to_anchor, Linear};
use crate::{Error, MetricConfig, Result};

/// Element of the group acting on descriptor rows: optionally reverse θ
/// (`θ -> -θ`), then shift circularly by `shift` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitAlignment {
    pub shift: usize,
    pub reflected: bool,
}

impl OrbitAlignment {
    pub const IDENTITY: OrbitAlignment = OrbitAlignment { shift: 0, reflected: false };

    /// Source row of `grid` that lands in row `i` after alignment.
    pub fn source_row(&self, i: usize, config: &MetricConfig) -> usize {
        let n = config.thetas.len();
        let j = (i + self.shift) % n;
        if self.reflected {
            config.reflected_index(j)
        } else {
            j
        }
    }

    /// All `2 N_θ` alignments in tie-break order: by shift, unreflected first.
    pub fn all(config: &MetricConfig) -> impl Iterator<Item = OrbitAlignment> {
        let n = config.thetas.len();
        (0..n).flat_map(|shift| [false, true].map(|reflected| OrbitAlignment { shift, reflected }))
    }

    /// Rows of `grid` permuted by this alignment.
    pub fn apply(&self, grid: &DescriptorGrid, config: &MetricConfig) -> DescriptorGrid {
        let mut values = Vec::with_capacity(grid.values.len());
        for i in 0..grid.rows() {
            values.extend_from_slice(grid.row(self.source_row(i, config)));
        }
        DescriptorGrid { values, ..grid.clone() }
    }
}

fn check_grid(grid: &DescriptorGrid, config: &MetricConfig, which: &str) -> Result<()> {
    if !grid.config(config.kappa).same_grid(config, 1e-7) {
        return Err(Error::GridMismatch(alloc::format!("{which} was computed with a different grid")));
    }
    if grid.values.len() != grid.rows() * grid.cols() {
        return Err(Error::GridMismatch(alloc::format!("{which} has a malformed value matrix")));
    }
    Ok(())
}

/// `min_g sqrt(Σ_ij exp(-κ β_j) (a[i][j] - g(b)[i][j])²)` over all orbit
/// alignments `g`, with the minimizing alignment. Ties go to the first
/// alignment in [`OrbitAlignment::all`] order.
pub fn descriptor_distance(
    a: &DescriptorGrid,
    b: &DescriptorGrid,
    config: &MetricConfig,
) -> Result<(f64, OrbitAlignment)> {
    config.validate()?;
    check_grid(a, config, "first descriptor")?;
    check_grid(b, config, "second descriptor")?;
    let weights = config.weights();

    let mut best = (f64::INFINITY, OrbitAlignment::IDENTITY);
    for g in OrbitAlignment::all(config) {
        let mut sum = 0.0;
        for i in 0..a.rows() {
            let (ra, rb) = (a.row(i), b.row(g.source_row(i, config)));
            for j in 0..a.cols() {
                let d = ra[j] - rb[j];
                sum += weights[j] * d * d;
            }
        }
        if sum < best.0 {
            best = (sum, g);
        }
    }
    Ok((libm::sqrt(best.0), best.1))
}

/// Two-sided Hausdorff distance between the foreground pixel sets of two
/// masks on the same canvas. Infinite when exactly one side is empty.
pub fn pixel_hausdorff(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::BadDimensions { width: b.width(), height: b.height(), len: a.width() * a.height() });
    }
    let (da, db) = (distance_transform(a), distance_transform(b));
    let directed = |from: &BinaryMask, field: &[u64]| {
        from.bits().iter().zip(field).filter(|(&f, _)| f).map(|(_, &d)| d).max().unwrap_or(0)
    };
    let sq = directed(a, db.squared()).max(directed(b, da.squared()));
    Ok(if sq == UNREACHABLE { f64::INFINITY } else { libm::sqrt(sq as f64) })
}

/// One sampled orbit element: `b` rotated by `angle` (after an optional flip)
/// on the common canvas.
#[derive(Debug, Clone)]
pub struct OrbitFrame {
    pub angle: f64,
    pub reflected: bool,
    pub mask: BinaryMask,
}

/// Centroid-aligned frames used by [`hausdorff_orbit_distance`].
#[derive(Debug, Clone)]
pub struct OrbitFrames {
    pub reference: BinaryMask,
    pub candidates: Vec<OrbitFrame>,
}

/// Normalizes both masks to `area`, puts `a` and every sampled rotation /
/// reflection of `b` on one canvas with their centroids on the same pixel.
pub fn hausdorff_orbit_frames(
    a: &BinaryMask,
    b: &BinaryMask,
    area: f64,
    rotation_samples: usize,
) -> Result<OrbitFrames> {
    if rotation_samples < 4 {
        return Err(Error::InvalidConfig("rotation_samples must be at least 4".into()));
    }
    let na = normalize_area(a, area, 1)?;
    let nb = normalize_area(b, area, 1)?;
    let radius = reach(&na).max(reach(&nb));
    let half = libm::ceil(radius) as usize + 2;
    let side = 2 * half + 1;
    let anchor = (half as f64, half as f64);

    let reference = warp_to_anchor(&na, Linear::IDENTITY, side, side, anchor)?;
    let flip = Linear([[1.0, 0.0], [0.0, -1.0]]);
    let mut candidates = Vec::with_capacity(2 * rotation_samples);
    for k in 0..rotation_samples {
        let angle = 2.0 * PI * k as f64 / rotation_samples as f64;
        let quarter = (4 * k % rotation_samples == 0).then(|| (4 * k / rotation_samples) as i32);
        let rotation = Linear::rotation_quarters_exact(angle, quarter);
        for reflected in [false, true] {
            let forward = if reflected { flip.then(&rotation) } else { rotation };
            let mask = warp_to_anchor(&nb, forward, side, side, anchor)?;
            candidates.push(OrbitFrame { angle, reflected, mask });
        }
    }
    Ok(OrbitFrames { reference, candidates })
}

/// Largest distance from the centroid to a corner of a foreground pixel.
fn reach(mask: &BinaryMask) -> f64 {
    let (cx, cy) = mask.centroid().unwrap_or((0.0, 0.0));
    let mut r2: f64 = 0.0;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                let dx = (x as f64 - cx).abs() + 0.5;
                let dy = (y as f64 - cy).abs() + 0.5;
                r2 = r2.max(dx * dx + dy * dy);
            }
        }
    }
    libm::sqrt(r2)
}

/// Minimum over the sampled orbit of the pixel Hausdorff distance between
/// `a` and `b`, both normalized to `area` and centroid-aligned. An upper
/// bound on the similarity-quotient Hausdorff distance.
pub fn hausdorff_orbit_distance(a: &BinaryMask, b: &BinaryMask, area: f64, rotation_samples: usize) -> Result<f64> {
    let frames = hausdorff_orbit_frames(a, b, area, rotation_samples)?;
    let mut best = f64::INFINITY;
    for c in &frames.candidates {
        best = best.min(pixel_hausdorff(&frames.reference, &c.mask)?);
    }
    Ok(best)
}
