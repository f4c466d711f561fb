//! The dilation-ratio feature and its sampled `(θ, β)` surface.

use alloc::vec::Vec;

use crate::edt::distance_transform;
use crate::mask::{fill_holes, normalize_area, BinaryMask};
use crate::transform::{apply_transform, make_transform, TransformParams};
use crate::{Error, MetricConfig, Result};

pub use crate::mask::{reflect_mask_x, rotate_mask_quarter};

/// Descriptor values `P[i][j]` for `θ_i` (rows) and `β_j` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorGrid {
    pub thetas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major, `thetas.len() x betas.len()`.
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub area: f64,
}

impl DescriptorGrid {
    pub fn new(thetas: Vec<f64>, betas: Vec<f64>, values: Vec<f64>, epsilon: f64, area: f64) -> Result<Self> {
        if thetas.is_empty() || betas.is_empty() || values.len() != thetas.len() * betas.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} values for a {}x{} grid",
                values.len(),
                thetas.len(),
                betas.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::GridMismatch("values must be finite and non-negative".into()));
        }
        Ok(Self { thetas, betas, values, epsilon, area })
    }

    pub fn rows(&self) -> usize {
        self.thetas.len()
    }

    pub fn cols(&self) -> usize {
        self.betas.len()
    }

    pub fn get(&self, theta: usize, beta: usize) -> f64 {
        self.values[theta * self.cols() + beta]
    }

    pub fn row(&self, theta: usize) -> &[f64] {
        let c = self.cols();
        &self.values[theta * c..(theta + 1) * c]
    }

    /// The grid layout (ε, area, θ and β samples) as a config with `kappa`.
    pub fn config(&self, kappa: f64) -> MetricConfig {
        MetricConfig {
            epsilon: self.epsilon,
            area: self.area,
            thetas: self.thetas.clone(),
            betas: self.betas.clone(),
            kappa,
        }
    }
}

/// Pixels whose distance to the shape lies in `(0, epsilon]`.
fn ring_area(mask: &BinaryMask, epsilon: f64) -> Result<usize> {
    let needed = libm::ceil(epsilon) as usize + 1;
    let available = mask.margin().ok_or(Error::EmptyMask)?;
    if available < needed {
        return Err(Error::InsufficientMargin { needed, available });
    }
    Ok(distance_transform(mask).count_within(epsilon))
}

/// `|{p : 0 < dist(p, mask) <= ε}| / area(mask)`.
///
/// The canvas must leave `ceil(ε) + 1` background pixels around the shape.
pub fn compute_p(mask: &BinaryMask, epsilon: f64) -> Result<f64> {
    let a = mask.area();
    if a == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(ring_area(mask, epsilon)? as f64 / a as f64)
}

/// Fills holes, normalizes to `config.area`, then for every `(θ_i, β_j)`
/// stretches the normalized shape and divides the pixel count of its
/// `ε`-ring by `config.area` (the area of the normalized shape before
/// rasterization).
pub fn compute_descriptor(mask: &BinaryMask, config: &MetricConfig) -> Result<DescriptorGrid> {
    config.validate()?;
    let margin = config.margin();
    let normalized = normalize_area(&fill_holes(mask), config.area, margin)?;
    let divisor = config.area;

    let mut identity_value = None;
    let mut values = Vec::with_capacity(config.thetas.len() * config.betas.len());
    for &theta in &config.thetas {
        for &beta in &config.betas {
            let ring = if beta == 1.0 {
                match identity_value {
                    Some(v) => v,
                    None => *identity_value.insert(ring_area(&normalized, config.epsilon)?),
                }
            } else {
                let map = make_transform(TransformParams::new(theta, beta)?);
                let stretched = apply_transform(&normalized, &map, margin)?;
                ring_area(&stretched, config.epsilon)?
            };
            values.push(ring as f64 / divisor);
        }
    }
    DescriptorGrid::new(config.thetas.clone(), config.betas.clone(), values, config.epsilon, config.area)
}
