//! Discretization of the descriptor and of its metric.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::{Error, Result};

/// Everything needed to turn the descriptor integral into a finite sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    /// Neighbourhood radius in pixels.
    pub epsilon: f64,
    /// Target area in pixels every shape is rescaled to.
    pub area: f64,
    /// Stretch directions, uniformly spaced over one period `π`.
    pub thetas: Vec<f64>,
    /// Stretch factors, ascending, all `>= 1`.
    pub betas: Vec<f64>,
    /// Decay of the `exp(-κβ)` weights.
    pub kappa: f64,
}

impl Default for MetricConfig {
    /// `ε = 8`, `V = 4096`, `θ ∈ {-π/4, 0, π/4, π/2}`, `β ∈ {1, 3, 5}`, `κ = 1/5`.
    fn default() -> Self {
        Self {
            epsilon: 8.0,
            area: 4096.0,
            thetas: vec![-FRAC_PI_4, 0.0, FRAC_PI_4, FRAC_PI_2],
            betas: vec![1.0, 3.0, 5.0],
            kappa: 0.2,
        }
    }
}

impl MetricConfig {
    /// Default grid without the undeformed `β = 1` row.
    pub fn stretched_only() -> Self {
        Self { betas: vec![3.0, 5.0], ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.area >= 16.0 && self.area.is_finite()) {
            return bad(format!("area must be at least 16 pixels, got {}", self.area));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if self.betas.is_empty() {
            return bad("beta grid is empty".into());
        }
        if self.betas.iter().any(|b| !(b.is_finite() && *b >= 1.0)) {
            return bad("every beta must be >= 1".into());
        }
        if self.betas.windows(2).any(|w| w[0] >= w[1]) {
            return bad("betas must be strictly ascending".into());
        }
        let n = self.thetas.len();
        if n == 0 {
            return bad("theta grid is empty".into());
        }
        if self.thetas.iter().any(|t| !(t.is_finite() && *t >= -FRAC_PI_2 - 1e-9 && *t <= FRAC_PI_2 + 1e-9)) {
            return bad("every theta must lie in [-pi/2, pi/2]".into());
        }
        let step = PI / n as f64;
        for (i, t) in self.thetas.iter().enumerate() {
            if (t - (self.thetas[0] + i as f64 * step)).abs() > 1e-9 {
                return bad(format!("thetas must be ascending with uniform step pi/{n}"));
            }
        }
        let pivot = -2.0 * self.thetas[0] / step;
        if (pivot - libm::round(pivot)).abs() > 1e-9 {
            return bad("theta grid is not closed under theta -> -theta".into());
        }
        Ok(())
    }

    /// Background margin that keeps the `ε`-neighbourhood on the canvas.
    pub fn margin(&self) -> usize {
        libm::ceil(self.epsilon) as usize + 2
    }

    /// `exp(-κ β_j)` per β column.
    pub fn weights(&self) -> Vec<f64> {
        self.betas.iter().map(|b| libm::exp(-self.kappa * b)).collect()
    }

    /// Grid slot holding `-θ_i` (modulo `π`).
    pub fn reflected_index(&self, i: usize) -> usize {
        let n = self.thetas.len() as i64;
        let step = PI / n as f64;
        let pivot = libm::round(-2.0 * self.thetas[0] / step) as i64;
        (pivot - i as i64).rem_euclid(n) as usize
    }

    /// Whether two configs describe the same descriptor grid (ε, area,
    /// θ and β samples) up to `tol` relative difference.
    pub fn same_grid(&self, other: &MetricConfig, tol: f64) -> bool {
        let eq = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
        eq(self.epsilon, other.epsilon)
            && eq(self.area, other.area)
            && self.thetas.len() == other.thetas.len()
            && self.betas.len() == other.betas.len()
            && self.thetas.iter().zip(&other.thetas).all(|(a, b)| eq(*a, *b))
            && self.betas.iter().zip(&other.betas).all(|(a, b)| eq(*a, *b))
    }
}
