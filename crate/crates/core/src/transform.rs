//! The volume-preserving stretch family `F(θ, β)` and raster warping.
//!
//! Warps pull back: every output pixel centre is mapped through the inverse
//! map, the source is sampled bilinearly (pixel `(x, y)` has its centre at
//! `(x, y)`), and the pixel is foreground when the sampled coverage is at
//! least one half. When the inverse map stretches by `k > 1` in some
//! direction, each output pixel averages a symmetric `ceil(k) x ceil(k)` grid
//! of bilinear samples so thin parts are not lost between sample points.
//!
//! The output lattice keeps the centroid's fractional offset: output point
//! `q` samples `c + M⁻¹ (q - c - K)` with `K` integral. A lattice symmetry of
//! the input (quarter turn, flip) therefore commutes with the warp exactly.

use core::f64::consts::FRAC_PI_2;

use crate::mask::BinaryMask;
use crate::{Error, Result, MAX_CANVAS};

/// Parameters of `F(θ, β)`: stretch by `beta` along direction `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    theta: f64,
    beta: f64,
}

impl TransformParams {
    /// `theta` in `[-π/2, π/2]`, `beta >= 1`.
    pub fn new(theta: f64, beta: f64) -> Result<Self> {
        if !(-FRAC_PI_2 - 1e-12..=FRAC_PI_2 + 1e-12).contains(&theta) {
            return Err(Error::InvalidTransform(alloc::format!("theta {theta} outside [-pi/2, pi/2]")));
        }
        if !beta.is_finite() || beta < 1.0 {
            return Err(Error::InvalidTransform(alloc::format!("beta {beta} must be >= 1")));
        }
        Ok(Self { theta, beta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Symmetric 2x2 matrix `[[m11, m12], [m21, m22]]` acting on `(x, y)`
/// column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Singular(d));
        }
        Ok(AffineMap { m11: self.m22 / d, m12: -self.m12 / d, m21: -self.m21 / d, m22: self.m11 / d })
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)
    }

    fn linear(&self) -> Linear {
        Linear([[self.m11, self.m12], [self.m21, self.m22]])
    }
}

/// `F(θ, β)`. `β = 1` gives the identity exactly.
pub fn make_transform(params: TransformParams) -> AffineMap {
    let TransformParams { theta, beta } = params;
    if beta == 1.0 {
        return AffineMap::IDENTITY;
    }
    let (s, c) = libm::sincos(theta);
    let inv = 1.0 / beta;
    let off = (beta - inv) * s * c;
    AffineMap { m11: beta * c * c + inv * s * s, m12: off, m21: off, m22: beta * s * s + inv * c * c }
}

/// Warps `mask` by `map` about its centroid onto a canvas fitted to the
/// transformed shape plus `margin` background pixels on every side.
pub fn apply_transform(mask: &BinaryMask, map: &AffineMap, margin: usize) -> Result<BinaryMask> {
    map.inverse()?;
    warp_about_centroid(mask, map.linear(), margin)
}

/// General 2x2 linear map used by the warps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Linear(pub [[f64; 2]; 2]);

impl Linear {
    pub const IDENTITY: Linear = Linear([[1.0, 0.0], [0.0, 1.0]]);

    pub fn scale(s: f64) -> Linear {
        Linear([[s, 0.0], [0.0, s]])
    }

    /// Rotation by `angle` (counter-clockwise in x-right/y-up terms), with
    /// exact entries at multiples of a quarter turn.
    pub fn rotation_quarters_exact(angle: f64, quarter: Option<i32>) -> Linear {
        let (s, c) = match quarter.map(|q| q.rem_euclid(4)) {
            Some(0) => (0.0, 1.0),
            Some(1) => (1.0, 0.0),
            Some(2) => (0.0, -1.0),
            Some(3) => (-1.0, 0.0),
            _ => libm::sincos(angle),
        };
        Linear([[c, -s], [s, c]])
    }

    pub fn then(&self, next: &Linear) -> Linear {
        let (a, b) = (next.0, self.0);
        Linear([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Result<Linear> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Singular(d));
        }
        let m = self.0;
        Ok(Linear([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let m = self.0;
        (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
    }

    /// Largest singular value.
    pub fn max_stretch(&self) -> f64 {
        let m = self.0;
        let t = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
        let d = self.det();
        let disc = (t * t - 4.0 * d * d).max(0.0);
        libm::sqrt((t + libm::sqrt(disc)) / 2.0)
    }

    /// Sub-samples per axis needed when this map is used as the pull-back.
    pub fn supersampling(&self) -> usize {
        let k = libm::ceil(self.max_stretch() - 1e-6);
        if k < 1.0 {
            1
        } else {
            k as usize
        }
    }
}

pub(crate) fn warp_about_centroid(mask: &BinaryMask, forward: Linear, margin: usize) -> Result<BinaryMask> {
    warp_with_phase(mask, forward, margin, None)
}

/// As [`warp_about_centroid`], but with `phase = Some(f)` the centroid lands
/// at fractional pixel position `f` on both axes instead of keeping its own.
pub(crate) fn warp_with_phase(
    mask: &BinaryMask,
    forward: Linear,
    margin: usize,
    phase: Option<f64>,
) -> Result<BinaryMask> {
    let src = mask.cropped().ok_or(Error::EmptyMask)?;
    let inverse = forward.inverse()?;
    let (cx, cy) = src.centroid().ok_or(Error::EmptyMask)?;

    // Transformed extent of the cropped pixel area, relative to the centroid.
    let (w, h) = (src.width() as f64, src.height() as f64);
    let corners = [(-0.5, -0.5), (w - 0.5, -0.5), (-0.5, h - 0.5), (w - 0.5, h - 0.5)];
    let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in corners {
        let (u, v) = forward.apply(x - cx, y - cy);
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    // Foreground output pixels have centres inside [lo + K, hi + K]; place
    // the first one at index >= margin and leave margin pixels after the last.
    let m = margin as f64;
    let shift = |c: f64| {
        phase.map_or(0.0, |f| {
            let d = f - (c - libm::floor(c));
            d - libm::floor(d)
        })
    };
    let (dx, dy) = (shift(cx), shift(cy));
    let kx = libm::ceil(m - 0.5 - (umin + cx + dx) - 1e-9) + dx;
    let ky = libm::ceil(m - 0.5 - (vmin + cy + dy) - 1e-9) + dy;
    let out_w = libm::floor(umax + cx + kx + 1e-9) + m + 1.0;
    let out_h = libm::floor(vmax + cy + ky + 1e-9) + m + 1.0;
    if !(out_w <= MAX_CANVAS as f64 && out_h <= MAX_CANVAS as f64) {
        return Err(Error::CanvasTooLarge {
            width: out_w.max(0.0).min(usize::MAX as f64) as usize,
            height: out_h.max(0.0).min(usize::MAX as f64) as usize,
            max: MAX_CANVAS,
        });
    }

    let sampler = Sampler { src: &src, center: (cx, cy), inverse, ss: inverse.supersampling() };
    Ok(sampler.render(out_w as usize, out_h as usize, (cx + kx, cy + ky)))
}

/// Renders `mask` transformed by `forward` about its centroid onto a
/// `width x height` canvas with the centroid landing on `anchor`.
pub(crate) fn warp_to_anchor(
    mask: &BinaryMask,
    forward: Linear,
    width: usize,
    height: usize,
    anchor: (f64, f64),
) -> Result<BinaryMask> {
    let src = mask.cropped().ok_or(Error::EmptyMask)?;
    let inverse = forward.inverse()?;
    let center = src.centroid().ok_or(Error::EmptyMask)?;
    let sampler = Sampler { src: &src, center, inverse, ss: inverse.supersampling() };
    Ok(sampler.render(width, height, anchor))
}

struct Sampler<'a> {
    src: &'a BinaryMask,
    center: (f64, f64),
    inverse: Linear,
    ss: usize,
}

impl Sampler<'_> {
    /// Output point `q` samples `center + inverse (q - origin)`.
    fn render(&self, width: usize, height: usize, origin: (f64, f64)) -> BinaryMask {
        let ss = self.ss;
        let n = (ss * ss) as f64;
        let step = 1.0 / ss as f64;
        let reach = 0.75 * self.inverse.max_stretch() + 1.5;
        let (sw, sh) = (self.src.width() as f64, self.src.height() as f64);

        BinaryMask::from_fn(width, height, |x, y| {
            let (qx, qy) = (x as f64 - origin.0, y as f64 - origin.1);
            let (px, py) = self.inverse.apply(qx, qy);
            let (px, py) = (px + self.center.0, py + self.center.1);
            if px < -reach || py < -reach || px > sw - 1.0 + reach || py > sh - 1.0 + reach {
                return false;
            }
            if ss == 1 {
                return self.bilinear(px, py) >= 0.5;
            }
            let mut sum = 0.0;
            for j in 0..ss {
                let dy = (j as f64 + 0.5) * step - 0.5;
                for i in 0..ss {
                    let dx = (i as f64 + 0.5) * step - 0.5;
                    let (sx, sy) = self.inverse.apply(qx + dx, qy + dy);
                    sum += self.bilinear(sx + self.center.0, sy + self.center.1);
                }
            }
            sum >= 0.5 * n
        })
    }

    #[inline]
    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let (fx, fy) = (libm::floor(x), libm::floor(y));
        let (tx, ty) = (x - fx, y - fy);
        let (ix, iy) = (fx as isize, fy as isize);
        let p = |dx: isize, dy: isize| if self.src.get_signed(ix + dx, iy + dy) { 1.0 } else { 0.0 };
        (1.0 - ty) * ((1.0 - tx) * p(0, 0) + tx * p(1, 0)) + ty * ((1.0 - tx) * p(0, 1) + tx * p(1, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use core::f64::consts::FRAC_PI_4;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn params_validation() {
        assert!(TransformParams::new(0.0, 0.99).is_err());
        assert!(TransformParams::new(2.0, 2.0).is_err());
        assert!(TransformParams::new(f64::NAN, 2.0).is_err());
        assert!(TransformParams::new(-FRAC_PI_2, 1.0).is_ok());
    }

    #[test]
    fn axis_aligned_stretch() {
        let f = make_transform(TransformParams::new(0.0, 2.0).unwrap());
        assert_eq!(f, AffineMap { m11: 2.0, m12: 0.0, m21: 0.0, m22: 0.5 });
    }

    #[test]
    fn unit_beta_is_identity() {
        for theta in [-1.5, -0.3, 0.0, 0.7, FRAC_PI_2] {
            assert_eq!(make_transform(TransformParams::new(theta, 1.0).unwrap()), AffineMap::IDENTITY);
        }
    }

    #[test]
    fn diagonal_stretch_by_hand() {
        // cos^2 = sin^2 = sin cos = 1/2: 2/2 + 0.5/2 = 1.25, (2 - 0.5)/2 = 0.75.
        let f = make_transform(TransformParams::new(FRAC_PI_4, 2.0).unwrap());
        assert!(close(f.m11, 1.25) && close(f.m12, 0.75) && close(f.m21, 0.75) && close(f.m22, 1.25));
        assert!(close(f.det(), 1.0));
    }

    #[test]
    fn singular_map_rejected() {
        let m = synth::disk(5.0, 2);
        let flat = AffineMap { m11: 1.0, m12: 1.0, m21: 1.0, m22: 1.0 };
        assert!(matches!(apply_transform(&m, &flat, 2), Err(Error::Singular(_))));
    }

    #[test]
    fn runaway_canvas_rejected() {
        let m = synth::rectangle(200, 200, 1);
        let f = make_transform(TransformParams::new(0.0, 60.0).unwrap());
        assert!(matches!(apply_transform(&m, &f, 2), Err(Error::CanvasTooLarge { .. })));
    }

    #[test]
    fn identity_only_moves_canvas() {
        let m = synth::cross(30, 8, 3);
        let out = apply_transform(&m, &AffineMap::IDENTITY, 5).unwrap();
        assert_eq!(out.cropped(), m.cropped());
        assert_eq!(out.margin(), Some(5));
    }

    #[test]
    fn supersampling_counts() {
        assert_eq!(Linear::IDENTITY.supersampling(), 1);
        assert_eq!(Linear::scale(0.25).supersampling(), 1);
        assert_eq!(Linear::scale(4.0).supersampling(), 4);
        let f = make_transform(TransformParams::new(0.3, 3.0).unwrap());
        assert_eq!(f.inverse().unwrap().linear().supersampling(), 3);
    }

    #[test]
    fn exact_quarter_rotation_matrices() {
        let r = Linear::rotation_quarters_exact(0.0, Some(1));
        assert_eq!(r.0, [[0.0, -1.0], [1.0, 0.0]]);
        let r = Linear::rotation_quarters_exact(0.3, None);
        assert!(close(r.det(), 1.0));
    }
}
