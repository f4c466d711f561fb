//! Rasterized synthetic silhouettes (pixel-centre inclusion tests).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::BinaryMask;

/// Disk of `radius` centred on a pixel, with `pad` extra background pixels
/// around the bounding square.
pub fn disk(radius: f64, pad: usize) -> BinaryMask {
    let r = libm::ceil(radius) as usize;
    let side = 2 * r + 1 + 2 * pad;
    let c = (r + pad) as f64;
    BinaryMask::from_fn(side, side, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        dx * dx + dy * dy <= radius * radius
    })
}

pub fn rectangle(width: usize, height: usize, pad: usize) -> BinaryMask {
    BinaryMask::from_fn(width + 2 * pad, height + 2 * pad, |x, y| {
        (pad..pad + width).contains(&x) && (pad..pad + height).contains(&y)
    })
}

pub fn square(side: usize, pad: usize) -> BinaryMask {
    rectangle(side, side, pad)
}

/// Plus sign: two `span x bar` bars crossing at their centres.
pub fn cross(span: usize, bar: usize, pad: usize) -> BinaryMask {
    let lo = (span - bar) / 2;
    BinaryMask::from_fn(span + 2 * pad, span + 2 * pad, |x, y| {
        let (x, y) = (x as isize - pad as isize, y as isize - pad as isize);
        let inside = |v: isize| (0..span as isize).contains(&v);
        let band = |v: isize| (lo as isize..(lo + bar) as isize).contains(&v);
        inside(x) && inside(y) && (band(x) || band(y))
    })
}

/// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y).
pub fn ellipse(a: f64, b: f64, pad: usize) -> BinaryMask {
    elliptic_band(a, b, 0.0, pad)
}

/// Elliptical annulus of the given `thickness`; it has exactly one hole.
pub fn elliptic_ring(a: f64, b: f64, thickness: f64, pad: usize) -> BinaryMask {
    elliptic_band(a, b, thickness, pad)
}

fn elliptic_band(a: f64, b: f64, thickness: f64, pad: usize) -> BinaryMask {
    let (ra, rb) = (libm::ceil(a) as usize, libm::ceil(b) as usize);
    let (w, h) = (2 * ra + 1 + 2 * pad, 2 * rb + 1 + 2 * pad);
    let (cx, cy) = ((ra + pad) as f64, (rb + pad) as f64);
    let inner = (a - thickness, b - thickness);
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let outer = (dx / a) * (dx / a) + (dy / b) * (dy / b) <= 1.0;
        let hole = thickness > 0.0
            && inner.0 > 0.0
            && inner.1 > 0.0
            && (dx / inner.0) * (dx / inner.0) + (dy / inner.1) * (dy / inner.1) < 1.0;
        outer && !hole
    })
}

/// Oriented rectangle test: centre `(cx, cy)`, half extents along the unit
/// direction `(ux, uy)` and its normal.
fn in_bar(x: f64, y: f64, (cx, cy): (f64, f64), (ux, uy): (f64, f64), half_len: f64, half_width: f64) -> bool {
    let (dx, dy) = (x - cx, y - cy);
    let along = dx * ux + dy * uy;
    let across = -dx * uy + dy * ux;
    along.abs() <= half_len && across.abs() <= half_width
}

/// Five-finger hand with a wrist: the four long fingers point up (along
/// the image y axis) and the thumb sticks out at 45 degrees. `unit` scales
/// every dimension.
pub fn hand(unit: f64, pad: usize) -> BinaryMask {
    let u = unit;
    let p = pad as f64;
    let palm = (34.0 * u, 34.0 * u);
    let finger_w = 6.0 * u;
    let gap = 3.0 * u;
    let lengths = [34.0 * u, 42.0 * u, 40.0 * u, 30.0 * u];
    let wrist = (22.0 * u, 44.0 * u);
    let thumb_len = 28.0 * u;
    let left = 22.0 * u + p;
    let top = 42.0 * u + p;
    let w = libm::ceil(left + palm.0 + 1.0) as usize + pad;
    let h = libm::ceil(top + palm.1 + wrist.1 + 1.0) as usize + pad;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let thumb_base = (left + 2.0 * u, top + 0.45 * palm.1);
    let thumb_centre = (thumb_base.0 - s * thumb_len / 2.0, thumb_base.1 - s * thumb_len / 2.0);
    BinaryMask::from_fn(w, h, |x, y| {
        let (x, y) = (x as f64, y as f64);
        let in_palm = x >= left && x < left + palm.0 && y >= top && y < top + palm.1;
        let in_wrist = x >= left + (palm.0 - wrist.0) / 2.0
            && x < left + (palm.0 + wrist.0) / 2.0
            && y >= top + palm.1 - 1.0
            && y < top + palm.1 + wrist.1;
        let in_finger = lengths.iter().enumerate().any(|(k, &len)| {
            let x0 = left + 2.0 * u + k as f64 * (finger_w + gap);
            x >= x0 && x < x0 + finger_w && y >= top - len && y < top + 1.0
        });
        let in_thumb = in_bar(x, y, thumb_centre, (s, s), thumb_len / 2.0, 3.5 * u);
        in_palm || in_wrist || in_finger || in_thumb
    })
}

/// A labelled synthetic shape.
#[derive(Debug, Clone)]
pub struct ToyShape {
    pub id: String,
    pub class: String,
    pub mask: BinaryMask,
}

fn toy(class: &str, tag: usize, mask: BinaryMask) -> ToyShape {
    ToyShape { id: format!("{class}-{tag:02}"), class: class.into(), mask }
}

/// Disks and squares, three sizes each.
pub fn disks_and_squares() -> Vec<ToyShape> {
    let mut v = Vec::new();
    for (k, r) in [20.0, 30.0, 44.0].into_iter().enumerate() {
        v.push(toy("disk", k + 1, disk(r, 2)));
    }
    for (k, s) in [36, 52, 70].into_iter().enumerate() {
        v.push(toy("square", k + 1, square(s, 2)));
    }
    v
}

/// Fifteen shapes in five classes: disks, squares, 4:1 rectangles, crosses
/// and elliptical rings (which become ellipses after hole repair), three
/// sizes per class.
pub fn toy_corpus() -> Vec<ToyShape> {
    let mut v = disks_and_squares();
    for (k, s) in [12, 18, 24].into_iter().enumerate() {
        v.push(toy("rectangle", k + 1, rectangle(4 * s, s, 2)));
    }
    for (k, s) in [40, 60, 80].into_iter().enumerate() {
        v.push(toy("cross", k + 1, cross(s, s * 3 / 10, 2)));
    }
    for (k, b) in [16.0, 24.0, 32.0].into_iter().enumerate() {
        v.push(toy("ring", k + 1, elliptic_ring(1.5 * b, b, b / 4.0, 2)));
    }
    v
}
