//! Exact Euclidean distance transform.
//!
//! Separable lower-envelope-of-parabolas algorithm (Felzenszwalb and
//! Huttenlocher). Squared distances between pixel centres are integers and
//! the envelope breakpoints are compared as exact rationals, so the result is
//! identical to a brute-force nearest-pixel search.

use alloc::vec;
use alloc::vec::Vec;

use crate::BinaryMask;

/// Marks pixels with no foreground pixel anywhere on the canvas.
pub const UNREACHABLE: u64 = u64::MAX;

/// Distance from each pixel centre to the nearest foreground pixel centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    sq: Vec<u64>,
}

impl DistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Squared distances, row-major. [`UNREACHABLE`] when the mask is empty.
    pub fn squared(&self) -> &[u64] {
        &self.sq
    }

    pub fn squared_at(&self, x: usize, y: usize) -> u64 {
        self.sq[y * self.width + x]
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        match self.squared_at(x, y) {
            UNREACHABLE => f64::INFINITY,
            d => libm::sqrt(d as f64),
        }
    }

    /// Number of pixels with `0 < distance <= radius`.
    pub fn count_within(&self, radius: f64) -> usize {
        let limit = radius * radius;
        self.sq.iter().filter(|&&d| d != 0 && d != UNREACHABLE && (d as f64) <= limit).count()
    }
}

pub fn distance_transform(mask: &BinaryMask) -> DistanceField {
    let (w, h) = (mask.width(), mask.height());
    let mut sq = vec![UNREACHABLE; w * h];

    // Columns: squared vertical distance to the nearest foreground pixel.
    for x in 0..w {
        let mut last: Option<usize> = None;
        for y in 0..h {
            if mask.get(x, y) {
                last = Some(y);
            }
            if let Some(l) = last {
                sq[y * w + x] = ((y - l) * (y - l)) as u64;
            }
        }
        last = None;
        for y in (0..h).rev() {
            if mask.get(x, y) {
                last = Some(y);
            }
            if let Some(l) = last {
                let d = ((l - y) * (l - y)) as u64;
                let cell = &mut sq[y * w + x];
                *cell = (*cell).min(d);
            }
        }
    }

    // Rows: lower envelope of parabolas rooted at the column results.
    let mut env = Envelope::with_capacity(w);
    let mut row = vec![0u64; w];
    for y in 0..h {
        row.copy_from_slice(&sq[y * w..(y + 1) * w]);
        env.transform(&mut row);
        sq[y * w..(y + 1) * w].copy_from_slice(&row);
    }

    DistanceField { width: w, height: h, sq }
}

/// Rational breakpoint `num / den` with `den > 0`.
#[derive(Clone, Copy)]
struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    fn le(self, other: Ratio) -> bool {
        (self.num as i128) * (other.den as i128) <= (other.num as i128) * (self.den as i128)
    }

    fn lt_int(self, x: i64) -> bool {
        (self.num as i128) < (x as i128) * (self.den as i128)
    }
}

struct Envelope {
    sites: Vec<i64>,
    breaks: Vec<Ratio>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self { sites: Vec::with_capacity(n), breaks: Vec::with_capacity(n) }
    }

    /// In place: `f[x] <- min_q (x - q)^2 + f[q]` over sites with finite `f`.
    fn transform(&mut self, f: &mut [u64]) {
        self.sites.clear();
        self.breaks.clear();
        for q in 0..f.len() {
            if f[q] == UNREACHABLE {
                continue;
            }
            let q = q as i64;
            loop {
                let Some(&v) = self.sites.last() else {
                    self.sites.push(q);
                    // breaks[k] is where sites[k] starts to win; unused for k = 0.
                    self.breaks.push(Ratio { num: 0, den: 1 });
                    break;
                };
                let s = intersect(f, v, q);
                let k = self.sites.len() - 1;
                if k > 0 && s.le(self.breaks[k]) {
                    self.sites.pop();
                    self.breaks.pop();
                    continue;
                }
                self.sites.push(q);
                self.breaks.push(s);
                break;
            }
        }
        if self.sites.is_empty() {
            return;
        }
        let values: Vec<u64> = self.sites.iter().map(|&s| f[s as usize]).collect();
        let mut k = 0;
        for (x, out) in f.iter_mut().enumerate() {
            let x = x as i64;
            while k + 1 < self.sites.len() && self.breaks[k + 1].lt_int(x) {
                k += 1;
            }
            let d = x - self.sites[k];
            *out = (d * d) as u64 + values[k];
        }
    }
}

/// Abscissa where the parabolas rooted at `v < q` cross.
fn intersect(f: &[u64], v: i64, q: i64) -> Ratio {
    let fv = f[v as usize] as i64 + v * v;
    let fq = f[q as usize] as i64 + q * q;
    Ratio { num: fq - fv, den: 2 * (q - v) }
}
