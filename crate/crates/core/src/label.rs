//! Connected-component labelling on a pixel grid.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Component labels for a `width x height` grid. Label 0 marks pixels outside
/// the labelled set; components are numbered from 1 in raster-scan order of
/// their first pixel.
#[derive(Debug, Clone)]
pub struct Labels {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    /// `sizes[k]` is the pixel count of component `k + 1`.
    pub sizes: Vec<usize>,
}

impl Labels {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Labels of components that have at least one pixel on the grid border.
    pub fn touching_border(&self) -> Vec<bool> {
        let mut touching = vec![false; self.count() + 1];
        let (w, h) = (self.width, self.height);
        for x in 0..w {
            touching[self.labels[x] as usize] = true;
            touching[self.labels[(h - 1) * w + x] as usize] = true;
        }
        for y in 0..h {
            touching[self.labels[y * w] as usize] = true;
            touching[self.labels[y * w + w - 1] as usize] = true;
        }
        touching[0] = false;
        touching
    }
}

/// Labels the pixels for which `member(index)` holds.
pub fn label_components<F>(width: usize, height: usize, conn: Connectivity, member: F) -> Labels
where
    F: Fn(usize) -> bool,
{
    let mut labels = vec![0u32; width * height];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();

    for start in 0..width * height {
        if labels[start] != 0 || !member(start) {
            continue;
        }
        let id = sizes.len() as u32 + 1;
        labels[start] = id;
        stack.push(start);
        let mut size = 0usize;
        while let Some(idx) = stack.pop() {
            size += 1;
            let (x, y) = ((idx % width) as isize, (idx / width) as isize);
            for (dx, dy) in neighbours(conn) {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let n = ny as usize * width + nx as usize;
                if labels[n] == 0 && member(n) {
                    labels[n] = id;
                    stack.push(n);
                }
            }
        }
        sizes.push(size);
    }

    Labels { width, height, labels, sizes }
}

fn neighbours(conn: Connectivity) -> &'static [(isize, isize)] {
    const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const EIGHT: [(isize, isize); 8] =
        [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    match conn {
        Connectivity::Four => &FOUR,
        Connectivity::Eight => &EIGHT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pixels_join_only_under_eight() {
        // x.
        // .x
        let bits = [true, false, false, true];
        let four = label_components(2, 2, Connectivity::Four, |i| bits[i]);
        let eight = label_components(2, 2, Connectivity::Eight, |i| bits[i]);
        assert_eq!(four.count(), 2);
        assert_eq!(eight.count(), 1);
        assert_eq!(eight.sizes, [2]);
    }

    #[test]
    fn border_flags() {
        // ...
        // .x.
        // ...
        let bits = [false, false, false, false, true, false, false, false, false];
        let bg = label_components(3, 3, Connectivity::Four, |i| !bits[i]);
        assert_eq!(bg.count(), 1);
        assert!(bg.touching_border()[1]);
        let fg = label_components(3, 3, Connectivity::Four, |i| bits[i]);
        assert!(!fg.touching_border()[1]);
    }
}
