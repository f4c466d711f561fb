//! Raster masks on disk: PGM (P2/P5), PNG and GIF in, P5 PGM out.

use std::fs;
use std::io::Write;
use std::path::Path;

use dirshape_core::BinaryMask;

use crate::{Error, Result};

/// File extensions accepted by [`load_mask`] and by dataset ingestion.
pub const RASTER_EXTENSIONS: [&str; 4] = ["pgm", "pnm", "png", "gif"];

pub fn is_raster(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| RASTER_EXTENSIONS.iter().any(|r| r.eq_ignore_ascii_case(e)))
}

/// Reads `path` as 8-bit gray; a pixel is foreground iff its level is
/// `>= threshold` (after flipping levels when `invert` is set).
pub fn load_mask(path: &Path, threshold: u8, invert: bool) -> Result<BinaryMask> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    decode_mask(&bytes, path, threshold, invert)
}

/// Like [`load_mask`] for an in-memory file; `path` only labels errors.
pub fn decode_mask(bytes: &[u8], path: &Path, threshold: u8, invert: bool) -> Result<BinaryMask> {
    let img = image::load_from_memory(bytes)
        .map_err(|source| Error::Decode { path: path.to_path_buf(), source })?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mask = BinaryMask::from_fn(w, h, |x, y| {
        let g = img.get_pixel(x as u32, y as u32)[0];
        let g = if invert { 255 - g } else { g };
        g >= threshold
    });
    if mask.is_empty() {
        return Err(Error::EmptyForeground(path.to_path_buf()));
    }
    Ok(mask)
}

/// Binary P5 PGM with 0 for background and 255 for foreground.
pub fn encode_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

pub fn write_pgm(path: &Path, mask: &BinaryMask) -> Result<()> {
    write_atomic(path, &encode_pgm(mask))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Error::io(dir))?;
    tmp.write_all(contents).map_err(Error::io(path))?;
    tmp.persist(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_pgm(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> Vec<u8> {
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        for y in 0..h {
            for x in 0..w {
                out.push(f(x, y));
            }
        }
        out
    }

    #[test]
    fn black_image_is_rejected() {
        let bytes = gray_pgm(8, 8, |_, _| 0);
        assert!(matches!(decode_mask(&bytes, Path::new("a.pgm"), 128, false), Err(Error::EmptyForeground(_))));
    }

    #[test]
    fn white_image_is_full() {
        let bytes = gray_pgm(8, 8, |_, _| 255);
        assert_eq!(decode_mask(&bytes, Path::new("a.pgm"), 128, false).unwrap().area(), 64);
        assert!(decode_mask(&bytes, Path::new("a.pgm"), 128, true).is_err());
    }

    #[test]
    fn anti_aliased_disk_matches_pixel_scan() {
        let level = |x: usize, y: usize| {
            let d = ((x as f64 - 15.3).powi(2) + (y as f64 - 14.8).powi(2)).sqrt();
            (255.0 * (10.5 - d).clamp(0.0, 1.0)).round() as u8
        };
        let bytes = gray_pgm(32, 30, level);
        let expected = (0..30).flat_map(|y| (0..32).map(move |x| (x, y))).filter(|&(x, y)| level(x, y) >= 128).count();
        let m = decode_mask(&bytes, Path::new("d.pgm"), 128, false).unwrap();
        assert_eq!(m.area(), expected);
        let inverted = decode_mask(&bytes, Path::new("d.pgm"), 128, true).unwrap();
        assert_eq!(inverted.area(), 32 * 30 - (0..30).flat_map(|y| (0..32).map(move |x| (x, y))).filter(|&(x, y)| level(x, y) > 127).count());
    }

    #[test]
    fn ascii_pgm_is_read() {
        let bytes = b"P2\n3 2\n255\n0 255 0\n255 255 10\n";
        assert_eq!(decode_mask(bytes, Path::new("a.pgm"), 128, false).unwrap().area(), 3);
    }

    #[test]
    fn pgm_round_trip() {
        let m = BinaryMask::from_fn(7, 5, |x, y| (x + y) % 3 == 0);
        let back = decode_mask(&encode_pgm(&m), Path::new("m.pgm"), 128, false).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn png_round_trip() {
        let m = BinaryMask::from_fn(9, 4, |x, y| x > y);
        let img = image::GrayImage::from_fn(9, 4, |x, y| image::Luma([if m.get(x as usize, y as usize) { 255 } else { 0 }]));
        let mut bytes = Vec::new();
        img.write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png).unwrap();
        assert_eq!(decode_mask(&bytes, Path::new("m.png"), 128, false).unwrap(), m);
    }

    #[test]
    fn extensions() {
        assert!(is_raster(Path::new("a/b-01.PGM")));
        assert!(is_raster(Path::new("x.gif")));
        assert!(!is_raster(Path::new("notes.txt")));
        assert!(!is_raster(Path::new("pgm")));
    }
}
