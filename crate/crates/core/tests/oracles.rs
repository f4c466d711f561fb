//! Implementation-independent oracles: brute-force distance transform,
//! closed-form neighbourhood areas, analytic warps.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use dirshape_core::edt::UNREACHABLE;
use dirshape_core::synth;
use dirshape_core::*;
use proptest::prelude::*;

fn brute_force_sq(mask: &BinaryMask) -> Vec<u64> {
    let fg: Vec<(i64, i64)> = (0..mask.height())
        .flat_map(|y| (0..mask.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y))
        .map(|(x, y)| (x as i64, y as i64))
        .collect();
    let mut out = Vec::with_capacity(mask.width() * mask.height());
    for y in 0..mask.height() as i64 {
        for x in 0..mask.width() as i64 {
            let best = fg.iter().map(|&(a, b)| ((x - a).pow(2) + (y - b).pow(2)) as u64).min();
            out.push(best.unwrap_or(UNREACHABLE));
        }
    }
    out
}

fn random_mask() -> impl Strategy<Value = BinaryMask> {
    (1usize..=64, 1usize..=64, 0.0f64..0.3).prop_flat_map(|(w, h, density)| {
        prop::collection::vec(prop::bool::weighted(density.max(0.002)), w * h)
            .prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_transform_matches_brute_force(mask in random_mask()) {
        let field = distance_transform(&mask);
        let expected = brute_force_sq(&mask);
        prop_assert_eq!(field.squared(), expected.as_slice());
    }
}

#[test]
fn distance_field_is_one_lipschitz() {
    let m = synth::cross(30, 7, 12);
    let f = distance_transform(&m);
    for y in 0..f.height() {
        for x in 0..f.width() {
            if m.get(x, y) {
                assert_eq!(f.distance(x, y), 0.0);
            }
            if x + 1 < f.width() {
                assert!((f.distance(x, y) - f.distance(x + 1, y)).abs() <= 1.0);
            }
            if y + 1 < f.height() {
                assert!((f.distance(x, y) - f.distance(x, y + 1)).abs() <= 1.0);
            }
        }
    }
}

#[test]
fn disk_ring_matches_annulus_formula() {
    // (2 r ε + ε²) / r² for r = 36, ε = 8.
    let expected: f64 = (2.0 * 36.0 * 8.0 + 64.0) / (36.0 * 36.0);
    assert!((expected - 0.4938).abs() < 1e-4);
    let p = compute_p(&synth::disk(36.0, 10), 8.0).unwrap();
    assert!((p - expected).abs() / expected <= 0.05, "P = {p}");
}

#[test]
fn square_ring_matches_strip_formula() {
    // (4 s ε + π ε²) / s² for s = 64, ε = 8.
    let expected = (4.0 * 64.0 * 8.0 + PI * 64.0) / (64.0 * 64.0);
    assert!((expected - 0.5491).abs() < 1e-4);
    let p = compute_p(&synth::square(64, 10), 8.0).unwrap();
    assert!((p - expected).abs() / expected <= 0.05, "P = {p}");
}

#[test]
fn doubling_epsilon_grows_p() {
    for m in [synth::disk(20.0, 20), synth::cross(40, 12, 20)] {
        assert!(compute_p(&m, 8.0).unwrap() > compute_p(&m, 4.0).unwrap());
    }
}

#[test]
fn square_homothety_to_target_area() {
    // Side 32 scaled by sqrt(4096 / 1024) = 2 gives side 64.
    let n = normalize_area(&synth::square(32, 3), 4096.0, 10).unwrap();
    assert!((n.area() as f64 - 4096.0).abs() / 4096.0 <= 0.02);
    let b = n.bounds().unwrap();
    assert!(b.width().abs_diff(64) <= 1 && b.height().abs_diff(64) <= 1, "{b:?}");
}

#[test]
fn small_disk_normalizes_cleanly() {
    let d = synth::disk(12.6, 1);
    assert!((d.area() as i64 - 500).abs() < 15, "area {}", d.area());
    let n = normalize_area(&d, 4096.0, 10).unwrap();
    assert!((n.area() as f64 - 4096.0).abs() / 4096.0 <= 0.02, "area {}", n.area());
    assert!(validate_shape(&n).is_valid());
}

#[test]
fn thin_bars_normalize_within_two_percent() {
    let mut shapes: Vec<BinaryMask> = synth::toy_corpus().into_iter().map(|t| fill_holes(&t.mask)).collect();
    shapes.extend((8..=20).map(|bar| synth::cross(40, bar, 2)));
    shapes.extend((5..=15).map(|h| synth::rectangle(60, h, 2)));
    for m in &shapes {
        let n = normalize_area(m, 4096.0, 10).unwrap();
        let err = (n.area() as f64 - 4096.0).abs() / 4096.0;
        assert!(err <= 0.02, "{}x{} -> {}", m.width(), m.height(), n.area());
        let r = normalize_area(&m.rotate_quarter(1), 4096.0, 10).unwrap();
        assert_eq!(r.cropped(), n.cropped().map(|c| c.rotate_quarter(1)));
    }
}

/// Second-moment semi-axis estimates `2 sqrt(var)` along x and y.
fn moment_axes(m: &BinaryMask) -> (f64, f64) {
    let (cx, cy) = m.centroid().unwrap();
    let (mut vx, mut vy, mut n) = (0.0, 0.0, 0.0);
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) {
                vx += (x as f64 - cx).powi(2);
                vy += (y as f64 - cy).powi(2);
                n += 1.0;
            }
        }
    }
    (2.0 * (vx / n).sqrt(), 2.0 * (vy / n).sqrt())
}

#[test]
fn disk_stretches_to_ellipse() {
    let r = 40.0;
    let disk = synth::disk(r, 2);
    let f = make_transform(TransformParams::new(0.0, 2.0).unwrap());
    let e = apply_transform(&disk, &f, 3).unwrap();
    let b = e.bounds().unwrap();
    let (half_w, half_h) = ((b.x1 - b.x0) as f64 / 2.0, (b.y1 - b.y0) as f64 / 2.0);
    assert!((half_w - 2.0 * r).abs() / (2.0 * r) <= 0.03, "{half_w}");
    assert!((half_h - r / 2.0).abs() / (r / 2.0) <= 0.03, "{half_h}");
    let (ax, ay) = moment_axes(&e);
    assert!((ax - 2.0 * r).abs() / (2.0 * r) <= 0.03, "{ax}");
    assert!((ay - r / 2.0).abs() / (r / 2.0) <= 0.03, "{ay}");
    let ellipse_area = PI * 2.0 * r * r / 2.0;
    assert!((e.area() as f64 - ellipse_area).abs() / ellipse_area <= 0.02);
}

#[test]
fn stretching_preserves_area() {
    let f = make_transform(TransformParams::new(FRAC_PI_4, 3.0).unwrap());
    for shape in synth::toy_corpus() {
        let m = fill_holes(&shape.mask);
        if m.area() < 256 {
            continue;
        }
        let out = apply_transform(&m, &f, 4).unwrap();
        let rel = (out.area() as f64 - m.area() as f64).abs() / m.area() as f64;
        assert!(rel <= 0.02, "{}: {rel}", shape.id);
    }
}

#[test]
fn transform_matrix_examples() {
    let f = make_transform(TransformParams::new(FRAC_PI_2, 4.0).unwrap());
    assert!((f.m11 - 0.25).abs() < 1e-12 && (f.m22 - 4.0).abs() < 1e-12 && f.m12.abs() < 1e-12);
    assert!(TransformParams::new(0.0, 0.5).is_err());
}
