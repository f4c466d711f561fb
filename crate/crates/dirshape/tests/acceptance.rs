//! Acceptance criteria, one PASS/FAIL/SKIP line each. Exits nonzero when
//! any criterion fails.
//!
//! Criterion 7 needs the 7-class MPEG-7 CE-1 Part B subset; point
//! `DIRSHAPE_MPEG7` at a directory with one subdirectory per class.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dirshape::core::edt::UNREACHABLE;
use dirshape::core::synth::{self, ToyShape};
use dirshape::core::*;
use dirshape::{ingest_dataset, run_bench, DescriptorCache, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::*;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn describe_all(shapes: &[ToyShape], cfg: &MetricConfig) -> Vec<DescriptorGrid> {
    shapes.iter().map(|s| compute_descriptor(&s.mask, cfg).expect("descriptor")).collect()
}

fn dist(a: &DescriptorGrid, b: &DescriptorGrid, cfg: &MetricConfig) -> f64 {
    descriptor_distance(a, b, cfg).expect("distance").0
}

fn metric_axioms() -> Outcome {
    let start = Instant::now();
    let cfg = MetricConfig::default();
    let shapes = synth::toy_corpus();
    let grids = describe_all(&shapes, &cfg);
    let n = grids.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = dist(&grids[i], &grids[j], &cfg);
        }
    }
    let identity = (0..n).map(|i| d[i * n + i].abs()).fold(0.0, f64::max);
    let asym = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (d[i * n + j] - d[j * n + i]).abs()).fold(0.0, f64::max);
    let mut slack = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                slack = slack.max(d[i * n + k] - d[i * n + j] - d[j * n + k]);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        identity <= 1e-12 && asym <= 1e-12 && slack <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("{n} shapes, max d(a,a) {identity:e}, max asymmetry {asym:e}, max triangle slack {slack:e}, {elapsed:.2?}"),
    )
}

fn analytic_p() -> Outcome {
    // Annulus around a disk and rounded strip around a square, over the shape area.
    let (r, s, eps) = (36.0f64, 64.0f64, 8.0f64);
    let disk_expected = (2.0 * r * eps + eps * eps) / (r * r);
    let square_expected = (4.0 * s * eps + PI * eps * eps) / (s * s);
    let constants_ok = (disk_expected - 0.4938).abs() < 5e-5 && (square_expected - 0.5491).abs() < 5e-5;

    let timed = |mask: BinaryMask| {
        let t = Instant::now();
        let p = compute_p(&mask, eps).expect("P");
        (p, t.elapsed())
    };
    let (pd, td) = timed(synth::disk(r, 12));
    let (ps, ts) = timed(synth::square(s as usize, 12));
    let ok = constants_ok
        && rel(pd, disk_expected) <= 0.05
        && rel(ps, square_expected) <= 0.05
        && td < Duration::from_secs(1)
        && ts < Duration::from_secs(1);
    verdict(
        ok,
        format!(
            "disk {pd:.4} vs {disk_expected:.4} ({:+.1}%, {td:.1?}), square {ps:.4} vs {square_expected:.4} ({:+.1}%, {ts:.1?})",
            100.0 * (pd / disk_expected - 1.0),
            100.0 * (ps / square_expected - 1.0)
        ),
    )
}

/// Row of `grid` whose angle is `angle` modulo π.
fn row_at(grid: &DescriptorGrid, angle: f64) -> usize {
    (0..grid.rows())
        .find(|&j| {
            let d = (grid.thetas[j] - angle).rem_euclid(PI);
            d < 1e-9 || PI - d < 1e-9
        })
        .expect("angle on grid")
}

fn equivariance() -> Outcome {
    let cfg = MetricConfig::default();
    let (mut worst_rot, mut worst_flip) = (0.0f64, 0.0f64);
    let mut worst_id = None;
    for s in synth::toy_corpus() {
        let d = compute_descriptor(&s.mask, &cfg).expect("descriptor");
        let r = compute_descriptor(&s.mask.rotate_quarter(1), &cfg).expect("descriptor");
        let f = compute_descriptor(&s.mask.reflect_x(), &cfg).expect("descriptor");
        for i in 0..d.rows() {
            let rot_row = row_at(&d, d.thetas[i] + PI / 2.0);
            let flip_row = row_at(&d, -d.thetas[i]);
            for j in 0..d.cols() {
                let (er, ef) = (rel(r.get(rot_row, j), d.get(i, j)), rel(f.get(flip_row, j), d.get(i, j)));
                if er.max(ef) > worst_rot.max(worst_flip) {
                    worst_id = Some(s.id.clone());
                }
                worst_rot = worst_rot.max(er);
                worst_flip = worst_flip.max(ef);
            }
        }
    }
    verdict(
        worst_rot <= 0.01 && worst_flip <= 0.01,
        format!(
            "15 shapes, worst cell error rotation {worst_rot:.2e}, flip {worst_flip:.2e}{}",
            worst_id.map(|id| format!(" (worst shape {id})")).unwrap_or_default()
        ),
    )
}

fn bench_bytes(root: &Path, out: &Path, workers: usize) -> Result<Vec<Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_dirshape"))
        .args(["bench", "--max-n", "3", "--workers", &workers.to_string()])
        .arg(root)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    ["matrix.csv", "report.csv", "report.txt"]
        .iter()
        .map(|f| fs::read(out.join(f)).map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let data = dir.path().join("toy");
    let gen = Command::new(env!("CARGO_BIN_EXE_dirshape")).arg("gen-toy").arg(&data).status();
    if !gen.is_ok_and(|s| s.success()) {
        return Fail("gen-toy failed".into());
    }
    let runs: Result<Vec<_>, String> = [(1, "a"), (8, "b"), (1, "c"), (8, "d")]
        .iter()
        .map(|&(w, name)| bench_bytes(&data, &dir.path().join(name), w))
        .collect();
    match runs {
        Err(e) => Fail(format!("bench failed: {e}")),
        Ok(runs) => {
            let same = runs.windows(2).all(|w| w[0] == w[1]);
            let bytes: usize = runs[0].iter().map(Vec::len).sum();
            verdict(same, format!("4 runs (workers 1, 8, 1, 8), {bytes} bytes of artifacts, identical: {same}"))
        }
    }
}

fn brute_force_sq(mask: &BinaryMask) -> Vec<u64> {
    let mut out = Vec::with_capacity(mask.width() * mask.height());
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let mut best = UNREACHABLE;
            for v in 0..mask.height() {
                for u in 0..mask.width() {
                    if mask.get(u, v) {
                        let (dx, dy) = (x.abs_diff(u) as u64, y.abs_diff(v) as u64);
                        best = best.min(dx * dx + dy * dy);
                    }
                }
            }
            out.push(best);
        }
    }
    out
}

fn distance_transform_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_501);
    let mut mismatches = 0;
    for _ in 0..50 {
        let (w, h) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let density: f64 = rng.random_range(0.0..0.3);
        let mask = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density));
        if distance_transform(&mask).squared() != brute_force_sq(&mask).as_slice() {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("50 random masks up to 64x64, {mismatches} mismatches"))
}

fn continuity() -> Outcome {
    let cfg = MetricConfig::default();
    let shapes = synth::toy_corpus();
    let grids = describe_all(&shapes, &cfg);
    let mut inter = Vec::new();
    for i in 0..shapes.len() {
        for j in i + 1..shapes.len() {
            if shapes[i].class != shapes[j].class {
                inter.push(dist(&grids[i], &grids[j], &cfg));
            }
        }
    }
    inter.sort_by(f64::total_cmp);
    let median = if inter.len() % 2 == 1 {
        inter[inter.len() / 2]
    } else {
        0.5 * (inter[inter.len() / 2 - 1] + inter[inter.len() / 2])
    };
    let (mut worst_first, mut worst_drop) = (0.0f64, 0.0f64);
    let mut problems = Vec::new();
    for (s, g) in shapes.iter().zip(&grids) {
        let profile: Vec<f64> = (1..=5)
            .map(|r| dist(g, &compute_descriptor(&s.mask.dilated(r as f64), &cfg).expect("descriptor"), &cfg))
            .collect();
        worst_first = worst_first.max(profile[0] / median);
        if profile[0] >= 0.25 * median {
            problems.push(format!("{} first step {:.3}", s.id, profile[0] / median));
        }
        for k in 1..5 {
            let drop = (profile[k - 1] - profile[k]) / median;
            worst_drop = worst_drop.max(drop);
            if drop > 0.05 {
                problems.push(format!("{} drops {:.3} at {} px", s.id, drop, k + 1));
            }
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "median inter-class {median:.4}, worst 1 px ratio {worst_first:.3} (< 0.25), worst drop {worst_drop:.3} of median (<= 0.05){}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join(", ")) }
        ),
    )
}

fn mpeg7() -> Outcome {
    let Some(root) = std::env::var_os("DIRSHAPE_MPEG7") else {
        return Skip("DIRSHAPE_MPEG7 not set; criteria 1-6 and 8 carry acceptance".into());
    };
    let start = Instant::now();
    let dataset = match ingest_dataset(Path::new(&root)) {
        Ok(d) => d,
        Err(e) => return Fail(format!("cannot read dataset: {e}")),
    };
    let out = match run_bench(&dataset, &RunConfig::default(), 2, &DescriptorCache::in_memory()) {
        Ok(o) => o,
        Err(e) => return Fail(format!("bench failed: {e}")),
    };
    let elapsed = start.elapsed();
    let t = out.report.totals();
    verdict(
        t[0] >= 90.0 && t[1] >= 85.0 && elapsed < Duration::from_secs(120),
        format!(
            "{} shapes in {} classes, first {:.1}% (>= 90), second {:.1}% (>= 85), {elapsed:.1?}",
            dataset.len(),
            dataset.class_sizes().len(),
            t[0],
            t[1]
        ),
    )
}

fn toy_retrieval() -> Outcome {
    let cfg = MetricConfig::default();
    let shapes = synth::disks_and_squares();
    let grids = describe_all(&shapes, &cfg);
    let n = shapes.len();
    let d = |i: usize, j: usize| dist(&grids[i], &grids[j], &cfg);
    let mut correct = 0;
    let (mut max_intra, mut min_inter) = (0.0f64, f64::INFINITY);
    for i in 0..n {
        let nearest = (0..n).filter(|&j| j != i).min_by(|&a, &b| d(i, a).total_cmp(&d(i, b))).expect("neighbour");
        correct += usize::from(shapes[nearest].class == shapes[i].class);
        for j in (0..n).filter(|&j| j != i) {
            if shapes[i].class == shapes[j].class {
                max_intra = max_intra.max(d(i, j));
            } else {
                min_inter = min_inter.min(d(i, j));
            }
        }
    }
    let ids: Vec<String> = shapes.iter().map(|s| s.id.clone()).collect();
    let labels: Vec<String> = shapes.iter().map(|s| s.class.clone()).collect();
    let report = nth_neighbor_scores(&DistanceMatrix::from_descriptors(ids, &grids, &cfg).expect("matrix"), &labels, 1)
        .expect("report");
    let total = report.totals()[0];
    verdict(
        correct == n && total == 100.0 && max_intra < min_inter,
        format!("{correct}/{n} first neighbours by direct scan, report total {total:.1}%, max intra {max_intra:.4} < min inter {min_inter:.4}"),
    )
}

fn hand_ordering() -> Outcome {
    let cfg = MetricConfig { betas: vec![1.0, 2.0], ..MetricConfig::default() };
    let hand = synth::hand(1.0, 2);
    let g = compute_descriptor(&hand, &cfg).expect("descriptor");
    // Fingers run along the image y axis.
    let along = row_at(&g, PI / 2.0);
    let across = row_at(&g, 0.0);
    let (p_along, p_id, p_across) = (g.get(along, 1), g.get(along, 0), g.get(across, 1));
    verdict(
        p_along > p_id && p_id > p_across,
        format!("finger axis {p_along:.4} > identity {p_id:.4} > orthogonal {p_across:.4}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("metric axioms", metric_axioms),
        ("analytic P", analytic_p),
        ("equivariance", equivariance),
        ("determinism", determinism),
        ("distance transform oracle", distance_transform_oracle),
        ("continuity probe", continuity),
        ("MPEG-7 retrieval", mpeg7),
        ("toy retrieval", toy_retrieval),
        ("hand ordering", hand_ordering),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("criterion {} ({name}): {tag}: {detail}", k + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
