//! Invariant suites run by the `proptest` command against a corpus.

use std::fmt::Write as _;

use dirshape_core::edt::UNREACHABLE;
use dirshape_core::synth;
use dirshape_core::{
    compute_descriptor, descriptor_distance, distance_transform, validate_shape, BinaryMask, DescriptorGrid,
    MetricConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bench::pool;
use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::format::format_g;
use crate::io::decode_mask;
use crate::{Error, Result};

/// Masks with ids and class labels.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub masks: Vec<BinaryMask>,
}

impl Corpus {
    /// The fifteen synthetic shapes of [`synth::toy_corpus`].
    pub fn toy() -> Self {
        let mut c = Corpus::default();
        for s in synth::toy_corpus() {
            c.push(s.id, s.class, s.mask);
        }
        c
    }

    pub fn push(&mut self, id: String, label: String, mask: BinaryMask) {
        self.ids.push(id);
        self.labels.push(label);
        self.masks.push(mask);
    }

    /// Decodes every entry as is; connectivity is left to
    /// [`validation_suite`].
    pub fn load(dataset: &Dataset, run: &RunConfig) -> Result<Self> {
        let mut c = Corpus::default();
        for e in &dataset.entries {
            let bytes = std::fs::read(&e.path).map_err(Error::io(&e.path))?;
            let mut mask = decode_mask(&bytes, &e.path, run.threshold, run.invert)?;
            if run.largest_component {
                mask = mask.largest_component();
            }
            c.push(e.id.clone(), e.class.clone(), mask);
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    fn subset(&self, keep: &[usize]) -> Corpus {
        let mut c = Corpus::default();
        for &i in keep {
            c.push(self.ids[i].clone(), self.labels[i].clone(), self.masks[i].clone());
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub violations: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, summary: String, violations: Vec<String>) -> Self {
        Self { name, passed: violations.is_empty(), summary, violations }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} {}: {}\n", if self.passed { "PASS" } else { "FAIL" }, self.name, self.summary);
        for v in &self.violations {
            let _ = writeln!(out, "  {v}");
        }
        out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn g(v: f64) -> String {
    format_g(v, 6)
}

/// Connectivity and hole status of every mask; holes are repairable.
pub fn validation_suite(corpus: &Corpus) -> SuiteReport {
    let mut violations = Vec::new();
    let mut repaired = 0;
    for (id, m) in corpus.ids.iter().zip(&corpus.masks) {
        let v = validate_shape(m);
        if !v.connected {
            violations.push(format!("{id}: disconnected ({} components)", v.component_count));
        }
        if !v.hole_free {
            repaired += 1;
        }
    }
    SuiteReport::new(
        "validation",
        format!("{} shapes, {} disconnected, {repaired} with repairable holes", corpus.len(), violations.len()),
        violations,
    )
}

pub fn descriptors(corpus: &Corpus, run: &RunConfig) -> Result<Vec<DescriptorGrid>> {
    let results: Vec<dirshape_core::Result<DescriptorGrid>> =
        pool(run.workers).install(|| corpus.masks.par_iter().map(|m| compute_descriptor(m, &run.metric)).collect());
    let mut failures = Vec::new();
    let mut grids = Vec::new();
    for (id, r) in corpus.ids.iter().zip(results) {
        match r {
            Ok(g) => grids.push(g),
            Err(e) => failures.push((id.clone(), e.into())),
        }
    }
    if failures.is_empty() {
        Ok(grids)
    } else {
        Err(Error::Entries(failures))
    }
}

fn distance(a: &DescriptorGrid, b: &DescriptorGrid, cfg: &MetricConfig) -> f64 {
    descriptor_distance(a, b, cfg).map(|(d, _)| d).unwrap_or(f64::NAN)
}

/// Identity and symmetry within 1e-12 over all pairs; triangle inequality
/// with slack 1e-9 over `triples` seeded random triples, or over every
/// triple when `triples` is 0.
pub fn axioms_suite(corpus: &Corpus, grids: &[DescriptorGrid], cfg: &MetricConfig, triples: usize, seed: u64) -> SuiteReport {
    let n = grids.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = distance(&grids[i], &grids[j], cfg);
        }
    }
    let mut violations = Vec::new();
    let ids = &corpus.ids;
    for i in 0..n {
        if d[i * n + i].is_nan() || d[i * n + i].abs() > 1e-12 {
            violations.push(format!("d({0}, {0}) = {1}", ids[i], d[i * n + i]));
        }
        for j in i + 1..n {
            if (d[i * n + j] - d[j * n + i]).is_nan() || (d[i * n + j] - d[j * n + i]).abs() > 1e-12 {
                violations.push(format!("d({}, {}) != d({1}, {0})", ids[i], ids[j]));
            }
        }
    }
    let mut max_slack = f64::NEG_INFINITY;
    let mut checked = 0usize;
    let mut check = |i: usize, j: usize, k: usize, violations: &mut Vec<String>| {
        let slack = d[i * n + k] - d[i * n + j] - d[j * n + k];
        max_slack = max_slack.max(slack);
        checked += 1;
        if slack > 1e-9 {
            violations.push(format!("d({}, {}) exceeds the path through {} by {}", ids[i], ids[k], ids[j], g(slack)));
        }
    };
    if n >= 3 {
        if triples == 0 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k, &mut violations);
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..triples {
                let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                check(i, j, k, &mut violations);
            }
        }
    }
    let summary = if checked > 0 {
        format!("{n} shapes, {checked} triples, max triangle slack {}", g(max_slack))
    } else {
        format!("{n} shapes, too few for triples")
    };
    SuiteReport::new("metric-axioms", summary, violations)
}

/// A quarter turn shifts θ by half a period and a vertical flip negates
/// θ; both within `tol` relative per cell.
pub fn equivariance_suite(corpus: &Corpus, grids: &[DescriptorGrid], run: &RunConfig, tol: f64) -> SuiteReport {
    let cfg = &run.metric;
    let rows = cfg.thetas.len();
    if !rows.is_multiple_of(2) {
        return SuiteReport::new("equivariance", format!("skipped: {rows} θ samples do not contain quarter turns"), vec![]);
    }
    let checks: Vec<(f64, Vec<String>)> = pool(run.workers).install(|| {
        corpus
            .masks
            .par_iter()
            .zip(grids)
            .zip(&corpus.ids)
            .map(|((m, d), id)| {
                let mut worst: f64 = 0.0;
                let mut bad = Vec::new();
                let images = [("rotate90", m.rotate_quarter(1)), ("flip", m.reflect_x())];
                for (name, image) in images {
                    let e = match compute_descriptor(&image, cfg) {
                        Ok(e) => e,
                        Err(err) => {
                            bad.push(format!("{id} {name}: {err}"));
                            continue;
                        }
                    };
                    for i in 0..rows {
                        let k = if name == "flip" { cfg.reflected_index(i) } else { (i + rows / 2) % rows };
                        for j in 0..cfg.betas.len() {
                            let err = rel(e.get(k, j), d.get(i, j));
                            worst = worst.max(err);
                            if err > tol {
                                bad.push(format!("{id} {name} cell ({i},{j}): {} vs {}", g(e.get(k, j)), g(d.get(i, j))));
                            }
                        }
                    }
                }
                (worst, bad)
            })
            .collect()
    });
    let worst = checks.iter().map(|c| c.0).fold(0.0, f64::max);
    let violations = checks.into_iter().flat_map(|c| c.1).collect();
    SuiteReport::new("equivariance", format!("{} shapes, worst relative cell error {}", corpus.len(), g(worst)), violations)
}

/// Median distance over pairs with different labels, or over all pairs
/// when there is a single label.
pub fn median_inter_class(labels: &[String], grids: &[DescriptorGrid], cfg: &MetricConfig) -> Option<f64> {
    let n = grids.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let inter: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| labels[i] != labels[j]).collect();
    let chosen = if inter.is_empty() { pairs } else { inter };
    let mut d: Vec<f64> = chosen.iter().map(|&(i, j)| distance(&grids[i], &grids[j], cfg)).collect();
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len() / 2;
    Some(if d.len() % 2 == 1 { d[m] } else { 0.5 * (d[m - 1] + d[m]) })
}

/// Distances from a shape to its dilations by `1..=max_radius` pixels.
pub fn dilation_profile(mask: &BinaryMask, grid: &DescriptorGrid, cfg: &MetricConfig, max_radius: usize) -> Result<Vec<f64>> {
    (1..=max_radius)
        .map(|r| {
            let grown = compute_descriptor(&mask.dilated(r as f64), cfg)?;
            Ok(descriptor_distance(grid, &grown, cfg)?.0)
        })
        .collect()
}

/// A 1 px dilation moves a shape less than `first_fraction` of the median
/// inter-class distance, and the distance does not drop by more than
/// `jitter` of that median from one radius to the next.
pub fn continuity_suite(
    corpus: &Corpus,
    grids: &[DescriptorGrid],
    run: &RunConfig,
    max_radius: usize,
    first_fraction: f64,
    jitter: f64,
) -> SuiteReport {
    let cfg = &run.metric;
    let Some(median) = median_inter_class(&corpus.labels, grids, cfg) else {
        return SuiteReport::new("continuity", "skipped: fewer than two shapes".into(), vec![]);
    };
    let profiles: Vec<Result<Vec<f64>>> = pool(run.workers).install(|| {
        corpus.masks.par_iter().zip(grids).map(|(m, d)| dilation_profile(m, d, cfg, max_radius)).collect()
    });
    let mut violations = Vec::new();
    let mut worst_first: f64 = 0.0;
    for (id, p) in corpus.ids.iter().zip(profiles) {
        let p = match p {
            Ok(p) => p,
            Err(e) => {
                violations.push(format!("{id}: {e}"));
                continue;
            }
        };
        let ratio = p[0] / median;
        worst_first = worst_first.max(ratio);
        if ratio.is_nan() || ratio >= first_fraction {
            violations.push(format!("{id}: 1 px dilation moves {} of the median", g(ratio)));
        }
        for k in 1..p.len() {
            if p[k] < p[k - 1] - jitter * median {
                violations.push(format!("{id}: distance drops from {} to {} at {} px", g(p[k - 1]), g(p[k]), k + 1));
            }
        }
    }
    SuiteReport::new(
        "continuity",
        format!("median inter-class distance {}, worst 1 px ratio {}", g(median), g(worst_first)),
        violations,
    )
}

/// Random mask of size at most `max_side` squared with a random density.
pub fn random_mask(rng: &mut impl Rng, max_side: usize) -> BinaryMask {
    let (w, h) = (rng.random_range(1..=max_side), rng.random_range(1..=max_side));
    let density: f64 = rng.random_range(0.0..0.3);
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density))
}

fn brute_force_squared(mask: &BinaryMask) -> Vec<u64> {
    let fg: Vec<(i64, i64)> = (0..mask.height())
        .flat_map(|y| (0..mask.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y))
        .map(|(x, y)| (x as i64, y as i64))
        .collect();
    (0..mask.height() as i64)
        .flat_map(|y| (0..mask.width() as i64).map(move |x| (x, y)))
        .map(|(x, y)| fg.iter().map(|&(a, b)| ((x - a).pow(2) + (y - b).pow(2)) as u64).min().unwrap_or(UNREACHABLE))
        .collect()
}

/// Exact agreement of the distance transform with a brute-force scan.
pub fn edt_suite(count: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for k in 0..count {
        let m = random_mask(&mut rng, 64);
        if distance_transform(&m).squared() != brute_force_squared(&m).as_slice() {
            violations.push(format!("mask #{k} ({}x{}) differs", m.width(), m.height()));
        }
    }
    SuiteReport::new("distance-transform", format!("{count} random masks up to 64x64, seed {seed}"), violations)
}

/// Every suite; invalid shapes are reported by the validation suite and
/// left out of the others.
pub fn run_all(corpus: &Corpus, run: &RunConfig, triples: usize) -> Result<Vec<SuiteReport>> {
    let validation = validation_suite(corpus);
    let keep: Vec<usize> = (0..corpus.len()).filter(|&i| validate_shape(&corpus.masks[i]).connected).collect();
    let valid = corpus.subset(&keep);
    let grids = descriptors(&valid, run)?;
    Ok(vec![
        validation,
        axioms_suite(&valid, &grids, &run.metric, triples, run.seed),
        equivariance_suite(&valid, &grids, run, 0.01),
        continuity_suite(&valid, &grids, run, 5, 0.25, 0.05),
        edt_suite(50, run.seed),
    ])
}
