//! Descriptors for a dataset, the pairwise matrix and retrieval scores.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use dirshape_core::{
    compute_descriptor, descriptor_distance, nth_neighbor_scores, validate_shape, BinaryMask, DescriptorGrid,
    DistanceMatrix, RetrievalReport,
};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::format::{matrix_csv, parse_record, report_csv, report_table, write_record, Precision};
use crate::io::{decode_mask, write_atomic};
use crate::{Error, Result};

/// Decodes, optionally keeps the largest component, and rejects shapes
/// that are still disconnected. Holes are left for the descriptor to fill.
pub fn prepare_mask(bytes: &[u8], path: &Path, run: &RunConfig) -> Result<BinaryMask> {
    let mut mask = decode_mask(bytes, path, run.threshold, run.invert)?;
    if run.largest_component {
        mask = mask.largest_component();
    }
    let v = validate_shape(&mask);
    if !v.connected {
        return Err(Error::Disconnected(path.to_path_buf(), v.component_count));
    }
    Ok(mask)
}

pub fn load_prepared(path: &Path, run: &RunConfig) -> Result<BinaryMask> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    prepare_mask(&bytes, path, run)
}

/// Descriptors keyed by a hash of the file content and of every setting
/// that influences them. Always memoized in memory; also stored in `dir`
/// when one is given.
#[derive(Debug, Default)]
pub struct DescriptorCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, DescriptorGrid>>,
}

impl DescriptorCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        Ok(Self { dir: Some(dir), memory: Mutex::default() })
    }

    pub fn key(bytes: &[u8], run: &RunConfig) -> String {
        let m = &run.metric;
        let mut h = Sha256::new();
        h.update(bytes);
        let settings = format!(
            "\0{:?}|{:?}|{:?}|{:?}|{}|{}|{}",
            m.epsilon, m.area, m.thetas, m.betas, run.threshold, run.invert, run.largest_component
        );
        h.update(settings.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn file(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.rec")))
    }

    fn lookup(&self, key: &str) -> Option<DescriptorGrid> {
        if let Some(g) = self.memory.lock().expect("cache lock").get(key) {
            return Some(g.clone());
        }
        let path = self.file(key)?;
        let text = fs::read_to_string(&path).ok()?;
        match parse_record(&text, &path.display().to_string()) {
            Ok((_, grid)) => {
                self.memory.lock().expect("cache lock").insert(key.to_string(), grid.clone());
                Some(grid)
            }
            Err(e) => {
                log::warn!("ignoring unreadable cache entry: {e}");
                None
            }
        }
    }

    fn store(&self, key: &str, id: &str, grid: &DescriptorGrid) -> Result<()> {
        self.memory.lock().expect("cache lock").insert(key.to_string(), grid.clone());
        if let Some(path) = self.file(key) {
            write_atomic(&path, write_record(id, grid, &[], Precision::RoundTrip).as_bytes())?;
        }
        Ok(())
    }

    /// The descriptor of the raster file `path`, computed at most once.
    pub fn describe(&self, id: &str, path: &Path, run: &RunConfig) -> Result<DescriptorGrid> {
        let bytes = fs::read(path).map_err(Error::io(path))?;
        let key = Self::key(&bytes, run);
        if let Some(g) = self.lookup(&key) {
            return Ok(g);
        }
        let mask = prepare_mask(&bytes, path, run)?;
        let grid = compute_descriptor(&mask, &run.metric)?;
        self.store(&key, id, &grid)?;
        Ok(grid)
    }
}

pub(crate) fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool")
}

/// One descriptor per entry, in entry order. Fails with every failing id
/// if any entry fails.
pub fn compute_descriptors(dataset: &Dataset, run: &RunConfig, cache: &DescriptorCache) -> Result<Vec<DescriptorGrid>> {
    run.validate()?;
    let results: Vec<Result<DescriptorGrid>> = pool(run.workers).install(|| {
        dataset.entries.par_iter().map(|e| cache.describe(&e.id, &e.path, run)).collect()
    });
    let mut grids = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (entry, r) in dataset.entries.iter().zip(results) {
        match r {
            Ok(g) => grids.push(g),
            Err(e) => failures.push((entry.id.clone(), e)),
        }
    }
    if failures.is_empty() {
        Ok(grids)
    } else {
        Err(Error::Entries(failures))
    }
}

/// All pairwise distances; each entry is computed independently so the
/// result does not depend on the worker count.
pub fn matrix_from_grids(ids: Vec<String>, grids: &[DescriptorGrid], run: &RunConfig) -> Result<DistanceMatrix> {
    let n = grids.len();
    let rows: Vec<Vec<f64>> = pool(run.workers).install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| descriptor_distance(&grids[i], &grids[j], &run.metric).map(|(d, _)| d))
                    .collect::<dirshape_core::Result<Vec<f64>>>()
            })
            .collect::<dirshape_core::Result<Vec<_>>>()
    })?;
    let mut values = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix::from_values(ids, values)?)
}

pub fn compute_matrix(dataset: &Dataset, run: &RunConfig, cache: &DescriptorCache) -> Result<DistanceMatrix> {
    let grids = compute_descriptors(dataset, run, cache)?;
    matrix_from_grids(dataset.ids(), &grids, run)
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub matrix: DistanceMatrix,
    pub report: RetrievalReport,
}

pub fn run_bench(dataset: &Dataset, run: &RunConfig, max_n: usize, cache: &DescriptorCache) -> Result<BenchOutput> {
    let matrix = compute_matrix(dataset, run, cache)?;
    let report = nth_neighbor_scores(&matrix, &dataset.labels(), max_n)?;
    Ok(BenchOutput { matrix, report })
}

pub const MATRIX_FILE: &str = "matrix.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const TABLE_FILE: &str = "report.txt";

/// Renders all three artifacts first, then writes each atomically.
pub fn write_bench(out_dir: &Path, output: &BenchOutput, run: &RunConfig) -> Result<()> {
    let echo = run.echo();
    let files = [
        (MATRIX_FILE, matrix_csv(&output.matrix, &echo)),
        (REPORT_FILE, report_csv(&output.report, &echo)),
        (TABLE_FILE, report_table(&output.report, &echo)),
    ];
    fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    for (name, text) in files {
        write_atomic(&out_dir.join(name), text.as_bytes())?;
    }
    Ok(())
}
