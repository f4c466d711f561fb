//! Labelled shape collections on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::io::is_raster;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub id: String,
    pub class: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    /// Sorted by id.
    pub entries: Vec<Entry>,
    /// Non-fatal findings such as single-member classes.
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.id.clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.class.clone()).collect()
    }

    pub fn class_sizes(&self) -> BTreeMap<String, usize> {
        let mut sizes = BTreeMap::new();
        for e in &self.entries {
            *sizes.entry(e.class.clone()).or_insert(0) += 1;
        }
        sizes
    }
}

fn sorted_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)
        .map_err(Error::io(dir))?
        .map(|e| e.map(|e| e.path()).map_err(Error::io(dir)))
        .collect::<Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Builds a dataset from `root`. Each immediate subdirectory is a class
/// (ids `class/stem`); without subdirectories the class of `name-07.pgm`
/// is `name`, the part before the last `-`.
pub fn ingest_dataset(root: &Path) -> Result<Dataset> {
    let paths = sorted_dir(root)?;
    let dirs: Vec<&PathBuf> = paths.iter().filter(|p| p.is_dir()).collect();
    let mut ds = Dataset::default();
    if dirs.is_empty() {
        for p in paths.iter().filter(|p| is_raster(p)) {
            let id = stem(p);
            let class = id.rsplit_once('-').map_or(id.as_str(), |(c, _)| c).to_string();
            ds.entries.push(Entry { id, class, path: p.clone() });
        }
    } else {
        let loose = paths.iter().filter(|p| p.is_file() && is_raster(p)).count();
        if loose > 0 {
            ds.warnings.push(format!("{loose} raster files next to class directories ignored"));
        }
        for dir in dirs {
            let class = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            for p in sorted_dir(dir)?.into_iter().filter(|p| p.is_file() && is_raster(p)) {
                ds.entries.push(Entry { id: format!("{class}/{}", stem(&p)), class: class.clone(), path: p });
            }
        }
    }
    if ds.entries.is_empty() {
        return Err(Error::Dataset(format!("no raster files under {}", root.display())));
    }
    ds.entries.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = ds.entries.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::Dataset(format!("duplicate id {:?} ({} and {})", w[0].id, w[0].path.display(), w[1].path.display())));
    }
    for (class, n) in ds.class_sizes() {
        if n < 2 {
            ds.warnings.push(format!("class {class:?} has a single entry; its nth-neighbour accuracy is always 0"));
        }
    }
    for w in &ds.warnings {
        log::warn!("{w}");
    }
    Ok(ds)
}
