//! Pairwise distance matrices and nth-neighbour retrieval scores.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::descriptor::DescriptorGrid;
use crate::metric::descriptor_distance;
use crate::{Error, MetricConfig, Result};

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Fills the upper triangle with `f(i, j)` for `i < j` and mirrors it.
    pub fn from_fn<F>(ids: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j)?;
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self::from_values(ids, values)
    }

    /// Checks symmetry, the zero diagonal and non-negativity.
    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::InvalidRetrieval(alloc::format!("{} values for {n} ids", values.len())));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidRetrieval(alloc::format!("nonzero diagonal at {}", ids[i])));
            }
            for j in 0..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidRetrieval(alloc::format!("bad distance {a} at ({i}, {j})")));
                }
                if (a - b).abs() > 1e-12 {
                    return Err(Error::InvalidRetrieval(alloc::format!("asymmetric entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self { ids, values })
    }

    /// Sequential evaluation of [`descriptor_distance`] over all pairs.
    pub fn from_descriptors(ids: Vec<String>, descriptors: &[DescriptorGrid], config: &MetricConfig) -> Result<Self> {
        if ids.len() != descriptors.len() {
            return Err(Error::InvalidRetrieval("one descriptor per id required".into()));
        }
        Self::from_fn(ids, |i, j| Ok(descriptor_distance(&descriptors[i], &descriptors[j], config)?.0))
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Other entries ordered by distance to `query`, ties by id.
    pub fn neighbours(&self, query: usize) -> Vec<usize> {
        let mut others: Vec<usize> = (0..self.len()).filter(|&j| j != query).collect();
        others.sort_by(|&a, &b| {
            self.get(query, a).total_cmp(&self.get(query, b)).then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        others
    }
}

/// Correct nth-neighbour counts for one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassScores {
    pub class: String,
    pub size: usize,
    /// `correct[n - 1]`: queries of this class whose nth neighbour shares it.
    pub correct: Vec<usize>,
}

impl ClassScores {
    /// Accuracy in percent for `n = 1..=max_n`.
    pub fn percent(&self) -> Vec<f64> {
        self.correct.iter().map(|&c| 100.0 * c as f64 / self.size as f64).collect()
    }
}

/// Per-class and overall nth-neighbour accuracies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrievalReport {
    pub max_n: usize,
    /// Sorted by class name.
    pub classes: Vec<ClassScores>,
}

impl RetrievalReport {
    pub fn total_queries(&self) -> usize {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn total_correct(&self) -> Vec<usize> {
        (0..self.max_n).map(|n| self.classes.iter().map(|c| c.correct[n]).sum()).collect()
    }

    /// Overall accuracy in percent: the entry-weighted mean of the class rows.
    pub fn totals(&self) -> Vec<f64> {
        let q = self.total_queries() as f64;
        self.total_correct().iter().map(|&c| 100.0 * c as f64 / q).collect()
    }
}

/// For every entry, ranks all others by distance (ties by id) and checks
/// whether the nth one has the same label, for `n = 1..=max_n`.
pub fn nth_neighbor_scores(matrix: &DistanceMatrix, labels: &[String], max_n: usize) -> Result<RetrievalReport> {
    let n = matrix.len();
    if labels.len() != n {
        return Err(Error::InvalidRetrieval(alloc::format!("{} labels for {n} entries", labels.len())));
    }
    if max_n == 0 || max_n >= n {
        return Err(Error::InvalidRetrieval(alloc::format!("max_n must be in 1..{n}, got {max_n}")));
    }
    let mut classes: BTreeMap<&str, ClassScores> = BTreeMap::new();
    for (q, label) in labels.iter().enumerate() {
        let entry = classes
            .entry(label)
            .or_insert_with(|| ClassScores { class: label.clone(), size: 0, correct: vec![0; max_n] });
        entry.size += 1;
        for (rank, &other) in matrix.neighbours(q).iter().take(max_n).enumerate() {
            if labels[other] == *label {
                entry.correct[rank] += 1;
            }
        }
    }
    Ok(RetrievalReport { max_n, classes: classes.into_values().collect() })
}
