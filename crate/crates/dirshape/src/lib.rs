//! Files, datasets and benchmarks around [`dirshape_core`]: raster input,
//! descriptor records, the parallel distance matrix, retrieval reports and
//! the invariant suites behind the `dirshape` command.

pub mod bench;
pub mod config;
pub mod dataset;
mod error;
pub mod format;
pub mod io;
pub mod suites;

pub use bench::{compute_matrix, run_bench, write_bench, BenchOutput, DescriptorCache};
pub use config::RunConfig;
pub use dataset::{ingest_dataset, Dataset, Entry};
pub use error::{Error, Result};
pub use io::{load_mask, write_pgm};

pub use dirshape_core as core;
