use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirshape::bench::{load_prepared, MATRIX_FILE, REPORT_FILE, TABLE_FILE};
use dirshape::core::{compute_descriptor, descriptor_distance, fill_holes, normalize_area, synth, validate_shape};
use dirshape::format::{grid_csv, header, report_table, write_record, Precision};
use dirshape::io::{load_mask, write_atomic, write_pgm};
use dirshape::suites::{run_all, Corpus};
use dirshape::{ingest_dataset, run_bench, write_bench, DescriptorCache, Error, Result, RunConfig};

#[derive(Parser)]
#[command(name = "dirshape", version, about = "Directional dilation descriptors for binary silhouettes")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command. Precedence: defaults, then
/// `--config`, then the individual flags.
#[derive(Args)]
struct Opts {
    /// Flat `key = value` config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Neighbourhood radius in pixels
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Target area every shape is rescaled to, in pixels
    #[arg(long, global = true)]
    area: Option<f64>,
    /// Decay of the exp(-kappa beta) weights
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Stretch directions, e.g. `-pi/4,0,pi/4,pi/2`
    #[arg(long, global = true, allow_hyphen_values = true)]
    thetas: Option<String>,
    /// Stretch factors, e.g. `1,3,5`
    #[arg(long, global = true)]
    betas: Option<String>,
    /// Gray level at or above which a pixel is foreground
    #[arg(long, global = true)]
    threshold: Option<u8>,
    /// Dark pixels are foreground
    #[arg(long, global = true)]
    invert: bool,
    /// Keep the largest component of disconnected inputs instead of failing
    #[arg(long, global = true)]
    largest_component: bool,
    /// Worker threads (0: one per core)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut run = RunConfig::default();
        if let Some(path) = &self.config {
            run.apply_file(path)?;
        }
        let numbers = [("epsilon", self.epsilon), ("area", self.area), ("kappa", self.kappa)];
        for (key, value) in numbers {
            if let Some(v) = value {
                run.set(key, &v.to_string())?;
            }
        }
        for (key, value) in [("thetas", &self.thetas), ("betas", &self.betas)] {
            if let Some(v) = value {
                run.set(key, v)?;
            }
        }
        if let Some(t) = self.threshold {
            run.threshold = t;
        }
        run.invert |= self.invert;
        run.largest_component |= self.largest_component;
        if let Some(w) = self.workers {
            run.workers = w;
        }
        if let Some(s) = self.seed {
            run.seed = s;
        }
        run.validate()?;
        Ok(run)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check connectivity and holes of each mask
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print the descriptor record of a mask
    Describe {
        path: PathBuf,
        /// Write the record here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also sample a dense `NxM` (theta x beta) surface as CSV
        #[arg(long, value_parser = parse_dense)]
        dense: Option<(usize, usize)>,
        /// Where the dense CSV goes (default: after the record)
        #[arg(long, requires = "dense")]
        dense_out: Option<PathBuf>,
        /// Save the hole-filled, area-normalized mask as PGM
        #[arg(long)]
        normalized_out: Option<PathBuf>,
    },
    /// Distance between two masks and the minimizing alignment
    Dist { a: PathBuf, b: PathBuf },
    /// Retrieval benchmark over a labelled dataset directory
    Bench {
        root: PathBuf,
        /// Score neighbours n = 1..=max-n
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        /// Output directory for matrix.csv, report.csv and report.txt
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Directory for cached descriptors
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run the invariant suites on a dataset (default: synthetic corpus)
    Proptest {
        root: Option<PathBuf>,
        /// Random triples for the triangle inequality (0: all)
        #[arg(long, default_value_t = 100)]
        triples: usize,
    },
    /// Write the synthetic corpus as PGM files
    GenToy {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ToySet::Full)]
        set: ToySet,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ToySet {
    /// Disks, squares, rectangles, crosses and rings
    Full,
    /// Three disks and three squares
    DiskSquare,
    /// A single synthetic hand
    Hand,
}

fn parse_dense(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = s.split_once(['x', 'X']).ok_or("expected NxM")?;
    let n: usize = n.trim().parse().map_err(|_| "bad N")?;
    let m: usize = m.trim().parse().map_err(|_| "bad M")?;
    if n == 0 || m == 0 {
        return Err("N and M must be positive".into());
    }
    Ok((n, m))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn cmd_validate(paths: &[PathBuf], run: &RunConfig) -> ExitCode {
    let (mut invalid, mut unreadable) = (false, false);
    for path in paths {
        let mask = match load_mask(path, run.threshold, run.invert) {
            Ok(m) if run.largest_component => m.largest_component(),
            Ok(m) => m,
            Err(e) => {
                println!("{}: error: {e}", path.display());
                unreadable |= !e.is_validation();
                invalid |= e.is_validation();
                continue;
            }
        };
        let v = validate_shape(&mask);
        if !v.connected {
            invalid = true;
            println!("{}: disconnected (components={})", path.display(), v.component_count);
        } else if !v.hole_free {
            println!("{}: hole_count={} (repairable, fills {} px)", path.display(), v.hole_count, v.hole_area);
        } else {
            println!("{}: OK", path.display());
        }
    }
    if unreadable {
        ExitCode::from(2)
    } else if invalid {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_describe(
    path: &Path,
    out: Option<&Path>,
    dense: Option<(usize, usize)>,
    dense_out: Option<&Path>,
    normalized_out: Option<&Path>,
    run: &RunConfig,
) -> Result<()> {
    let mask = load_prepared(path, run)?;
    let grid = compute_descriptor(&mask, &run.metric)?;
    let echo = run.echo();
    let mut text = write_record(&stem(path), &grid, &echo, Precision::Significant9);
    if let Some(p) = normalized_out {
        let normalized = normalize_area(&fill_holes(&mask), run.metric.area, run.metric.margin())?;
        write_pgm(p, &normalized)?;
    }
    if let Some((n, m)) = dense {
        let beta_max = run.metric.betas.iter().copied().fold(1.0, f64::max);
        let beta_max = if beta_max == 1.0 && m > 1 { 5.0 } else { beta_max };
        let mut fine = run.clone();
        fine.metric.thetas = (0..n).map(|k| -FRAC_PI_2 + PI * k as f64 / n as f64).collect();
        fine.metric.betas = if m == 1 {
            vec![beta_max]
        } else {
            (0..m).map(|k| 1.0 + (beta_max - 1.0) * k as f64 / (m - 1) as f64).collect()
        };
        let surface = compute_descriptor(&mask, &fine.metric)?;
        let csv = header(&fine.echo()) + &grid_csv(&surface, Precision::Significant9);
        match dense_out {
            Some(p) => write_atomic(p, csv.as_bytes())?,
            None => text = text + "\n" + &csv,
        }
    }
    emit(out, &text)
}

fn cmd_dist(a: &Path, b: &Path, run: &RunConfig) -> Result<()> {
    let da = compute_descriptor(&load_prepared(a, run)?, &run.metric)?;
    let db = compute_descriptor(&load_prepared(b, run)?, &run.metric)?;
    let (d, alignment) = descriptor_distance(&da, &db, &run.metric)?;
    println!("distance = {d:?}");
    println!("shift = {}", alignment.shift);
    println!("reflected = {}", alignment.reflected);
    Ok(())
}

fn cmd_bench(root: &Path, max_n: usize, out: &Path, cache: Option<&Path>, run: &RunConfig) -> Result<()> {
    let dataset = ingest_dataset(root)?;
    let cache = match cache {
        Some(dir) => DescriptorCache::on_disk(dir.to_path_buf())?,
        None => DescriptorCache::in_memory(),
    };
    let output = run_bench(&dataset, run, max_n, &cache)?;
    write_bench(out, &output, run)?;
    print!("{}", report_table(&output.report, &[]));
    log::info!("wrote {MATRIX_FILE}, {REPORT_FILE} and {TABLE_FILE} to {}", out.display());
    Ok(())
}

fn cmd_proptest(root: Option<&Path>, triples: usize, run: &RunConfig) -> Result<bool> {
    let corpus = match root {
        Some(r) => Corpus::load(&ingest_dataset(r)?, run)?,
        None => Corpus::toy(),
    };
    let reports = run_all(&corpus, run, triples)?;
    for r in &reports {
        print!("{}", r.render());
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn cmd_gen_toy(dir: &Path, set: ToySet) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    let shapes = match set {
        ToySet::Full => synth::toy_corpus(),
        ToySet::DiskSquare => synth::disks_and_squares(),
        ToySet::Hand => vec![synth::ToyShape { id: "hand-01".into(), class: "hand".into(), mask: synth::hand(1.0, 2) }],
    };
    for s in shapes {
        write_pgm(&dir.join(format!("{}.pgm", s.id)), &s.mask)?;
    }
    Ok(())
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_validation() { 1 } else { 2 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let run = match cli.opts.resolve() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Validate { paths } => return cmd_validate(paths, &run),
        Command::Describe { path, out, dense, dense_out, normalized_out } => {
            cmd_describe(path, out.as_deref(), *dense, dense_out.as_deref(), normalized_out.as_deref(), &run)
        }
        Command::Dist { a, b } => cmd_dist(a, b, &run),
        Command::Bench { root, max_n, out, cache } => cmd_bench(root, *max_n, out, cache.as_deref(), &run),
        Command::Proptest { root, triples } => match cmd_proptest(root.as_deref(), *triples, &run) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Command::GenToy { dir, set } => cmd_gen_toy(dir, *set),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => exit_for(&e),
    }
}
