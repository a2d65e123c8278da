//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit code: 0 on success, 1 on data errors
//! or validation mismatches, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::geometry::Ball;
use crate::io::{
    parse_pdb_filtered, parse_xyzr, read_complex, stats_csv, write_complex, PdbFilter, RadiusTable,
};
use crate::pipeline::{
    complex_stats, compute_alpha_complex, compute_alpha_complex_profiled, AlphaComplex, Mode,
    PipelineConfig,
};
use crate::random::RandomInstance;

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "ALPHAX_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "alphax",
    version,
    about = "Alpha complexes of weighted points in 3D"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the alpha complex of an input file.
    Compute(ComputeArgs),
    /// Compare the grid pipeline against the exhaustive reference.
    Validate(ValidateArgs),
    /// Print per-dimension counts as CSV.
    Stats(StatsArgs),
    /// Time the pipeline stages.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Xyzr,
    Pdb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Grid,
    Naive,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file (XYZR or PDB).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted (.pdb/.ent are PDB).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Radius table file with `ELEMENT RADIUS` lines (PDB input).
    #[arg(long)]
    radius_table: Option<PathBuf>,
    /// Keep HETATM records other than water (PDB input).
    #[arg(long)]
    include_het: bool,
    /// Keep water molecules (PDB input).
    #[arg(long)]
    include_water: bool,
    /// Keep hydrogen atoms (PDB input).
    #[arg(long)]
    include_h: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// α in Å², compared directly with power distances.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Balls per chunk (default: one chunk).
    #[arg(long)]
    chunk_size: Option<usize>,
    /// Worker threads (default: hardware threads, or $ALPHAX_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    /// Insert every vertex without its witness test.
    #[arg(long)]
    biomolecule: bool,
}

#[derive(Debug, Args)]
struct RandomArgs {
    /// Generate N random balls instead of reading --input.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Minimum center separation (Å).
    #[arg(long, default_value_t = 1.0)]
    min_sep: f64,
    /// Radius range LO:HI (Å).
    #[arg(long, default_value = "1.0:2.0", value_parser = parse_range)]
    radius_range: (f64, f64),
    /// Centers per Å³.
    #[arg(long, default_value_t = RandomInstance::DEFAULT_DENSITY)]
    density: f64,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Output path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "grid")]
    mode: ModeArg,
    /// Also write CSV counts to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    random: RandomArgs,
    /// Number of random instances (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    trials: u64,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// A complex document written by `compute`.
    #[arg(long, conflicts_with = "input")]
    complex: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// α when computing from --input.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    biomolecule: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    random: RandomArgs,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Comma-separated worker counts.
    #[arg(long, value_delimiter = ',')]
    workers: Vec<usize>,
    #[arg(long)]
    chunk_size: Option<usize>,
    #[arg(long)]
    biomolecule: bool,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(format!("need 0 < LO <= HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn config(run: &RunArgs, mode: Mode) -> PipelineConfig {
    PipelineConfig::new(run.alpha)
        .with_mode(mode)
        .with_chunk_size(run.chunk_size)
        .with_workers(run.workers.unwrap_or_else(default_workers))
        .with_biomolecule_mode(run.biomolecule)
}

fn load_balls(args: &InputArgs) -> Result<Vec<Ball>> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| anyhow!("--input is required"))?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = args.format.unwrap_or_else(|| format_from_extension(path));
    let balls = match format {
        Format::Xyzr => parse_xyzr(&text),
        Format::Pdb => {
            let table = match &args.radius_table {
                Some(p) => {
                    let t = std::fs::read_to_string(p)
                        .with_context(|| format!("cannot read {}", p.display()))?;
                    RadiusTable::parse(&t).with_context(|| p.display().to_string())?
                }
                None => RadiusTable::default(),
            };
            let filter = PdbFilter {
                include_het: args.include_het,
                include_water: args.include_water,
                include_hydrogen: args.include_h,
            };
            parse_pdb_filtered(&text, &table, &filter)
        }
    }
    .with_context(|| path.display().to_string())?;
    if balls.is_empty() {
        bail!("{}: no balls", path.display());
    }
    Ok(balls)
}

fn format_from_extension(path: &Path) -> Format {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
    {
        Some(e) if e == "pdb" || e == "ent" => Format::Pdb,
        _ => Format::Xyzr,
    }
}

fn random_balls(r: &RandomArgs, n: usize, seed: u64) -> Result<Vec<Ball>> {
    Ok(RandomInstance {
        n,
        seed,
        min_sep: r.min_sep,
        radius_range: r.radius_range,
        density: r.density,
    }
    .generate()?)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a, out, err),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn cmd_compute(a: ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let balls = load_balls(&a.input)?;
    let mode = match a.mode {
        ModeArg::Grid => Mode::Grid,
        ModeArg::Naive => Mode::Naive,
    };
    let k = compute_alpha_complex(&balls, &config(&a.run, mode))?;
    let doc = write_complex(&k);
    match &a.output {
        Some(p) => {
            std::fs::write(p, &doc).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => out.write_all(doc.as_bytes())?,
    }
    if a.stats {
        err.write_all(stats_csv(&complex_stats(&k)).as_bytes())?;
    }
    Ok(0)
}

fn fmt_counts(k: &AlphaComplex) -> String {
    let c = complex_stats(k).counts;
    format!("({},{},{},{})", c[0], c[1], c[2], c[3])
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let instances: Vec<(String, Vec<Ball>)> = match (a.random.random, &a.input.input) {
        (Some(_), Some(_)) => bail!("--random and --input are mutually exclusive"),
        (None, None) => bail!("one of --input or --random is required"),
        (None, Some(p)) => vec![(p.display().to_string(), load_balls(&a.input)?)],
        (Some(n), None) => (0..a.trials)
            .map(|t| {
                let seed = a.random.seed.wrapping_add(t);
                Ok((
                    format!("random n={n} seed={seed}"),
                    random_balls(&a.random, n, seed)?,
                ))
            })
            .collect::<Result<_>>()?,
    };

    let grid_cfg = config(&a.run, Mode::Grid);
    let naive_cfg = config(&a.run, Mode::Naive);
    let wider_cfg = PipelineConfig {
        alpha: a.run.alpha + 1.0,
        ..grid_cfg.clone()
    };

    let mut mismatches = 0usize;
    let mut property_failures = 0usize;
    let mut listed = 0usize;
    for (label, balls) in &instances {
        let grid = compute_alpha_complex(&balls[..], &grid_cfg).with_context(|| label.clone())?;
        let naive = compute_alpha_complex(&balls[..], &naive_cfg).with_context(|| label.clone())?;
        let wider = compute_alpha_complex(&balls[..], &wider_cfg).with_context(|| label.clone())?;
        let diff = grid.symmetric_difference(&naive);
        let per_dim = diff.each_ref().map(Vec::len);
        let closed = grid.is_closed() && naive.is_closed();
        let monotone = grid.is_subcomplex_of(&wider);
        writeln!(
            out,
            "{label}: complex {} mismatches [{},{},{},{}] closure {} monotonicity {}",
            fmt_counts(&grid),
            per_dim[0],
            per_dim[1],
            per_dim[2],
            per_dim[3],
            if closed { "ok" } else { "FAILED" },
            if monotone { "ok" } else { "FAILED" },
        )?;
        mismatches += per_dim.iter().sum::<usize>();
        property_failures += usize::from(!closed) + usize::from(!monotone);
        for s in diff.iter().flatten() {
            if listed == 20 {
                break;
            }
            let side = if grid.contains(s) {
                "grid only"
            } else {
                "reference only"
            };
            writeln!(out, "  {side}: {s}")?;
            listed += 1;
        }
    }
    writeln!(
        out,
        "{mismatches} mismatches, {property_failures} property failures"
    )?;
    Ok(if mismatches == 0 && property_failures == 0 {
        0
    } else {
        1
    })
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write) -> Result<i32> {
    let k = match (&a.complex, &a.input.input) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            read_complex(&text).with_context(|| p.display().to_string())?
        }
        (None, Some(_)) => {
            let alpha = a
                .alpha
                .ok_or_else(|| anyhow!("--alpha is required with --input"))?;
            let balls = load_balls(&a.input)?;
            let cfg = PipelineConfig::new(alpha)
                .with_workers(default_workers())
                .with_biomolecule_mode(a.biomolecule);
            compute_alpha_complex(&balls, &cfg)?
        }
        (None, None) => bail!("one of --complex or --input is required"),
    };
    out.write_all(stats_csv(&complex_stats(&k)).as_bytes())?;
    Ok(0)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let workers = if a.workers.is_empty() {
        vec![default_workers()]
    } else {
        a.workers.clone()
    };
    if workers.contains(&0) {
        bail!("worker counts must be positive");
    }
    writeln!(out, "workers,repeat,n,alpha,stage,seconds")?;
    for &w in &workers {
        for rep in 0..a.repeat {
            let wall = Instant::now();
            let t = Instant::now();
            let balls = match (a.random.random, &a.input.input) {
                (Some(_), Some(_)) => bail!("--random and --input are mutually exclusive"),
                (Some(n), None) => random_balls(&a.random, n, a.random.seed)?,
                (None, Some(_)) => load_balls(&a.input)?,
                (None, None) => bail!("one of --input or --random is required"),
            };
            let load = t.elapsed();
            let cfg = PipelineConfig::new(a.alpha)
                .with_chunk_size(a.chunk_size)
                .with_workers(w)
                .with_biomolecule_mode(a.biomolecule);
            let (k, mut timings) = compute_alpha_complex_profiled(&balls, &cfg)?;
            let t = Instant::now();
            let doc = write_complex(&k);
            std::hint::black_box(&doc);
            timings.io = load + t.elapsed();
            let total = wall.elapsed();
            for (stage, d) in timings.rows() {
                writeln!(
                    out,
                    "{w},{rep},{},{},{stage},{:.9}",
                    balls.len(),
                    a.alpha,
                    d.as_secs_f64()
                )?;
            }
            writeln!(
                out,
                "{w},{rep},{},{},total,{:.9}",
                balls.len(),
                a.alpha,
                total.as_secs_f64()
            )?;
        }
    }
    Ok(0)
}
