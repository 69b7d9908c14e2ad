//! `spz`: dataset statistics, kernel runs and comparisons, array traces and
//! synthetic matrices from the command line.
//!
//! Exit codes: 0 ok, 1 correctness failure, 2 usage error, 3 I/O error.

mod config;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use spz_core::kernels::{compare_kernels, esc_block_sweep, run_kernel, Algorithm, KernelConfig};
use spz_core::matrix::{dataset_stats_pair, load, reference_spgemm, save, GenSpec, MatrixError};
use spz_core::par::Execution;
use spz_core::systolic::{render_json, render_text, trace_sort, trace_zip, UopInput};
use spz_core::CsrMatrix;

use config::{FileConfig, Format, Overrides, Settings};
use report::*;

#[derive(Debug)]
pub enum CliError {
    Check(String),
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Check(m) | CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

fn matrix_error(source: &str, e: MatrixError) -> CliError {
    match e {
        MatrixError::BadGenSpec { .. } | MatrixError::DimensionMismatch(_) | MatrixError::UnsupportedDimension { .. } => {
            CliError::Usage(format!("{source}: {e}"))
        }
        _ => CliError::Io(format!("{source}: {e}")),
    }
}

#[derive(Parser)]
#[command(name = "spz", version, about = "Sparse matrix multiply on a simulated stream-sorting matrix ISA")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Array dimension R for the merge kernels.
    #[arg(short = 'R', long = "dim", global = true)]
    r: Option<usize>,
    /// Relative tolerance for --check and compare.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Include host wall-clock timings (makes JSON output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    /// TOML config file; flags take precedence over its values.
    #[arg(long, global = true, env = "SPZ_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["path", "gen"])))]
struct Input {
    /// Matrix Market (.mtx) or binary (.spzb) file.
    path: Option<PathBuf>,
    /// Generate the matrix instead, e.g. random:64x64:0.1:seed3.
    #[arg(long)]
    gen: Option<String>,
    /// Right-hand operand file (default: the matrix itself).
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Generate the right-hand operand.
    #[arg(long, conflicts_with = "rhs")]
    rhs_gen: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceKind {
    Sort,
    Zip,
}

#[derive(Subcommand)]
enum Command {
    /// Dataset statistics of A x A (or A x B).
    Stats {
        #[command(flatten)]
        input: Input,
        /// Rows per group for the work variation (default: R).
        #[arg(long)]
        group: Option<usize>,
    },
    /// Run one kernel.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        algo: Algorithm,
        /// Check the product against the reference.
        #[arg(long)]
        check: bool,
        /// Try each ESC block size and keep the cheapest.
        #[arg(long)]
        block_sweep: bool,
        /// Block sizes for --block-sweep.
        #[arg(long, value_delimiter = ',')]
        block_sizes: Option<Vec<usize>>,
        /// ESC rows per block.
        #[arg(long)]
        block_rows: Option<usize>,
    },
    /// Run several kernels and check each against the reference.
    Compare {
        #[command(flatten)]
        input: Input,
        /// Kernels to run (default: all).
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<Algorithm>>,
        #[arg(long)]
        block_rows: Option<usize>,
    },
    /// Cycle-level trace of one sort or zip micro-op.
    Trace {
        kind: TraceKind,
        /// Array size.
        #[arg(short, default_value_t = 3)]
        n: usize,
        /// West chunk keys, comma separated.
        #[arg(long, default_value = "")]
        west: String,
        /// North chunk keys, comma separated.
        #[arg(long, default_value = "")]
        north: String,
        /// Compare the rendered trace against this file.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Write a generated matrix.
    Gen {
        spec: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

struct Loaded {
    a: CsrMatrix,
    b: Option<CsrMatrix>,
    id: String,
    rhs: Option<String>,
    seed: Option<u64>,
}

impl Loaded {
    fn rhs(&self) -> &CsrMatrix {
        self.b.as_ref().unwrap_or(&self.a)
    }
}

fn seed_of(spec: &GenSpec) -> Option<u64> {
    match *spec {
        GenSpec::Random { seed, .. } | GenSpec::Skewed { seed, .. } | GenSpec::Banded { seed, .. } => Some(seed),
        GenSpec::Identity { .. } => None,
    }
}

fn build(spec: &str) -> Result<(CsrMatrix, GenSpec), CliError> {
    let g: GenSpec = spec.parse().map_err(|e| matrix_error("--gen", e))?;
    let m = g.build().map_err(|e| matrix_error("--gen", e))?;
    Ok((m, g))
}

fn read(path: &Path) -> Result<CsrMatrix, CliError> {
    load(path).map_err(|e| matrix_error(&path.display().to_string(), e))
}

fn load_input(input: &Input) -> Result<Loaded, CliError> {
    let (a, id, seed) = match (&input.path, &input.gen) {
        (Some(p), None) => (read(p)?, p.display().to_string(), None),
        (None, Some(s)) => {
            let (m, g) = build(s)?;
            (m, g.to_string(), seed_of(&g))
        }
        _ => return Err(CliError::Usage("give either a matrix file or --gen".into())),
    };
    let (b, rhs) = match (&input.rhs, &input.rhs_gen) {
        (Some(p), _) => (Some(read(p)?), Some(p.display().to_string())),
        (None, Some(s)) => {
            let (m, g) = build(s)?;
            (Some(m), Some(g.to_string()))
        }
        (None, None) => (None, None),
    };
    let l = Loaded { a, b, id, rhs, seed };
    if l.a.cols() != l.rhs().rows() {
        return Err(CliError::Usage(format!(
            "cannot multiply {}x{} by {}x{}",
            l.a.rows(),
            l.a.cols(),
            l.rhs().rows(),
            l.rhs().cols()
        )));
    }
    Ok(l)
}

fn matrix_info(l: &Loaded, group: usize) -> Result<MatrixInfo, CliError> {
    let stats = dataset_stats_pair(&l.a, l.rhs(), group, Execution::default()).map_err(|e| matrix_error(&l.id, e))?;
    Ok(MatrixInfo { id: l.id.clone(), rhs: l.rhs.clone(), stats })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn csv_out(r: Result<String, csv::Error>) -> Result<String, CliError> {
    r.map_err(|e| CliError::Io(format!("csv: {e}")))
}

fn report_config(s: &Settings, l: &Loaded, algos: &[Algorithm], sweep: bool, block_rows: usize) -> ReportConfig {
    ReportConfig {
        r: s.r,
        seed: l.seed,
        esc_block_rows: block_rows,
        block_sizes: sweep.then(|| s.block_sizes.clone()),
        rsort: algos.contains(&Algorithm::SpzRsort),
        tolerance: s.tol,
    }
}

fn counters_for(c: &spz_core::OpCounters, timings: bool) -> spz_core::OpCounters {
    if timings {
        c.clone()
    } else {
        c.without_timings()
    }
}

fn render_run(r: &RunReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(run_text(r)),
        Format::Json => Ok(to_json(r)),
        Format::Csv => csv_out(run_csv(r)),
    }
}

fn kernel_error(algo: Algorithm, e: spz_core::kernels::KernelError) -> CliError {
    use spz_core::kernels::KernelError;
    match e {
        KernelError::Matrix(m) => matrix_error(algo.name(), m),
        KernelError::BadBlockSize | KernelError::RMismatch { .. } => CliError::Usage(format!("{algo}: {e}")),
        other => CliError::Check(format!("{algo}: {other}")),
    }
}

fn cmd_stats(s: &Settings, input: &Input) -> Result<String, CliError> {
    let l = load_input(input)?;
    let r = StatsReport { schema: SCHEMA, tool: TOOL, command: "stats", matrix: matrix_info(&l, s.group_size)? };
    match s.format {
        Format::Text => Ok(stats_text(&r)),
        Format::Json => Ok(to_json(&r)),
        Format::Csv => csv_out(stats_csv(&r)),
    }
}

struct RunArgs {
    algo: Algorithm,
    check: bool,
    block_sweep: bool,
}

fn cmd_run(s: &Settings, input: &Input, args: RunArgs, timings: bool) -> Result<(String, Option<CliError>), CliError> {
    let RunArgs { algo, check, block_sweep } = args;
    if block_sweep && algo != Algorithm::Esc {
        return Err(CliError::Usage("--block-sweep only applies to --algo esc".into()));
    }
    let l = load_input(input)?;
    let cfg = KernelConfig { r: s.r, esc_block_rows: s.esc_block_rows, ..KernelConfig::default() };
    let t = Instant::now();
    let (result, sweep, block_rows) = if block_sweep {
        let (sw, res) = esc_block_sweep(&l.a, l.rhs(), &s.block_sizes).map_err(|e| kernel_error(algo, e))?;
        let runs = sw
            .runs
            .iter()
            .map(|(b, c)| SweepRun { block_rows: *b, best: *b == sw.best, counters: counters_for(c, timings) })
            .collect();
        (res, Some(runs), sw.best)
    } else {
        (run_kernel(algo, &l.a, l.rhs(), &cfg).map_err(|e| kernel_error(algo, e))?, None, s.esc_block_rows)
    };
    let host_ns = timings.then(|| t.elapsed().as_nanos() as u64);
    let verdict = if check {
        let reference = reference_spgemm(&l.a, l.rhs()).map_err(|e| matrix_error(&l.id, e))?;
        let v = spz_core::kernels::check_against(&result.c, &reference, s.tol);
        Some(Check { passed: v.is_ok(), divergence: v.err() })
    } else {
        None
    };
    let report = RunReport {
        schema: SCHEMA,
        tool: TOOL,
        command: "run",
        matrix: matrix_info(&l, s.group_size)?,
        config: report_config(s, &l, &[algo], block_sweep, block_rows),
        kernels: vec![KernelEntry {
            algorithm: algo,
            check: verdict,
            counters: counters_for(&result.counters, timings),
            host_ns,
            block_sweep: sweep,
        }],
    };
    let out = render_run(&report, s.format)?;
    Ok((out, failure(&report)))
}

fn failure(r: &RunReport) -> Option<CliError> {
    r.failed().map(|(algo, c)| {
        let at = c.divergence.map_or_else(String::new, |d| format!(" at {d}"));
        CliError::Check(format!("{algo} disagrees with the reference{at}"))
    })
}

fn cmd_compare(
    s: &Settings,
    input: &Input,
    algos: &[Algorithm],
    timings: bool,
) -> Result<(String, Option<CliError>), CliError> {
    let l = load_input(input)?;
    let cfg = KernelConfig { r: s.r, esc_block_rows: s.esc_block_rows, ..KernelConfig::default() };
    let t = Instant::now();
    let rep = compare_kernels(&l.a, l.rhs(), algos, &cfg, s.tol, Execution::default())
        .map_err(|e| CliError::Check(e.to_string()))?;
    let host_ns = timings.then(|| t.elapsed().as_nanos() as u64);
    let kernels = rep
        .runs
        .into_iter()
        .map(|run| KernelEntry {
            algorithm: run.algorithm,
            check: Some(Check { passed: run.verdict.is_ok(), divergence: run.verdict.err() }),
            counters: counters_for(&run.result.counters, timings),
            host_ns,
            block_sweep: None,
        })
        .collect();
    let report = RunReport {
        schema: SCHEMA,
        tool: TOOL,
        command: "compare",
        matrix: matrix_info(&l, s.group_size)?,
        config: report_config(s, &l, algos, false, s.esc_block_rows),
        kernels,
    };
    let out = render_run(&report, s.format)?;
    Ok((out, failure(&report)))
}

fn parse_keys(flag: &str, text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .ok()
                .filter(|&k| k != spz_core::SENTINEL)
                .ok_or_else(|| CliError::Usage(format!("--{flag}: bad key '{t}'")))
        })
        .collect()
}

fn cmd_trace(s: &Settings, kind: TraceKind, n: usize, west: &str, north: &str) -> Result<String, CliError> {
    if !(spz_core::MIN_R..=spz_core::MAX_R).contains(&n) {
        return Err(CliError::Usage(format!("-n must be within {}..={}", spz_core::MIN_R, spz_core::MAX_R)));
    }
    let input = UopInput::keys(&parse_keys("west", west)?, &parse_keys("north", north)?);
    let trace = match kind {
        TraceKind::Sort => trace_sort(n, &input),
        TraceKind::Zip => trace_zip(n, &input),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    match s.format {
        Format::Text if n > 8 => Err(CliError::Usage("text traces are limited to n <= 8; use --format json".into())),
        Format::Text => Ok(render_text(&trace)),
        Format::Json => Ok(to_json(&serde_json::json!({ "schema": SCHEMA, "trace": render_json(&trace) }))),
        Format::Csv => Err(CliError::Usage("traces render as text or json".into())),
    }
}

/// Line-level comparison; reports the first differing line.
fn compare_golden(path: &Path, actual: &str) -> Result<(), CliError> {
    let want = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if want == actual {
        return Ok(());
    }
    let (mut w, mut a) = (want.lines(), actual.lines());
    let mut line = 1;
    loop {
        match (w.next(), a.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return Err(CliError::Check(format!(
                    "trace differs from {} at line {line}:\n  expected: {}\n  got:      {}",
                    path.display(),
                    x.unwrap_or("<end of file>"),
                    y.unwrap_or("<end of output>")
                )))
            }
        }
    }
}

fn cmd_gen(s: &Settings, spec: &str, output: &Path) -> Result<String, CliError> {
    let (m, g) = build(spec)?;
    save(&m, output).map_err(|e| matrix_error(&output.display().to_string(), e))?;
    Ok(match s.format {
        Format::Json => to_json(&serde_json::json!({
            "schema": SCHEMA,
            "spec": g.to_string(),
            "path": output.display().to_string(),
            "rows": m.rows(),
            "cols": m.cols(),
            "nnz": m.nnz(),
        })),
        Format::Csv => format!("spec,rows,cols,nnz\n{g},{},{},{}\n", m.rows(), m.cols(), m.nnz()),
        Format::Text => format!("wrote {} ({} x {}, nnz {})\n", output.display(), m.rows(), m.cols(), m.nnz()),
    })
}

fn execute(cli: Cli) -> Result<(String, Option<CliError>), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut flags =
        Overrides { r: cli.r, tolerance: cli.tol, format: cli.format, ..Overrides::default() };
    match &cli.cmd {
        Command::Stats { group, .. } => flags.group_size = *group,
        Command::Run { block_rows, block_sizes, .. } => {
            flags.esc_block_rows = *block_rows;
            flags.block_sizes = block_sizes.clone();
        }
        Command::Compare { block_rows, .. } => flags.esc_block_rows = *block_rows,
        _ => {}
    }
    let s = Settings::resolve(flags, file)?;
    match &cli.cmd {
        Command::Stats { input, .. } => cmd_stats(&s, input).map(|o| (o, None)),
        Command::Run { input, algo, check, block_sweep, .. } => {
            cmd_run(&s, input, RunArgs { algo: *algo, check: *check, block_sweep: *block_sweep }, cli.timings)
        }
        Command::Compare { input, algos, .. } => {
            cmd_compare(&s, input, algos.as_deref().unwrap_or(&Algorithm::ALL), cli.timings)
        }
        Command::Trace { kind, n, west, north, golden } => {
            let out = cmd_trace(&s, *kind, *n, west, north)?;
            let verdict = golden.as_deref().map(|g| compare_golden(g, &out)).transpose();
            match verdict {
                Ok(_) => Ok((out, None)),
                Err(e @ CliError::Check(_)) => Ok((out, Some(e))),
                Err(e) => Err(e),
            }
        }
        Command::Gen { spec, output } => cmd_gen(&s, spec, output).map(|o| (o, None)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((out, verdict)) => {
            print!("{out}");
            match verdict {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("spz: {e}");
                    ExitCode::from(e.code())
                }
            }
        }
        Err(e) => {
            eprintln!("spz: {e}");
            ExitCode::from(e.code())
        }
    }
}
