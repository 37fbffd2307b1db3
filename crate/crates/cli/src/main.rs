//! `qdd`: build, simulate and verify circuits with decision diagrams.
//!
//! Every command except `gen` without `--output` prints exactly one JSON
//! object on standard output. Diagnostics go to standard error.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 resource or
//! contract errors, 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use qdd::circuit::{gen_qft, gen_supremacy, parse};
use qdd::oracle::{compare, dense_from_circuit, ORACLE_MAX_QUBITS};
use qdd::{Circuit, Config, Edge, Error, Package, TableMode};
use serde::Serialize;

/// Largest state for `--amplitudes`, which expands the full vector.
const MAX_AMPLITUDE_QUBITS: usize = 24;

#[derive(Parser)]
#[command(name = "qdd", version, about = "Decision-diagram quantum circuit tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the functionality (unitary) DD of a circuit.
    Build {
        circuit: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Apply the circuit to |0…0⟩ and report amplitudes.
    Simulate {
        circuit: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// `all` or `top-K` (largest magnitudes first).
        #[arg(long, default_value = "all", value_parser = parse_amplitudes)]
        amplitudes: Amplitudes,
    },
    /// Compare the functionality DD with a dense matrix product (at most 12 qubits).
    Verify {
        circuit: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Build with both real-table variants and report the speedup.
    Bench {
        circuit: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Give up on a variant after this many seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
    },
    /// Write a generated circuit.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file; standard output if omitted.
        #[arg(long, short, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Quantum Fourier transform without the final reversal.
    Qft { qubits: usize },
    /// Random grid circuit with CZ layers and {t, sx, sy} single-qubit gates.
    Supremacy {
        rows: usize,
        cols: usize,
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Absolute tolerance of the real-value table.
    #[arg(long, default_value_t = 1e-13)]
    epsilon: f64,
    /// Buckets of the real-value table.
    #[arg(long, default_value_t = 65536)]
    buckets: usize,
    /// Unique-table insertions between garbage collections.
    #[arg(long, default_value_t = 131_072)]
    gc_threshold: usize,
    /// Use only the first K gates.
    #[arg(long)]
    truncate: Option<usize>,
    /// Write the resulting DD in DOT format.
    #[arg(long)]
    export_dot: Option<PathBuf>,
    /// Replace the bucketed real table by a linear-scan array.
    #[arg(long)]
    linear_scan_table: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Amplitudes {
    All,
    Top(usize),
}

fn parse_amplitudes(s: &str) -> Result<Amplitudes, String> {
    if s == "all" {
        return Ok(Amplitudes::All);
    }
    s.strip_prefix("top-")
        .and_then(|k| k.parse().ok())
        .map(Amplitudes::Top)
        .ok_or_else(|| format!("expected `all` or `top-K`, got `{s}`"))
}

#[derive(Serialize)]
struct RunStats {
    qubits: usize,
    op_count: usize,
    dd_size: usize,
    distinct_complex_entries: usize,
    peak_complex_entries: usize,
    peak_unique_table_nodes: usize,
    gc_runs: u64,
    wall_time_ms: f64,
}

#[derive(Serialize)]
struct Amplitude {
    index: usize,
    basis: String,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    stats: RunStats,
    amplitudes: Vec<Amplitude>,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    stats: RunStats,
    max_deviation: f64,
    worst_entry: (usize, usize),
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct BenchReport {
    op_count: usize,
    bucketed: Option<RunStats>,
    linear_scan: Option<RunStats>,
    speedup: Option<f64>,
}

#[derive(Serialize)]
struct GenReport {
    path: PathBuf,
    qubits: usize,
    op_count: usize,
}

/// A failure and the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 1, msg: msg.into() }
    }

    fn resource(msg: impl Into<String>) -> Failure {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse { .. } => Failure::input(e.to_string()),
            _ => Failure::resource(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn load(path: &Path, truncate: Option<usize>) -> CliResult<Circuit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let c = parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(match truncate {
        Some(k) => c.truncated(k),
        None => c,
    })
}

fn package(run: &RunArgs, n: usize) -> CliResult<Package> {
    let config = Config {
        epsilon: run.epsilon,
        real_buckets: run.buckets,
        gc_threshold: run.gc_threshold,
        table_mode: if run.linear_scan_table { TableMode::LinearScan } else { TableMode::Bucketed },
        ..Config::default().with_max_qubits(n)
    };
    Ok(Package::new(config)?)
}

fn stats(p: &Package, c: &Circuit, root: Edge, elapsed: Duration) -> RunStats {
    let table = p.table_stats();
    RunStats {
        qubits: c.qubits(),
        op_count: c.len(),
        dd_size: p.dd_size(root),
        distinct_complex_entries: table.live_entries,
        peak_complex_entries: table.peak_entries,
        peak_unique_table_nodes: p.stats().peak_nodes,
        gc_runs: p.stats().gc_runs,
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    }
}

fn export_dot(p: &Package, root: Edge, path: &Option<PathBuf>) -> CliResult<()> {
    if let Some(path) = path {
        std::fs::write(path, p.to_dot(root))
            .map_err(|e| Failure::resource(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn emit<T: Serialize>(value: &T) -> CliResult<()> {
    let json = serde_json::to_string(value).map_err(|e| Failure::resource(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn cmd_build(path: &Path, run: &RunArgs) -> CliResult<()> {
    let c = load(path, run.truncate)?;
    let mut p = package(run, c.qubits())?;
    let start = Instant::now();
    let u = p.build_functionality(&c)?;
    let s = stats(&p, &c, u, start.elapsed());
    export_dot(&p, u, &run.export_dot)?;
    emit(&s)
}

fn cmd_simulate(path: &Path, run: &RunArgs, which: Amplitudes) -> CliResult<()> {
    let c = load(path, run.truncate)?;
    let n = c.qubits();
    if n > MAX_AMPLITUDE_QUBITS {
        return Err(Failure::resource(format!(
            "amplitude listing supports at most {MAX_AMPLITUDE_QUBITS} qubits, circuit has {n}"
        )));
    }
    let mut p = package(run, n)?;
    let start = Instant::now();
    let v = p.simulate(&c)?;
    let s = stats(&p, &c, v, start.elapsed());
    export_dot(&p, v, &run.export_dot)?;
    let mut amps: Vec<Amplitude> = p
        .to_dense_vector(v, n)?
        .into_iter()
        .enumerate()
        .map(|(index, a)| Amplitude {
            index,
            basis: format!("{index:0n$b}"),
            re: a.re,
            im: a.im,
            probability: a.norm_sqr(),
        })
        .collect();
    if let Amplitudes::Top(k) = which {
        amps.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.index.cmp(&b.index)));
        amps.truncate(k);
    }
    emit(&SimulateReport { stats: s, amplitudes: amps })
}

fn cmd_verify(path: &Path, run: &RunArgs, tol: f64) -> CliResult<bool> {
    let c = load(path, run.truncate)?;
    if c.qubits() > ORACLE_MAX_QUBITS {
        return Err(Failure::resource(format!(
            "verify supports at most {ORACLE_MAX_QUBITS} qubits, circuit has {}",
            c.qubits()
        )));
    }
    let mut p = package(run, c.qubits())?;
    let start = Instant::now();
    let u = p.build_functionality(&c)?;
    let s = stats(&p, &c, u, start.elapsed());
    export_dot(&p, u, &run.export_dot)?;
    let cmp = compare(&p, u, &dense_from_circuit(&c)?, tol)?;
    emit(&VerifyReport {
        stats: s,
        max_deviation: cmp.max_deviation,
        worst_entry: cmp.worst,
        tolerance: tol,
        passed: cmp.passed,
    })?;
    Ok(cmp.passed)
}

fn cmd_bench(path: &Path, run: &RunArgs, timeout: u64) -> CliResult<()> {
    let c = load(path, run.truncate)?;
    let one = |linear: bool| -> CliResult<Option<RunStats>> {
        let mut p = package(&RunArgs { linear_scan_table: linear, ..run.clone() }, c.qubits())?;
        let start = Instant::now();
        match p.build_functionality_until(&c, Some(start + Duration::from_secs(timeout))) {
            Ok(u) => Ok(Some(stats(&p, &c, u, start.elapsed()))),
            Err(Error::Deadline { completed, total }) => {
                eprintln!(
                    "{} table: timed out after {completed} of {total} gates",
                    if linear { "linear-scan" } else { "bucketed" }
                );
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    };
    let bucketed = one(false)?;
    let linear_scan = one(true)?;
    let speedup = match (&bucketed, &linear_scan) {
        (Some(b), Some(l)) => Some(l.wall_time_ms / b.wall_time_ms.max(1e-6)),
        _ => None,
    };
    emit(&BenchReport { op_count: c.len(), bucketed, linear_scan, speedup })
}

fn cmd_gen(kind: &GenKind, output: &Option<PathBuf>) -> CliResult<()> {
    let c = match *kind {
        GenKind::Qft { qubits } => gen_qft(qubits)?,
        GenKind::Supremacy { rows, cols, depth, seed } => gen_supremacy(rows, cols, depth, seed)?,
    };
    match output {
        None => {
            print!("{}", c.render());
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, c.render())
                .map_err(|e| Failure::resource(format!("{}: {e}", path.display())))?;
            emit(&GenReport { path: path.clone(), qubits: c.qubits(), op_count: c.len() })
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Build { circuit, run } => cmd_build(circuit, run).map(|_| true),
        Command::Simulate { circuit, run, amplitudes } => cmd_simulate(circuit, run, *amplitudes).map(|_| true),
        Command::Verify { circuit, run, tol } => cmd_verify(circuit, run, *tol),
        Command::Bench { circuit, run, timeout } => cmd_bench(circuit, run, *timeout).map(|_| true),
        Command::Gen { kind, output } => cmd_gen(kind, output).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qdd: deviation exceeds tolerance");
            ExitCode::from(3)
        }
        Err(f) => {
            eprintln!("qdd: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
