use clap::{Args, Parser, Subcommand};
use phasepoly::metrics::{bench_csv, bench_table, run_bench, Metrics};
use phasepoly::verify::MAX_DENSE_QUBITS;
use phasepoly::{emit_qasm, hw_optimize, optimize_circuit, parse_qasm, suite, unitary_equal, CouplingGraph, EngineConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

const EXIT_INPUT: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "phasepoly", version, about = "Phase polynomial re-synthesis for OpenQASM 2 circuits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize one circuit and print its metrics as JSON.
    Optimize(OptimizeArgs),
    /// Run a bundled benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Search queue capacity.
    #[arg(long, default_value_t = 10000)]
    queue_size: usize,
    /// Solutions collected before a block search stops.
    #[arg(long, default_value_t = 10000)]
    solutions: usize,
    /// Per-block time limit in seconds.
    #[arg(long, default_value_t = 400.0)]
    timeout: f64,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            queue_capacity: self.queue_size,
            solution_count: self.solutions,
            per_block_timeout: Duration::from_secs_f64(self.timeout.max(0.0)),
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    input: PathBuf,
    /// Consecutive phase blocks merged per synthesis unit.
    #[arg(long, default_value_t = 1)]
    group_size: usize,
    #[command(flatten)]
    engine: EngineArgs,
    /// Coupling graph: `line:N`, `grid:RxC`, `complete:N` or a JSON edge-list file.
    #[arg(long)]
    coupling: Option<String>,
    /// Check unitary equivalence (circuits of at most 10 qubits).
    #[arg(long)]
    verify: bool,
    /// Accepted for reproducible scripts; the engine is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Output QASM path. Without it QASM goes to stdout and metrics to stderr.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "small")]
    suite: String,
    #[arg(long, default_value_t = 3)]
    group_size: usize,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    verify: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn optimize(a: OptimizeArgs) -> ExitCode {
    let src = match std::fs::read_to_string(&a.input) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", a.input.display())),
    };
    let mut circuit = match parse_qasm(&src) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", a.input.display())),
    };
    circuit.name = a.input.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let cfg = a.engine.config();
    let started = Instant::now();
    let (out, blocks, timed_out, verified, mappings) = match &a.coupling {
        None => {
            let r = optimize_circuit(&circuit, a.group_size, &cfg);
            let verified = (a.verify && circuit.qubit_count <= MAX_DENSE_QUBITS).then(|| unitary_equal(&circuit, &r.circuit, None, 1e-9).unwrap_or(false));
            let t = r.timed_out();
            (r.circuit, r.blocks, t, verified, None)
        }
        Some(spec) => {
            let graph = match CouplingGraph::from_spec(spec) {
                Ok(g) => g,
                Err(e) => return fail(EXIT_INPUT, e),
            };
            let r = match hw_optimize(&circuit, &graph, a.group_size, &cfg) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_INPUT, e),
            };
            let audit_ok = phasepoly::verify::connectivity_violations(&r.circuit, &graph).is_empty();
            let verified = (a.verify && graph.node_count() <= MAX_DENSE_QUBITS).then(|| audit_ok && r.verify(&circuit, 1e-9).unwrap_or(false));
            let t = r.timed_out();
            let maps = Some((r.initial_mapping.l2p().to_vec(), r.final_mapping.l2p().to_vec()));
            (r.circuit, r.blocks, t, verified, maps)
        }
    };
    let wall = started.elapsed().as_secs_f64();
    let text = emit_qasm(&out, false);
    let mut metrics = match Metrics::from_emitted(&circuit.name, &text, wall, verified, blocks) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_VERIFY, format!("emitted QASM does not parse: {e}")),
    };
    if let Some((i, f)) = mappings {
        metrics.initial_mapping = Some(i);
        metrics.final_mapping = Some(f);
    }
    let json = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
    match &a.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return fail(EXIT_INPUT, format!("{}: {e}", path.display()));
            }
            println!("{json}");
        }
        None => {
            print!("{text}");
            eprintln!("{json}");
        }
    }
    if verified == Some(false) {
        return fail(EXIT_VERIFY, "verification failed");
    }
    if timed_out {
        eprintln!("warning: a block search timed out; the best solution found was kept");
        return ExitCode::from(EXIT_TIMEOUT);
    }
    ExitCode::SUCCESS
}

fn bench(a: BenchArgs) -> ExitCode {
    let Some(circuits) = suite::suite(&a.suite) else {
        return fail(EXIT_INPUT, format!("unknown suite `{}` (known: {})", a.suite, suite::SUITES.join(", ")));
    };
    let rows = run_bench(&circuits, a.group_size, &a.engine.config(), a.verify);
    let csv = bench_csv(&rows);
    match &a.csv {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &csv) {
                return fail(EXIT_INPUT, format!("{}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
    eprint!("{}", bench_table(&rows));
    if rows.iter().any(|r| r.verified == Some(false)) {
        return fail(EXIT_VERIFY, "verification failed");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Optimize(a) => optimize(a),
        Cmd::Bench(a) => bench(a),
    }
}
