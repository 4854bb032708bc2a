//! `wfl`: runs one experiment from a JSON run spec or from flags and writes a
//! canonical JSON report.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 schema error, 3 budget exceeded.

mod experiments;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use experiments::{Failure, Outcome};
use spec::*;

/// Overrides the output directory of every run.
const OUTPUT_DIR_VAR: &str = "WFL_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "wfl", version, about = "Exact experiments for Waring's problem over F_q[T]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for report.json, report.csv and metrics.json; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write a CSV table (needs --out).
    #[arg(long)]
    csv: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    budgets: Budgets,
}

macro_rules! commands {
    ($($variant:ident($params:ty) => $name:literal, $about:literal;)*) => {
        #[derive(Subcommand)]
        enum Command {
            /// Run a JSON run spec.
            Run {
                spec: PathBuf,
                /// Overrides the spec's thread count.
                #[arg(long)]
                threads: Option<usize>,
            },
            $(
                #[command(name = $name, about = $about)]
                $variant {
                    #[command(flatten)]
                    params: $params,
                    #[command(flatten)]
                    common: Common,
                },
            )*
        }

        fn shorthand(cmd: Command) -> Result<RunSpec, String> {
            let (params, common) = match cmd {
                Command::Run { spec, threads } => {
                    let text = std::fs::read_to_string(&spec)
                        .map_err(|e| format!("{}: {e}", spec.display()))?;
                    let mut s = RunSpec::from_json(&text)?;
                    s.threads = threads.or(s.threads);
                    return Ok(s);
                }
                $(Command::$variant { params, common } => (Params::$variant(params), common),)*
            };
            let s = RunSpec {
                experiment: params.name(),
                params,
                budgets: common.budgets,
                output: common.out,
                seed: common.seed,
                csv: common.csv,
                threads: common.threads,
            };
            s.validate()?;
            Ok(s)
        }
    };
}

commands! {
    Count(CountParams) => "count", "Count representations f = x_1^k + ... + x_s^k";
    CircleVerify(CircleParams) => "circle-verify", "Compare every N(f) with its character-sum expression";
    Arcs(ArcParams) => "arcs", "Split linear forms into major and minor arcs";
    LocalDensity(LocalDensityParams) => "local-density", "Local density at one place";
    SingularSeries(SeriesParams) => "singular-series", "Truncated singular series and main term for one f";
    SingDim(SingDimParams) => "sing-dim", "Dimension estimates of singular loci";
    KatzCheck(KatzParams) => "katz-check", "Check the exponential-sum bound for every form";
    Manin(ManinParams) => "manin", "Morphism counts to a Fermat hypersurface";
    Gamma(GammaParams) => "gamma", "Lattice polygon and its dilation factor";
    Thresholds(ThresholdParams) => "thresholds", "Variable-count and saving thresholds";
    Appendix(AppendixArgs) => "appendix", "Verify the dimension inequalities for general hypersurfaces";
    Convergence(ConvergenceParams) => "convergence", "Exact counts against main terms over a range of e";
}

fn report(spec: &RunSpec, status: &str, result: Value, failure: Option<Value>) -> Value {
    let mut r = json!({
        "artifact": {"name": "wfl", "version": env!("CARGO_PKG_VERSION")},
        "spec": spec,
        "rng": {"generator": "ChaCha8Rng::seed_from_u64", "seed": spec.seed},
        "status": status,
        "result": result,
    });
    if let Some(f) = failure {
        r["failure"] = f;
    }
    r
}

/// Peak resident set size in bytes, where the platform reports it.
fn peak_rss() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn write_outputs(dir: Option<&Path>, report: &Value, table: Option<&experiments::Table>, metrics: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    let Some(dir) = dir else {
        std::io::stdout().write_all(text.as_bytes())?;
        eprintln!("{}", serde_json::to_string(metrics).expect("metrics serialize"));
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), text)?;
    std::fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(metrics).expect("metrics serialize") + "\n")?;
    if let Some(t) = table {
        let mut w = csv::Writer::from_path(dir.join("report.csv"))?;
        w.write_record(&t.header)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn execute(spec: RunSpec) -> ExitCode {
    if let Some(n) = spec.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let dir = std::env::var_os(OUTPUT_DIR_VAR)
        .map(PathBuf::from)
        .or_else(|| spec.output.as_ref().map(PathBuf::from));
    let start = Instant::now();
    let (tx, rx) = mpsc::channel();
    let worker_spec = spec.clone();
    std::thread::spawn(move || {
        let _ = tx.send(experiments::run(&worker_spec));
    });
    let outcome = match spec.budgets.time_secs {
        Some(t) => rx.recv_timeout(Duration::from_secs(t)).map_err(|_| t),
        None => Ok(rx.recv().expect("worker finished")),
    };
    let metrics = json!({
        "wall_seconds": start.elapsed().as_secs_f64(),
        "peak_rss_bytes": peak_rss(),
        "threads": rayon::current_num_threads(),
    });
    let (code, rep, table) = match outcome {
        Err(t) => {
            let msg = format!("time budget of {t} s exceeded");
            eprintln!("error: {msg}");
            (3, report(&spec, "budget_exceeded", Value::Null, Some(json!({"message": msg}))), None)
        }
        Ok(Err(Failure::Schema(msg))) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Ok(Err(Failure::Budget(msg))) => {
            eprintln!("error: {msg}");
            (3, report(&spec, "budget_exceeded", Value::Null, Some(json!({"message": msg}))), None)
        }
        Ok(Err(Failure::Assertion { message, reproducer })) => {
            eprintln!("assertion failed: {message}");
            let f = json!({"message": message, "reproducer": reproducer});
            (1, report(&spec, "assertion_failed", Value::Null, Some(f)), None)
        }
        Ok(Ok(Outcome { result, table, failure })) => match failure {
            None => (0, report(&spec, "pass", result, None), table),
            Some((message, reproducer)) => {
                eprintln!("assertion failed: {message}");
                let f = json!({"message": message, "reproducer": reproducer});
                (1, report(&spec, "assertion_failed", result, Some(f)), table)
            }
        },
    };
    let table = if spec.csv { table.as_ref() } else { None };
    if let Err(e) = write_outputs(dir.as_deref(), &rep, table, &metrics) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match shorthand(cli.command) {
        Ok(spec) => execute(spec),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
