use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use kgraph_cli::commands::{self, Command, Flags};
use kgraph_cli::digraph::import_digraph;
use kgraph_cli::report::{Inputs, Report, ReportViolation, Status};
use kgraph_cli::Config;
use kgraph_core::document::ConfigOverrides;
use kgraph_core::DegreeVector;

/// Analyses of finite k-graphs presented by colored skeletons.
///
/// Exit status: 0 when every check passes, 1 on a mathematical violation,
/// 2 on an input error.
#[derive(Parser, Debug)]
#[command(name = "kgraph", version)]
struct Args {
    /// Spec document (JSON), or an edge list with --digraph.
    #[arg(long)]
    spec: PathBuf,
    /// validate | enumerate | spectral | measure | dynamics | relations | suite
    #[arg(long, default_value = "suite")]
    command: Command,
    /// Read --spec as lines `u v` or `id u v`, one edge u → v each.
    #[arg(long)]
    digraph: bool,
    #[arg(long)]
    tol: Option<f64>,
    /// Per-coordinate search bound for primitivity.
    #[arg(long)]
    bound: Option<i64>,
    /// Window radius N.
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long = "metric-r")]
    metric_r: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of morphisms any single enumeration may produce.
    #[arg(long)]
    cap: Option<u64>,
    /// Degree for enumerate and measure, e.g. `1,2`.
    #[arg(long)]
    degree: Option<DegreeVector>,
    /// Include wall-clock timing (makes reports differ between runs).
    #[arg(long)]
    timing: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let flags = Flags {
        overrides: ConfigOverrides {
            tol: args.tol,
            search_bound: args.bound,
            radius: args.radius,
            metric_r: args.metric_r,
            seed: args.seed,
            enumeration_cap: args.cap,
        },
        degree: args.degree.clone(),
    };
    let start = Instant::now();
    let mut report = match fs::read_to_string(&args.spec) {
        Ok(text) if args.digraph => match import_digraph(&text) {
            Ok(doc) => commands::run(args.command, &doc, &flags),
            Err(e) => failed(args.command, &flags, commands::error_kind(&e), e.to_string()),
        },
        Ok(text) => commands::run_text(args.command, &text, &flags),
        Err(e) => failed(args.command, &flags, "io", format!("{}: {e}", args.spec.display())),
    };
    if args.timing {
        report.set_timing(start.elapsed());
    }
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("kgraph: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn failed(command: Command, flags: &Flags, kind: &str, message: String) -> Report {
    Report {
        command: command.name().to_owned(),
        status: Status::InputError,
        inputs: Inputs {
            digest: None,
            config: Config::default().apply(&flags.overrides),
        },
        results: serde_json::Value::Null,
        violations: vec![ReportViolation::new(kind, message)],
        timing: None,
    }
}
