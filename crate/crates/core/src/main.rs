use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use funcert::problem::Problem;
use funcert::rewrite::{Control, Limits};
use funcert::solver::{
    render_records, render_text, solve_clause_with, trace_record, Emit, SolveOptions, SolveReport,
    Status,
};

#[derive(Parser)]
#[command(
    name = "funcert",
    version,
    about = "Satisfiability of feature descriptions with functional uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of a problem file.
    Solve(SolveArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ControlArg {
    Basic,
    Quasi,
    Km,
    Heuristic,
    /// Basic control, retried under quasi control if a loop is detected.
    Auto,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Solved,
    Presolved,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(clap::Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    control: ControlArg,
    /// Number of parameterizations below which Inst and Solve run early
    /// under heuristic control.
    #[arg(long, default_value_t = 2)]
    delay_threshold: usize,
    #[arg(long, value_enum, default_value = "solved")]
    emit: EmitArg,
    /// Print a model graph for each solved clause.
    #[arg(long)]
    witness: bool,
    /// Write one JSON record per rule application to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = Limits::default().max_steps)]
    max_steps: usize,
    #[arg(long, default_value_t = Limits::default().max_visited)]
    max_visited: usize,
    /// Disable the exact-continuation branches.
    #[arg(long)]
    strict_paper: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn run(args: &SolveArgs) -> Result<(Problem, SolveReport), String> {
    let text =
        fs::read_to_string(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let problem = Problem::parse(&text).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let clause = problem.clause();
    let mut trace = match &args.trace {
        Some(path) => Some(BufWriter::new(
            fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => None,
    };
    let controls: &[Control] = match args.control {
        ControlArg::Basic => &[Control::Basic],
        ControlArg::Quasi => &[Control::Quasi],
        ControlArg::Km => &[Control::Km],
        ControlArg::Heuristic => &[Control::Heuristic { delay_threshold: 0 }],
        ControlArg::Auto => &[Control::Basic, Control::Quasi],
    };
    let mut report = None;
    for &control in controls {
        let control = match control {
            Control::Heuristic { .. } => Control::Heuristic {
                delay_threshold: args.delay_threshold,
            },
            c => c,
        };
        let opts = SolveOptions {
            control,
            emit: match args.emit {
                EmitArg::Solved => Emit::Solved,
                EmitArg::Presolved => Emit::Presolved,
            },
            limits: Limits {
                max_steps: args.max_steps,
                max_visited: args.max_visited,
                ..Limits::default()
            },
            strict_paper: args.strict_paper,
            witness: args.witness,
        };
        let mut observer = |step: &funcert::rewrite::Step| {
            if let Some(w) = trace.as_mut() {
                let _ = writeln!(
                    w,
                    "{}",
                    trace_record(step, &problem.store, &problem.symbols)
                );
            }
        };
        let r = solve_clause_with(&clause, &problem.store, &opts, &mut observer)
            .map_err(|e| e.to_string())?;
        let looped =
            r.status == Status::Unknown && r.diagnostics.iter().any(|d| d.starts_with("loop"));
        report = Some(r);
        if !looped {
            break;
        }
    }
    if let Some(mut w) = trace {
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok((problem, report.expect("at least one control")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Solve(args) = cli.command;
    match run(&args) {
        Ok((problem, report)) => {
            let out = match args.format {
                Format::Text => render_text(&report, &problem.store, &problem.symbols),
                Format::Records => render_records(&report, &problem.store, &problem.symbols),
            };
            print!("{out}");
            ExitCode::from(match report.status {
                Status::Sat => 0,
                Status::Unsat => 1,
                Status::Unknown => 2,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
