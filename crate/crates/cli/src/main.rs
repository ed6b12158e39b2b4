//! `bvquant`: check CDGAs, Poisson structures and quantisations described in
//! JSON problem files.

mod catalogue;
mod commands;
mod problem;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bvquant::quantisation::{Bounds, TieBreak};
use bvquant::toy_models::Orientation;

use problem::{read_problem, InputError, Problem};
use report::{Report, Settings};

#[derive(Parser)]
#[command(name = "bvquant", version, about = "Exact checks for shifted Poisson structures and their BV quantisations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the CDGA, flatness of the connection, the Maurer-Cartan equation and a given quantisation.
    Verify(Run),
    /// Compute the first-order obstruction and test its class.
    Obstruction(Run),
    /// Solve the quantum master equation order by order.
    Quantise(Run),
    /// Test compatibility of `omega` with a quantisation.
    Compat(Run),
    /// Compute a bounded cohomology basis or test a class.
    Cohomology(Run),
    /// Reduce the exponential of a toy-model quantisation and project its class.
    ToyClass(Run),
    /// List the bundled example problems.
    ListExamples {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tie {
    WeightThenDegree,
    DegreeThenWeight,
}

#[derive(Args)]
struct Run {
    /// Problem file.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    file: Option<PathBuf>,
    /// Run a bundled example instead of a file.
    #[arg(long)]
    example: Option<String>,
    /// Truncation order in `hbar`.
    #[arg(long)]
    hbar_order: Option<i64>,
    /// Bound on the polynomial degree of cochains.
    #[arg(long)]
    poly_degree: Option<usize>,
    /// Bound on the absolute exponent of invertible generators.
    #[arg(long)]
    laurent_window: Option<usize>,
    /// Bound on the polyvector weight of cochains.
    #[arg(long)]
    max_weight: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Sign of the orientation of `E`.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true, value_parser = parse_orientation)]
    orientation: i8,
    #[arg(long, value_enum, default_value_t = Tie::WeightThenDegree)]
    tie_break: Tie,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn parse_orientation(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err("orientation must be 1 or -1".into()),
    }
}

const DEFAULT_ORDER: i64 = 4;

fn load(run: &Run) -> Result<(String, problem::ProblemFile), InputError> {
    match (&run.file, &run.example) {
        (_, Some(name)) => {
            let src = catalogue::example(name).ok_or_else(|| InputError::Invalid(format!("no bundled example `{name}`")))?;
            Ok((name.clone(), read_problem(src)?))
        }
        (Some(path), None) => {
            let src = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.display().to_string(), source: e })?;
            let file = read_problem(&src)?;
            let name = if file.name.is_empty() {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
            } else {
                file.name.clone()
            };
            Ok((name, file))
        }
        (None, None) => Err(InputError::Invalid("no problem given".into())),
    }
}

fn run(name: &str, command: &Command, run: &Run) -> Result<Report, InputError> {
    let start = Instant::now();
    let (problem_name, file) = load(run)?;
    let order = run.hbar_order.or(file.hbar_order).unwrap_or(DEFAULT_ORDER);
    if order < 1 {
        return Err(InputError::Invalid("--hbar-order must be at least 1".into()));
    }
    let base = file.bounds.unwrap_or_default();
    let bounds = Bounds {
        poly_degree: run.poly_degree.unwrap_or(base.poly_degree),
        laurent_window: run.laurent_window.unwrap_or(base.laurent_window),
        max_weight: run.max_weight.unwrap_or(base.max_weight),
    };
    let tie = match run.tie_break {
        Tie::WeightThenDegree => TieBreak::WeightThenDegree,
        Tie::DegreeThenWeight => TieBreak::DegreeThenWeight,
    };
    let orientation = if run.orientation < 0 { Orientation::Negative } else { Orientation::Positive };
    let uses_tie = matches!(command, Command::Quantise(_) | Command::Compat(_));
    let settings = Settings {
        hbar_order: order,
        bounds,
        tie_break: uses_tie.then_some(tie),
        orientation: matches!(command, Command::ToyClass(_)).then_some(orientation),
    };
    let p = Problem::build(file, order, bounds)?;
    let mut report = Report::new(name, &problem_name, settings);
    match command {
        Command::Verify(_) => commands::verify(&mut report, &p)?,
        Command::Obstruction(_) => commands::obstruction_cmd(&mut report, &p)?,
        Command::Quantise(_) => commands::quantise(&mut report, &p, tie)?,
        Command::Compat(_) => commands::compat(&mut report, &p, tie)?,
        Command::Cohomology(_) => commands::cohomology(&mut report, &p)?,
        Command::ToyClass(_) => commands::toy_class(&mut report, &p, orientation)?,
        Command::ListExamples { .. } => unreachable!(),
    }
    if run.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}

fn list_examples(format: Format) {
    let files = catalogue::all();
    match format {
        Format::Json => {
            let v: Vec<_> = files
                .iter()
                .map(|f| json!({"name": f.name, "category": f.category, "description": f.description, "commands": f.commands}))
                .collect();
            println!("{}", serde_json::to_string_pretty(&v).expect("serialisable"));
        }
        Format::Text => {
            for f in files {
                println!("{:<24} {:<16} {} [{}]", f.name, f.category, f.description, f.commands.join(", "));
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::ListExamples { format } => {
            list_examples(*format);
            return ExitCode::SUCCESS;
        }
        Command::Verify(r) => ("verify", r),
        Command::Obstruction(r) => ("obstruction", r),
        Command::Quantise(r) => ("quantise", r),
        Command::Compat(r) => ("compat", r),
        Command::Cohomology(r) => ("cohomology", r),
        Command::ToyClass(r) => ("toy-class", r),
    };
    match run(name, &cli.command, args) {
        Ok(report) => {
            match args.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
