use clap::{Args, Parser, Subcommand, ValueEnum};
use gstruct::cli::{self, Backend, Command, Options, Report};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gstruct", version, about = "Torsion, solitons and symmetry reduction of invariant G-structures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a structure and report torsion, Lee form, H and soliton data
    Check(FileArgs),
    /// Reduce along the canonical symmetry and run the theorem verifiers
    Reduce(FileArgs),
    /// Build the central extension of a transverse structure
    Extend(FileArgs),
    /// Run a built-in fixture and diff it against stored expectations
    Example {
        #[arg(long)]
        name: Option<String>,
        /// List the fixture ids
        #[arg(long)]
        list: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct FileArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Comparison tolerance for the float backend
    #[arg(long)]
    tol: Option<f64>,
    /// Report forms built from the unnormalised Lee vector
    #[arg(long)]
    raw_lee: bool,
    /// Override the document's df
    #[arg(long, allow_hyphen_values = true)]
    df: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

fn emit(report: &Report, format: Format) -> ExitCode {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (command, fa) = match args.command {
        Cmd::Check(a) => (Command::Check, a),
        Cmd::Reduce(a) => (Command::Reduce, a),
        Cmd::Extend(a) => (Command::Extend, a),
        Cmd::Example { name, list, format } => {
            if list || name.is_none() {
                for f in cli::FIXTURES {
                    println!("{:<26} {} ({})", f.id, f.file, f.command.name());
                }
                return ExitCode::SUCCESS;
            }
            let name = name.unwrap();
            return match cli::example(&name) {
                Some(r) => emit(&r, format),
                None => {
                    eprintln!("unknown example '{name}'; try --list");
                    ExitCode::from(2)
                }
            };
        }
    };
    let backend = match (fa.backend, fa.tol) {
        (BackendArg::Exact, Some(_)) => {
            eprintln!("--tol applies only to --backend float");
            return ExitCode::from(2);
        }
        (BackendArg::Exact, None) => Backend::Exact,
        (BackendArg::Float, tol) => Backend::Float { tol: tol.unwrap_or(1e-9) },
    };
    let bytes = match std::fs::read(&fa.file) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{}: {e}", fa.file.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options { backend, raw_lee: fa.raw_lee, df: fa.df };
    let report = cli::run_source(&bytes, &fa.file.display().to_string(), command, &opts);
    emit(&report, fa.format)
}
