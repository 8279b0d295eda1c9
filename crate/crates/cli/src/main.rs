use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fibsite::{emit_report, exit, parse_files, run, CliError, Command, Format, Options};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Markdown,
}

/// Fibred sites, stack cohomology and the hocolim/pb adjunction on finite
/// inputs.
///
/// Exit codes: 0 ok, 1 io or usage, 2 syntax, 3 validation or failed check,
/// 4 refused mode, 5 cap exceeded, 6 unresolved name.
#[derive(Debug, Parser)]
#[command(name = "fibsite", version)]
struct Cli {
    /// validate, fibred-build, topology-check, sheaf-check, cohomology, cech,
    /// adjunction-check, invariance-check, homology or nerve-export
    command: String,
    /// Bundle files, read in order
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where fibred-build writes the total site
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    truncation: usize,
    #[arg(long, default_value_t = 4)]
    nmax: usize,
    #[arg(long, default_value_t = 2)]
    samples: usize,
    #[arg(long)]
    site: Option<String>,
    #[arg(long)]
    psheaf: Option<String>,
    #[arg(long)]
    presheaf: Option<String>,
    #[arg(long)]
    coefficients: Option<String>,
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    morphism: Option<String>,
    #[arg(long)]
    object: Option<String>,
    /// Include wall-clock timings (makes reports nondeterministic)
    #[arg(long)]
    timings: bool,
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let command: Command = cli.command.parse()?;
    let bundle = parse_files(&cli.files)?;
    let opts = Options {
        seed: cli.seed,
        truncation: cli.truncation,
        nmax: cli.nmax,
        samples: cli.samples,
        site: cli.site,
        psheaf: cli.psheaf,
        presheaf: cli.presheaf,
        coefficients: cli.coefficients,
        category: cli.category,
        morphism: cli.morphism,
        object: cli.object,
        timings: cli.timings,
    };
    let outcome = run(command, &bundle, &opts)?;
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Markdown => Format::Markdown,
    };
    let text = emit_report(&outcome.report, format);
    match &cli.report {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(artifact)) = (&cli.out, &outcome.artifact) {
        write(p, artifact)?;
    }
    Ok(if outcome.report.pass() { exit::OK } else { exit::VALIDATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::IO as u8 } else { exit::OK as u8 });
        }
    };
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("fibsite: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
