use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use logfan_cli::document::parse;
use logfan_cli::error::CliError;
use logfan_cli::report::{emit, Format};
use logfan_cli::runner::{run, RunConfig, DEFAULT_TRUNCATION};
use logfan_cli::suite::run_all;

#[derive(Parser)]
#[command(
    name = "logfan",
    version,
    about = "Log structures, Artin fans and log Hochschild invariants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Series truncation order (overrides LOGFAN_TRUNCATION).
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Output format: text, json or dot.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Worker threads for task execution; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Accepted and ignored; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, validate and execute a document.
    Run { file: PathBuf },
    /// Parse and validate a document without executing it.
    Check { file: PathBuf },
    /// Run the built-in reproduction suite.
    PaperSuite,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn truncation(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("LOGFAN_TRUNCATION").ok()?.parse().ok())
        .unwrap_or(DEFAULT_TRUNCATION)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format: Format = match cli.format.parse() {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    match cli.command {
        Command::Check { file } => match read(&file).and_then(|t| parse(&t)) {
            Ok(doc) => {
                println!(
                    "{}: ok ({} objects, {} tasks)",
                    file.display(),
                    doc.objects.len(),
                    doc.tasks.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { file } => {
            let doc = match read(&file).and_then(|t| parse(&t)) {
                Ok(doc) => doc,
                Err(e) => return fail(&e),
            };
            let cfg = RunConfig {
                truncation: truncation(cli.truncation),
                jobs: cli.jobs,
            };
            let report = run(&doc, cfg);
            match emit(&report, format) {
                Ok(out) => print!("{out}"),
                Err(e) => return fail(&e),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::PaperSuite => {
            let results = run_all();
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&results).expect("results serialize")
                ),
                Format::Text => results.iter().for_each(|r| println!("{}", r.line())),
                Format::Dot => return fail(&CliError::FormatUnavailable("dot".into())),
            }
            if results.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
