use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use triadica::{run_text, Command, Finding, Options, Report, DEFAULT_BOUND, EXIT_USAGE};

/// Check differential triads, their morphisms and Kähler differentials over
/// finite spaces, from a JSON workspace.
#[derive(Debug, Parser)]
#[command(name = "triadica", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Workspace file; standard input when omitted.
    #[arg(long)]
    workspace: Option<PathBuf>,
    /// Named workspace entries to act on (repeatable).
    #[arg(long = "target")]
    targets: Vec<String>,
    /// Largest number of point maps `fullness` may enumerate.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: u128,
    /// Allow `recover-map` on non-discrete spaces; results assert nothing.
    #[arg(long)]
    exploratory: bool,
    #[arg(long, conflicts_with = "human")]
    json: bool,
    #[arg(long)]
    human: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let text = match &cli.workspace {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s).map_err(|e| format!("cannot read standard input: {e}"))
        }
    };
    let outcome = match text {
        Ok(text) => {
            let options = Options { targets: cli.targets.clone(), bound: cli.bound, exploratory: cli.exploratory };
            run_text(cli.command, &text, &options)
        }
        Err(message) => triadica::Outcome {
            report: Report::new(cli.command.name(), vec![Finding::error("--workspace", message)], None, false),
            exit_code: EXIT_USAGE,
        },
    };
    let rendered = if cli.human { outcome.report.to_human() } else { outcome.report.to_json() };
    print!("{rendered}");
    ExitCode::from(outcome.exit_code as u8)
}
