use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyband::{run, Command, Experiment};

#[derive(Parser)]
#[command(name = "polyband", version, about = "Bloch spectra of periodic polyharmonic operators")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to the config's `run.output_dir`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the summary on stdout.
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Parameter cascade and its consistency inequalities.
    Params,
    /// Resonance class of each point.
    Classify,
    /// Known parts of each point.
    Predict,
    /// Order sweep of the known-part approximations against the oracle.
    Verify,
    /// Resonance-block eigenvalues against the oracle.
    ResonantCheck,
    /// Simplicity conditions and eigenvalue uniqueness.
    SimpleCheck,
    /// Bloch-coefficient predictions against oracle eigenvectors.
    Bloch,
    /// Band functions over the quasimomentum grid.
    Bands,
    /// Spectral gaps with a refinement stability check.
    Gaps,
    /// Roots of the known part along rays.
    Isoenergetic,
    /// Monte-Carlo resonance-class fractions on spheres.
    Measure,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Params => Command::Params,
            Cmd::Classify => Command::Classify,
            Cmd::Predict => Command::Predict,
            Cmd::Verify => Command::Verify,
            Cmd::ResonantCheck => Command::ResonantCheck,
            Cmd::SimpleCheck => Command::SimpleCheck,
            Cmd::Bloch => Command::Bloch,
            Cmd::Bands => Command::Bands,
            Cmd::Gaps => Command::Gaps,
            Cmd::Isoenergetic => Command::Isoenergetic,
            Cmd::Measure => Command::Measure,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config else {
        eprintln!("error: --config <FILE> is required");
        return ExitCode::from(2);
    };
    let result = Experiment::load(&path).and_then(|exp| run(cli.command.into(), &exp, cli.out));
    match result {
        Ok(summary) => {
            if !cli.quiet {
                // a closed pipe only truncates the summary; artifacts are already written
                let mut out = std::io::stdout().lock();
                let lines = summary.lines.iter().cloned().chain(summary.files.iter().map(|f| format!("wrote {}", f.display())));
                for line in lines {
                    if writeln!(out, "{line}").is_err() {
                        break;
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
