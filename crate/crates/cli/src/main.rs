use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use nhcech_cli::gallery::{self, DEFAULT_N, DEFAULT_SEED};
use nhcech_cli::{run_file, run_gallery, CliError, Command, Options};

#[derive(Parser)]
#[command(name = "nhcech", version, about = "Čech cohomology and line bundles of glued nerve diagrams")]
struct Cli {
    /// Prime field for coefficients (defaults to the document's field)
    #[arg(long, global = true)]
    field: Option<u64>,
    /// Also write the structured JSON report here
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Run the command on every gallery entry instead of a file
    #[arg(long, global = true)]
    all_gallery: bool,
    /// Record wall time in the report
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the adjunction conditions and print the canonical labels
    Validate { file: Option<PathBuf> },
    /// Cohomology of the union and of every intersection
    Cohomology {
        file: Option<PathBuf>,
        #[arg(long)]
        qmax: Option<usize>,
    },
    /// Exact sequence, total complex and long exact sequence
    Mv { file: Option<PathBuf> },
    /// Fibred products of cochains and of first cohomology
    Fibred {
        file: Option<PathBuf>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Enumerate line-bundle classes and their sections
    Bundles { file: Option<PathBuf> },
    /// Line-bundle count from the pieces versus the ground truth
    Count { file: Option<PathBuf> },
    /// Collapse every proper subset of pieces and compare
    CollapseCheck { file: Option<PathBuf> },
    /// Validate the refinement block and check naturality
    RefineCheck { file: Option<PathBuf> },
    /// Print a gallery document, or `list`
    Gallery {
        name: String,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn write_report(path: &Option<PathBuf>, value: &impl Serialize) -> Result<(), CliError> {
    if let Some(p) = path {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (cmd, file, qmax, q) = match cli.command {
        Cmd::Gallery { name, n, seed } => {
            if name == "list" {
                for line in gallery::listing() {
                    println!("{line}");
                }
            } else {
                print!("{}", gallery::document(&name, n, seed)?.to_json());
                if name == "random" {
                    eprintln!("seed {seed}");
                }
            }
            return Ok(0);
        }
        Cmd::Validate { file } => (Command::Validate, file, None, None),
        Cmd::Cohomology { file, qmax } => (Command::Cohomology, file, qmax, None),
        Cmd::Mv { file } => (Command::Mv, file, None, None),
        Cmd::Fibred { file, q } => (Command::Fibred, file, None, q),
        Cmd::Bundles { file } => (Command::Bundles, file, None, None),
        Cmd::Count { file } => (Command::Count, file, None, None),
        Cmd::CollapseCheck { file } => (Command::CollapseCheck, file, None, None),
        Cmd::RefineCheck { file } => (Command::RefineCheck, file, None, None),
    };
    let opts = Options { field: cli.field, qmax, q, timing: cli.timing };
    if cli.all_gallery {
        if file.is_some() {
            return Err(CliError::Usage("--all-gallery takes no file".into()));
        }
        let batch = run_gallery(cmd, &opts);
        print!("{batch}");
        write_report(&cli.report, &batch)?;
        return Ok(batch.exit_code());
    }
    let file = file.ok_or_else(|| CliError::Usage(format!("{} needs a file (or --all-gallery)", cmd.name())))?;
    let report = run_file(cmd, &file, &opts)?;
    print!("{report}");
    write_report(&cli.report, &report)?;
    Ok(report.exit_code())
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
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
