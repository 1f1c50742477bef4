mod commands;
mod record;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Command, Env};
use record::RunRecord;

#[derive(Debug, Parser)]
#[command(name = "bertini", version, about = "Smoothness probabilities and point counts of curves on Hirzebruch surfaces over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Rerun the command stored in a run record and compare payloads.
    #[arg(long, global = true)]
    replay: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print rationals as decimals.
    #[arg(long, global = true)]
    float: bool,
    /// Where to write the run record.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    /// Result cache and default record directory.
    #[arg(long, global = true, env = "BERTINI_CACHE_DIR", default_value = ".bertini")]
    cache_dir: PathBuf,
    /// Neither read nor write cached census results.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Mismatch(String),
    Io(String),
    Lib(bertini::Error),
}

impl From<bertini::Error> for CliError {
    fn from(e: bertini::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        use bertini::Error::*;
        match self {
            CliError::Usage(_) => 3,
            CliError::Mismatch(_) | CliError::Io(_) => 1,
            CliError::Lib(e) if e.is_cap() => 2,
            CliError::Lib(InvalidParameter(_) | NotPrime(_) | EmptyBasis(..) | ZeroSection) => 3,
            CliError::Lib(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Mismatch(m) => write!(f, "mismatch: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

/// Prints to stdout, treating a closed pipe (`bertini ... | head`) as done.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let env = Env { cache: (!cli.no_cache).then(|| cli.cache_dir.clone()), float: cli.float };

    if let Some(path) = &cli.replay {
        if cli.command.is_some() {
            return Err(CliError::Usage("--replay takes no subcommand".into()));
        }
        let rec = RunRecord::read(path)?;
        if rec.version != record::VERSION {
            eprintln!("note: record written by version {}, replaying with {}", rec.version, record::VERSION);
        }
        // a cache hit would make the comparison vacuous
        let out = rec.params.execute(&Env { cache: None, float: cli.float })?;
        emit(&out.text);
        // compare through the same serializer on both sides
        let fresh: serde_json::Value = serde_json::from_str(&out.payload.to_string()).expect("valid json");
        let stored: serde_json::Value = serde_json::from_str(&rec.payload.to_string()).expect("valid json");
        if fresh == stored {
            emit(&format!("REPLAY MATCH ({})", rec.command));
            return Ok(true);
        }
        emit(&format!("REPLAY MISMATCH ({})\nstored: {stored}\nfresh:  {fresh}", rec.command));
        return Ok(false);
    }

    let Some(command) = cli.command else {
        return Err(CliError::Usage("a subcommand or --replay is required".into()));
    };
    let start = Instant::now();
    let out = command.execute(&env)?;
    let wall = start.elapsed().as_millis() as u64;
    emit(&out.text);
    let path = cli.record.clone().unwrap_or_else(|| RunRecord::default_path(&cli.cache_dir, &command));
    RunRecord::new(command, wall, out.payload).write(&path)?;
    eprintln!("record: {}", path.display());
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
