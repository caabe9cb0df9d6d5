mod color;
mod gap;
mod report;
mod sim;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::Value;

use report::{argv_from_report, comparable, CliError, Report};

/// Finitely dependent colorings, interchange-process spectral gaps and
/// contact/voter simulations.
#[derive(Debug, Parser)]
#[command(name = "liggett-lab", version)]
struct Cli {
    /// Worker threads; falls back to LIGGETT_LAB_THREADS.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(subcommand)]
    Color(color::ColorCmd),
    #[command(subcommand)]
    Gap(gap::GapCmd),
    #[command(subcommand)]
    Sim(sim::SimCmd),
    /// Re-run the command recorded in a JSON report and compare results.
    Replay {
        #[arg(long)]
        report: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Color(c) => color::run(c),
        Command::Gap(c) => gap::run(c),
        Command::Sim(c) => sim::run(c),
        Command::Replay { report } => replay(&report),
    }
}

fn run_timed(command: Command) -> Result<(Report, Value), CliError> {
    let start = Instant::now();
    let report = dispatch(command)?;
    let json = report.to_json(start.elapsed().as_millis());
    Ok((report, json))
}

fn replay(path: &PathBuf) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let recorded: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let argv = argv_from_report(&recorded)?;
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(format!("recorded inputs do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::Usage("cannot replay a replay".into()));
    }
    let (_, fresh) = run_timed(cli.command)?;
    let same = comparable(&fresh) == comparable(&recorded);
    let mut r = Report::new("replay").input("report", path.display().to_string());
    r.line(format!("{}: {}", argv[1..].join(" "), if same { "identical" } else { "DIFFERENT" }));
    r.field("argv", argv[1..].to_vec());
    r.field("identical", same);
    r.expect(same, || "replayed report differs from the recorded one".into());
    Ok(r)
}

fn configure_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("LIGGETT_LAB_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Usage(format!("LIGGETT_LAB_THREADS={v:?} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(threads)
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
    let outcome = configure_threads(cli.parallel).and_then(|threads| {
        let (report, mut json) = run_timed(cli.command)?;
        if let (Some(t), Some(obj)) = (threads, json.as_object_mut()) {
            obj.insert("threads".into(), Value::from(t as u64));
        }
        let rendered = serde_json::to_string_pretty(&json).expect("reports serialize");
        if let Some(path) = &cli.out {
            std::fs::write(path, format!("{rendered}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        if cli.json {
            println!("{rendered}");
        } else {
            print!("{}", report.text);
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => match report.failed_check {
            Some(msg) => {
                eprintln!("check failed: {msg}");
                ExitCode::from(1)
            }
            None => ExitCode::SUCCESS,
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
