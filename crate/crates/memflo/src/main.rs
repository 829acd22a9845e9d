use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use memflo::config::Format;
use memflo::{emit, run, selfcheck, RunOptions, SweepConfig};

/// Floquet spectra of limit cycles with memory: sweeps and bifurcation search.
#[derive(Parser)]
#[command(name = "memflo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file.
    Run {
        config: PathBuf,
        /// Output file (overrides `output_path`; stdout when neither is set).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (overrides `output_format`).
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the embedded oracle suite.
    Selfcheck,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_FAILED_ROWS: u8 = 2;

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

fn run_command(
    config: &Path,
    out: Option<PathBuf>,
    format: Option<Format>,
    jobs: Option<usize>,
) -> ExitCode {
    let cfg = match SweepConfig::from_path(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = run(&cfg, &RunOptions::from_env(jobs));
    let text = emit::emit(&result, format.unwrap_or(cfg.output_format));

    match out.or_else(|| cfg.output_path.clone()) {
        Some(path) => {
            let written = std::fs::write(&path, text)
                .and_then(|_| std::fs::write(meta_path(&path), emit::metadata_json(&result)));
            if let Err(e) = written {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILED_ROWS);
            }
        }
        None => print!("{text}"),
    }

    let failed = result.rows.iter().filter(|r| r.failed()).count();
    if let Some(b) = &result.boundary {
        match (b.value, &b.error_code) {
            (Some(v), _) => eprintln!("boundary {} = {v:.10}", b.parameter),
            (None, Some(code)) => eprintln!("boundary {}: {code}", b.parameter),
            _ => {}
        }
    }
    let filtered: usize = result
        .rows
        .iter()
        .map(|r| r.eval.bound_filtered.len())
        .sum();
    if filtered > 0 {
        eprintln!("note: {filtered} raw exponent candidate(s) below the lower bound were filtered");
    }
    if result.any_failed() {
        eprintln!("{failed} of {} row(s) failed", result.rows.len());
        ExitCode::from(EXIT_FAILED_ROWS)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            jobs,
        } => run_command(&config, out, format, jobs),
        Command::Selfcheck => {
            let checks = selfcheck::run_selfcheck();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED_ROWS)
            }
        }
    }
}
