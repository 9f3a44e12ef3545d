use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use cyclogaudin::run::{set_threads, Command, RunConfig, RunOptions, Runner};

/// Builds cyclotomic Gaudin models and checks them numerically.
#[derive(Parser, Debug)]
#[command(name = "cyclogaudin", version)]
#[command(
    after_help = "Commands: info, commute, surat, bethe-solve (bethe solve), bethe-verify (bethe verify), singular, all\n\
Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or usage error.\n\
CYCLOGAUDIN_THREADS caps the number of worker threads."
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Include block operator matrices in the `commute` report.
    #[arg(long)]
    dump_matrices: bool,

    /// Include basis labels, structure constants and σ in the `info` report.
    #[arg(long)]
    dump_algebra: bool,

    #[arg(required = true, num_args = 1..=2, value_name = "COMMAND")]
    command: Vec<String>,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("usage: cyclogaudin --config PATH [--out PATH] [--seed N] [--dump-matrices] [--dump-algebra] <COMMAND>");
    eprintln!(
        "commands: {}",
        Command::ALL
            .iter()
            .map(|c| c.name())
            .collect::<Vec<_>>()
            .join(", ")
    );
    ExitCode::from(2)
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
    let start = Instant::now();

    if let Ok(v) = std::env::var("CYCLOGAUDIN_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = set_threads(n) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                return usage_error(&format!(
                    "CYCLOGAUDIN_THREADS must be a positive integer, got {v:?}"
                ))
            }
        }
    }

    let Some(cmd) = Command::from_words(&cli.command) else {
        return usage_error(&format!("unknown command {:?}", cli.command.join(" ")));
    };
    let config = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let options = RunOptions {
        seed: cli.seed,
        dump_matrices: cli.dump_matrices,
        dump_algebra: cli.dump_algebra,
    };
    let mut runner = match Runner::new(&config, options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_config() { 2 } else { 1 });
        }
    };

    let mut report = runner.run(cmd);
    report.wall_time_s = Some(start.elapsed().as_secs_f64());
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(err) = &report.error {
        eprintln!("error: {err}");
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
