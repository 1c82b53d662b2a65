use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use teichlab::config::RawConfig;
use teichlab::run::{self, Exit, RunError};
use teichlab::selftest;
use teichlab_core::surface::curve_table;

/// Grafting-ray convergence and cosmological-time experiments.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Output directory. Overrides `out` in the config; defaults to `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config; defaults to 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Never changes the output.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure a grafting ray and write convergence.csv and report.txt.
    Converge { config: PathBuf },
    /// Sample cosmological time and write cosmo.csv and concavity.txt.
    Spacetime { config: PathBuf },
    /// Run the invariant suites.
    Selftest,
    /// Print the curve table and check it at `fn_base`.
    Panel { config: PathBuf },
}

fn code(e: Exit) -> ExitCode {
    ExitCode::from(e as u8)
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    code(e.exit())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { code(Exit::Config) } else { ExitCode::SUCCESS };
        }
    };
    let threads = cli.threads.max(1);
    let load = |p: &PathBuf| -> Result<(RawConfig, PathBuf, u64), RunError> {
        let raw = RawConfig::load(p)?;
        let out = cli.out.clone().or_else(|| raw.out()).unwrap_or_else(|| PathBuf::from("."));
        let seed = match cli.seed {
            Some(s) => s,
            None => raw.seed()?.unwrap_or(0),
        };
        Ok((raw, out, seed))
    };
    match &cli.cmd {
        Cmd::Converge { config } => {
            let r = load(config).and_then(|(raw, out, seed)| run::converge(&raw, &out, threads, seed));
            match r {
                Ok((e, report)) => {
                    println!("verdict = {}", report.verdict);
                    if let Some(d) = report.diagnostic {
                        println!("{d}");
                    }
                    code(e)
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Spacetime { config } => {
            match load(config).and_then(|(raw, out, seed)| run::spacetime(&raw, &out, threads, seed)) {
                Ok(e) => {
                    println!("concavity {}", if e == Exit::Ok { "holds" } else { "violated" });
                    code(e)
                }
                Err(e) => fail(e),
            }
        }
        Cmd::Panel { config } => match load(config).and_then(|(raw, _, _)| run::panel_check(&raw, threads)) {
            Ok((e, text)) => {
                print!("{text}");
                code(e)
            }
            Err(e) => fail(e),
        },
        Cmd::Selftest => {
            let table = curve_table();
            let outcomes = selftest::run(&table, cli.seed.unwrap_or(0), threads);
            let mut ok = true;
            for o in &outcomes {
                match &o.result {
                    Ok(()) => println!("PASS  {}", o.name),
                    Err(m) => {
                        ok = false;
                        println!("FAIL  {}: {m}", o.name);
                    }
                }
            }
            code(if ok { Exit::Ok } else { Exit::Failed })
        }
    }
}
