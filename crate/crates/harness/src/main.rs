use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand};
use pwenv::checks::{self, Context};
use pwenv::config::ExperimentConfig;
use pwenv::formats::DecompositionDoc;
use pwenv::norms_table;
use pwenv::report::{write_atomic, VerificationReport};
use serde::Serialize;

/// Envelope quasi-norms of band-limited functions: computation and verification.
#[derive(Parser)]
#[command(name = "pwenv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML or JSON, chosen by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to the configured `output`, then `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative quadrature tolerance for every suite.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate E^p norms and envelope norms over the catalog.
    Norms,
    /// Run every verification suite except the sweep and the equivalence study.
    Verify,
    /// Counterexample sweep: envelope over E^1 norm as the spectrum nears -π.
    Sweep,
    /// Minkowski bounds against envelope norms over the catalog.
    Equivalence,
    /// Everything above, into one report.
    Report,
}

#[derive(Serialize)]
struct NamedDecomposition<'a> {
    function: &'a str,
    #[serde(flatten)]
    decomposition: &'a DecompositionDoc,
}

fn write_decompositions(dir: &Path, docs: &[(String, DecompositionDoc)]) -> anyhow::Result<()> {
    let named: Vec<_> = docs
        .iter()
        .map(|(function, decomposition)| NamedDecomposition {
            function,
            decomposition,
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&named)?;
    text.push('\n');
    write_atomic(&dir.join("decompositions.json"), text.as_bytes())?;
    Ok(())
}

fn emit(dir: &Path, stem: &str, rep: &VerificationReport) -> anyhow::Result<()> {
    for path in rep.write(dir, stem)? {
        eprintln!("wrote {}", path.display());
    }
    let s = &rep.summary;
    eprintln!(
        "{stem}: {} records, {} pass, {} low-confidence, {} fail, {} report-only, {} skipped",
        s.total, s.pass, s.low_confidence, s.fail, s.report_only, s.skipped
    );
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(tol) = cli.tol {
        config.set_tolerance(tol);
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Context::new(config)?;

    let mut failed = false;
    match cli.command {
        Command::Norms => {
            let table = norms_table::compute(&ctx);
            for path in table.write(&out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Verify => {
            let rep = checks::verify_all(&ctx);
            emit(&out, "verify", &rep)?;
            failed = rep.failed();
        }
        Command::Sweep => {
            let rep = checks::run_counterexample_sweep(&ctx);
            emit(&out, "sweep", &rep)?;
            failed = rep.failed();
        }
        Command::Equivalence => {
            let (rep, docs) = checks::run_equivalence_study(&ctx);
            emit(&out, "equivalence", &rep)?;
            write_decompositions(&out, &docs)?;
            failed = rep.failed();
        }
        Command::Report => {
            let table = norms_table::compute(&ctx);
            table.write(&out)?;
            let mut rep = checks::verify_all(&ctx);
            rep.merge(checks::run_counterexample_sweep(&ctx));
            let (equivalence, docs) = checks::run_equivalence_study(&ctx);
            rep.merge(equivalence);
            emit(&out, "report", &rep)?;
            write_decompositions(&out, &docs)?;
            failed = rep.failed();
        }
    }
    Ok(failed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
