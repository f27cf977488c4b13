use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use leakbench_cli::config::{Command, RunConfig};
use leakbench_cli::report::emit_report;
use leakbench_cli::runner::{execute, read_results, write_artifacts};

/// Workbench for membership- and attribute-inference experiments against
/// simple models and synthetic distributions.
#[derive(Parser)]
#[command(name = "leakbench", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Override the master seed in the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (default: config out_dir, else "out").
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the trial count in the config.
    #[arg(long)]
    trials: Option<usize>,

    /// Worker threads (default: all cores). Results are identical for any
    /// value.
    #[arg(long)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run one experiment (synthetic or CSV split mode).
    Simulate,
    /// Run a parameter grid and pair estimates with analytic curves.
    Sweep,
    /// Run the colluding-trainer experiment with utility measurement.
    Collude,
    /// Audit the differential-privacy advantage bound.
    AuditDp,
    /// Emit analytic curve values only.
    Curves,
    /// Render a previously written results.json.
    Report,
}

fn command_of(c: &CliCommand) -> Command {
    match c {
        CliCommand::Simulate => Command::Simulate,
        CliCommand::Sweep => Command::Sweep,
        CliCommand::Collude => Command::Collude,
        CliCommand::AuditDp => Command::AuditDp,
        CliCommand::Curves => Command::Curves,
        CliCommand::Report => Command::Report,
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| (2, format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| (2, format!("config does not match the schema: {e}")))?;

    if let Some(seed) = cli.seed {
        if let Some(exp) = &mut cfg.experiment {
            exp.seed = leakbench_core::MasterSeed(seed);
        }
        if let Some(ds) = &mut cfg.dataset {
            ds.seed = leakbench_core::MasterSeed(seed);
        }
    }
    if let Some(trials) = cli.trials {
        if let Some(exp) = &mut cfg.experiment {
            exp.trials = trials;
        }
    }

    let command = command_of(&cli.command);
    if let Err(problems) = cfg.validate_for(command) {
        let mut msg = String::from("configuration rejected:\n");
        for p in &problems {
            msg.push_str("  - ");
            msg.push_str(p);
            msg.push('\n');
        }
        return Err((2, msg));
    }

    let out_dir = cli
        .out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    if command == Command::Report {
        let section = cfg.report.as_ref().expect("validated");
        let doc = read_results(&section.results).map_err(|e| (1, e.to_string()))?;
        print!("{}", emit_report(&doc));
        return Ok(());
    }

    let execute_in_pool = || execute(command, &cfg);
    let doc = match cli.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| (1, format!("cannot build worker pool: {e}")))?;
            pool.install(execute_in_pool)
        }
        None => execute_in_pool(),
    }
    .map_err(|e| (1, e.to_string()))?;

    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    let written = write_artifacts(&doc, &out_dir).map_err(|e| (1, e.to_string()))?;
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    print!("{}", emit_report(&doc));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
