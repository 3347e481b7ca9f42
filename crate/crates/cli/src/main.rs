use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qprospect::{acceptance, apply_tolerance_env, parse_scenario, run, CliError, Command, Format};

#[derive(Parser)]
#[command(name = "qprospect", version, about = "Quantum probabilities of separate, consecutive and composite events")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Born probabilities and expected value of one observable.
    Born(Common),
    /// Lueders transition matrix, optionally after a reduction.
    Lueders(Common),
    /// Wigner distribution and identity-chain residuals.
    Wigner(Common),
    /// Kirkwood form of two observables.
    Kirkwood(Common),
    /// Joint table, marginals and Bayes conditionals of a composite state.
    Joint(Common),
    /// Prospect probabilities with their classical and interference parts.
    Prospect(Common),
    /// Conditional probabilities under an uncertain second event.
    Conditional(Common),
    /// Multichannel measurement pipeline.
    Pipeline(Common),
    /// Entanglement production.
    Entanglement(Common),
    /// Prisoner-dilemma prospects and cohort simulation.
    Game(Common),
    /// Mean positive and negative interference of a distribution.
    QuarterLaw(Common),
    /// Multimode dynamics and two-time prospects.
    Dynamics(Common),
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
    },
}

fn execute(command: Command, common: &Common) -> Result<(), CliError> {
    let text = std::fs::read(&common.scenario).map_err(|e| CliError::io(&common.scenario, e))?;
    let scenario = parse_scenario(&text).map_err(|e| e.context(&common.scenario.display().to_string()))?;
    let table = run(command, &scenario, common.seed)?;
    let rendered = table.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| CliError::io(path, e))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = apply_tolerance_env() {
        eprintln!("qprospect: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    let (command, common) = match &cli.command {
        Sub::Born(c) => (Command::Born, c),
        Sub::Lueders(c) => (Command::Lueders, c),
        Sub::Wigner(c) => (Command::Wigner, c),
        Sub::Kirkwood(c) => (Command::Kirkwood, c),
        Sub::Joint(c) => (Command::Joint, c),
        Sub::Prospect(c) => (Command::Prospect, c),
        Sub::Conditional(c) => (Command::Conditional, c),
        Sub::Pipeline(c) => (Command::Pipeline, c),
        Sub::Entanglement(c) => (Command::Entanglement, c),
        Sub::Game(c) => (Command::Game, c),
        Sub::QuarterLaw(c) => (Command::QuarterLaw, c),
        Sub::Dynamics(c) => (Command::Dynamics, c),
        Sub::Selftest { seed } => {
            let results = acceptance::run_all(*seed);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.pass).count();
            println!("{} passed, {failed} failed", results.len() - failed);
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match execute(command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qprospect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
