use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdiscord::channels::{prepare, StateSpec};
use qdiscord::config::{load_state, ScenarioConfig};
use qdiscord::report::Report;
use qdiscord::scenarios;
use qdiscord::Error;

/// Discord, entanglement and correlation-rank scenarios for two qubits.
#[derive(Parser, Debug)]
#[command(name = "qdiscord", version, about)]
struct Cli {
    /// TOML scenario configuration; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for the JSON report and CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance for counting correlation-matrix singular values.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Shots per setting for the histogram study.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Monte Carlo copies.
    #[arg(long, global = true)]
    copies: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitude damping sweep on rho1.
    Fig2,
    /// Correlation ranks under amplitude damping.
    Fig3,
    /// Correlated dephasing states and rank transitions.
    Fig4,
    /// Werner family and its MS2 preparation.
    Fig5,
    /// Finite-shot tomography bias and singular-value histograms.
    SuppNoise,
    /// Evaluate every quantifier on one state.
    State {
        /// Prepared state id, e.g. `rho1` or `werner:0.5`.
        #[arg(required_unless_present = "file", conflicts_with = "file")]
        id: Option<String>,
        /// File with 16 lines of `re im`, row-major.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Randomized validation of the dephasing rank table.
    RankTable,
}

impl Command {
    fn scenario(&self) -> &'static str {
        match self {
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Fig5 => "fig5",
            Command::SuppNoise => "supp-noise",
            Command::State { .. } => "state",
            Command::RankTable => "rank-table",
        }
    }
}

fn build_config(cli: &Cli) -> qdiscord::Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(t) = cli.tolerance {
        cfg.rank_tolerance = t;
    }
    if let Some(s) = cli.shots {
        cfg.shots = s;
    }
    if let Some(c) = cli.copies {
        cfg.copies = c;
    }
    cfg.validate()?;
    cfg.expect_scenario(cli.command.scenario())?;
    Ok(cfg)
}

fn run(cli: &Cli) -> qdiscord::Result<()> {
    let cfg = build_config(cli)?;
    let report: Report = match &cli.command {
        Command::Fig2 => scenarios::run_fig2(&cfg)?,
        Command::Fig3 => scenarios::run_fig3(&cfg)?,
        Command::Fig4 => scenarios::run_fig4(&cfg)?,
        Command::Fig5 => scenarios::run_fig5(&cfg)?,
        Command::SuppNoise => scenarios::run_supp_noise(&cfg)?,
        Command::RankTable => scenarios::run_rank_table(&cfg)?,
        Command::State { id, file } => {
            let (label, rho) = match (id, file) {
                (_, Some(path)) => (path.display().to_string(), load_state(path)?),
                (Some(id), None) => (id.clone(), prepare(&id.parse::<StateSpec>()?)?),
                (None, None) => return Err(Error::InvalidArgument("state needs an id or --file".into())),
            };
            let report = scenarios::run_state(&cfg, &label, &rho)?;
            for row in &report.tables[0].rows {
                println!("{:<20} {}", row[0].render(), row[1].render());
            }
            report
        }
    };
    for path in report.write(&cfg.output_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("qdiscord: {err}");
            let code = match err {
                Error::Io(_) => 1,
                ref e if e.is_numerical() => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
