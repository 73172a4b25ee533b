use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reprep::anchoring::anchor_transform;
use reprep::game::{classical_value, nonsignaling_value, GameFile};
use reprep::harness::{
    exit_code, read_game, run_decay, run_depbreak_verify, run_quantum_check, run_verification_suite, ExperimentConfig,
    Mode, QuantumSuite, SuiteReport, BUDGET_ENV,
};
use reprep::repetition::repeat_game;
use reprep::scalar::{format_rational, parse_rational, rational_to_f64};
use reprep::{Error, Result};

#[derive(Parser)]
#[command(name = "reprep", version, about = "Anchored games, parallel repetition and their verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Enumeration budget in evaluations.
    #[arg(long, global = true, env = BUDGET_ENV)]
    budget: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact classical value and non-signaling value.
    Solve {
        #[arg(long)]
        game: PathBuf,
    },
    /// Anchored version of a game.
    Anchor {
        #[arg(long)]
        game: PathBuf,
        /// Anchor probability as NUM/DEN.
        #[arg(long)]
        alpha: String,
    },
    /// n-fold parallel repetition.
    Repeat {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        n: usize,
        /// Emit the explicit game file instead of a size summary.
        #[arg(long)]
        materialize: bool,
    },
    /// Exact values of the repeated game for n-min..=n.
    Decay {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
    },
    /// Dependency-breaking checks for one instance.
    DepbreakVerify {
        #[command(flatten)]
        instance: Instance,
        /// Deterministic strategy for G^n, or for G played on every coordinate.
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Entropic toolbox, Φ-state or rounding checks.
    QuantumCheck {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Win coordinates, 1-based and comma separated.
        #[arg(long = "C", value_delimiter = ',')]
        coords: Option<Vec<usize>>,
        /// Entangled strategy for G; a seesaw optimum when absent.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Every applicable check on one game file.
    Verify {
        #[command(flatten)]
        instance: Instance,
        /// Also check the anchoring identity at this NUM/DEN.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs the experiment described by a TOML configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Win coordinates, 1-based and comma separated.
    #[arg(long = "C", value_delimiter = ',')]
    coords: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Toolbox,
    Phi,
    Rounding,
}

impl From<Suite> for QuantumSuite {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Toolbox => QuantumSuite::Toolbox,
            Suite::Phi => QuantumSuite::Phi,
            Suite::Rounding => QuantumSuite::Rounding,
        }
    }
}

fn config(cli: Cli) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    match cli.command {
        Command::Solve { game } => {
            cfg.mode = Some(Mode::Solve);
            cfg.game = Some(game);
        }
        Command::Anchor { game, alpha } => {
            cfg.mode = Some(Mode::Anchor);
            cfg.game = Some(game);
            cfg.alpha = Some(alpha);
        }
        Command::Repeat { game, n, materialize } => {
            cfg.mode = Some(Mode::Repeat);
            cfg.game = Some(game);
            cfg.n = Some(n);
            cfg.materialize = materialize;
        }
        Command::Decay { game, n, n_min } => {
            cfg.mode = Some(Mode::Decay);
            cfg.game = Some(game);
            cfg.n_range = Some([n_min, n]);
        }
        Command::DepbreakVerify { instance, strategy } => {
            cfg.mode = Some(Mode::DepbreakVerify);
            set_instance(&mut cfg, instance);
            cfg.strategy = strategy;
        }
        Command::QuantumCheck {
            suite,
            game,
            n,
            coords,
            strategy,
            seed,
        } => {
            cfg.mode = Some(Mode::QuantumCheck);
            cfg.suite = Some(suite.into());
            cfg.game = game;
            cfg.n = Some(n);
            cfg.coords = coords;
            cfg.strategy = strategy;
            cfg.seeds = vec![seed];
        }
        Command::Verify { instance, alpha, seed } => {
            cfg.mode = Some(Mode::Verify);
            set_instance(&mut cfg, instance);
            cfg.alpha = alpha;
            cfg.seeds = vec![seed];
        }
        Command::Run { config } => {
            cfg = ExperimentConfig::load(&config)?;
            cfg.budget = cfg.budget.or(cli.budget);
            cfg.out = cfg.out.or(cli.out);
            return Ok(cfg);
        }
    }
    cfg.budget = cli.budget;
    cfg.out = cli.out;
    Ok(cfg)
}

fn set_instance(cfg: &mut ExperimentConfig, instance: Instance) {
    cfg.game = Some(instance.game);
    cfg.n = Some(instance.n);
    cfg.coords = instance.coords;
}

fn sink(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_report(cfg: &ExperimentConfig, report: &SuiteReport) -> Result<u8> {
    report.write_csv(sink(cfg)?)?;
    for row in report.failures() {
        eprintln!("check failed: {}", row.check);
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn execute(cfg: &ExperimentConfig) -> Result<u8> {
    let mode = cfg.validate()?;
    let game_path = || cfg.game.as_deref().ok_or_else(|| Error::Config("no game".into()));
    match mode {
        Mode::Solve => {
            let game = read_game(game_path()?)?;
            let sol = classical_value(&game, cfg.budget()?)?;
            let mut w = csv::Writer::from_writer(sink(cfg)?);
            w.write_record(["quantity", "exact", "float"])?;
            w.write_record(["classical", &format_rational(&sol.value), &rational_to_f64(&sol.value).to_string()])?;
            match nonsignaling_value(&game) {
                Ok(ns) => w.write_record(["nonsignaling", "", &ns.to_string()])?,
                Err(Error::SizeLimit { .. }) => w.write_record(["nonsignaling", "", ""])?,
                Err(e) => return Err(e),
            }
            w.flush()?;
            Ok(0)
        }
        Mode::Anchor => {
            let game = read_game(game_path()?)?;
            let alpha = parse_rational(cfg.alpha.as_deref().unwrap_or_default())?;
            writeln!(sink(cfg)?, "{}", anchor_transform(&game, &alpha)?.to_json())?;
            Ok(0)
        }
        Mode::Repeat => {
            let game = read_game(game_path()?)?;
            let rg = repeat_game(&game, cfg.n.unwrap_or(1))?;
            let mut out = sink(cfg)?;
            if cfg.materialize {
                writeln!(out, "{}", GameFile::from_game(rg.materialize()?).to_json())?;
            } else {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["player", "questions", "answers"])?;
                for t in 0..rg.k() {
                    w.write_record([
                        (t + 1).to_string(),
                        rg.player_questions(t).to_string(),
                        rg.player_answers(t).to_string(),
                    ])?;
                }
                w.flush()?;
            }
            Ok(0)
        }
        Mode::Decay => {
            let game = read_game(game_path()?)?;
            let (lo, hi) = cfg.range().unwrap_or((1, 1));
            let curve = run_decay(&game, lo, hi, cfg.budget()?)?;
            curve.write_csv(sink(cfg)?)?;
            match curve.truncated_at {
                Some(n) => {
                    eprintln!("budget exceeded at n={n}");
                    Ok(3)
                }
                None => Ok(0),
            }
        }
        Mode::DepbreakVerify => emit_report(cfg, &run_depbreak_verify(cfg)?),
        Mode::QuantumCheck => emit_report(cfg, &run_quantum_check(cfg)?),
        Mode::Verify => emit_report(cfg, &run_verification_suite(cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
