use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use poisonlab_cli::config::{read_config_file, RawConfig};
use poisonlab_cli::output::emit_results;
use poisonlab_cli::verify::{run_all, Faults};
use poisonlab_cli::{commands, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "poisonlab", version, about = "Data-poisoning experiments for randomized learners")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the invariant and exact-check suite.
    Verify(Flags),
    /// Estimate one cell.
    Run(Flags),
    /// Estimate every cell of a grid.
    Sweep(Flags),
    /// Compare adversaries on one cell.
    AttackEval(Flags),
    /// Oblivious learning curves on the hard distribution.
    Curve(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Poisoning budget(s), e.g. `1/64` or `1/64,1/256`.
    #[arg(long)]
    eta: Option<String>,
    /// Domain size(s).
    #[arg(long)]
    d: Option<String>,
    /// Sample size(s), or `c/eta` for n = ⌈c/η⌉.
    #[arg(long)]
    n: Option<String>,
    /// Monte Carlo trials per cell.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Learner id(s); `public(<id>)` wraps a learner.
    #[arg(long)]
    learner: Option<String>,
    /// Adversary id(s): none, greedy, brute.
    #[arg(long)]
    adversary: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Constant bias value(s) v for u = (v, …, v).
    #[arg(long, allow_hyphen_values = true)]
    bias: Option<String>,
    /// adversarial, lower or upper.
    #[arg(long)]
    experiment: Option<String>,
    /// Outer draws of u for lower-bound cells.
    #[arg(long)]
    outer_trials: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<String>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl Flags {
    fn merged(&self) -> Result<RawConfig, CliError> {
        let mut raw = match &self.config {
            Some(p) => read_config_file(p)?,
            None => RawConfig::new(),
        };
        let pairs = [
            ("eta", &self.eta),
            ("d", &self.d),
            ("n", &self.n),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("learner", &self.learner),
            ("adversary", &self.adversary),
            ("out", &self.out),
            ("format", &self.format),
            ("bias", &self.bias),
            ("experiment", &self.experiment),
            ("outer_trials", &self.outer_trials),
            ("threads", &self.threads),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                raw.insert(k.to_string(), v.clone());
            }
        }
        Ok(raw)
    }
}

fn verify(cfg: &RunConfig, faults: Faults) -> ExitCode {
    let run = || run_all(cfg.seed, faults);
    let outcomes = match cfg.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => run(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        println!("verify: all {} checks passed (seed {})", outcomes.len(), cfg.seed);
        ExitCode::SUCCESS
    } else {
        println!("verify: {} of {} checks failed: {}", failed.len(), outcomes.len(), failed.join(", "));
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::Verify(f) => (Command::Verify, f),
        Cmd::Run(f) => (Command::Run, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::AttackEval(f) => (Command::AttackEval, f),
        Cmd::Curve(f) => (Command::Curve, f),
    };
    let cfg = match flags.merged().and_then(|raw| RunConfig::from_raw(command, &raw)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if command == Command::Verify {
        return verify(&cfg, Faults { ratio_sign: flags.inject_fault });
    }
    let rows = match commands::execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = emit_results(&rows, &cfg) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} cells failed; see the status column", rows.len());
        if command == Command::Run {
            return ExitCode::FAILURE;
        }
    }
    ExitCode::SUCCESS
}
