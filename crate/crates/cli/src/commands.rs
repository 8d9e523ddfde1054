//! Dispatch of the result-producing subcommands.

use poisonlab_core::adversaries::{build_scheme_d, ADVERSARY_IDS};
use poisonlab_core::analysis::PoisoningScheme;
use poisonlab_core::domain::{bayes_loss, BiasVector, ProductBiasDistribution};
use poisonlab_core::experiments::{
    learner_by_id, learning_curve_experiment, run_sweep, BoundCheck, ExcessEstimate, Metadata,
};
use poisonlab_core::rng::{fnv1a64, RandomSource};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::ResultRow;

/// Runs `run`, `sweep`, `attack-eval` or `curve` and returns its rows.
pub fn execute(cfg: &RunConfig) -> Result<Vec<ResultRow>, CliError> {
    match cfg.command {
        Command::Run | Command::Sweep => sweep_rows(cfg, cfg.grid()),
        Command::AttackEval => {
            let mut grid = cfg.grid();
            if cfg.adversaries.is_none() {
                grid.adversaries = ADVERSARY_IDS.iter().map(|s| s.to_string()).collect();
            }
            sweep_rows(cfg, grid)
        }
        Command::Curve => in_pool(cfg.threads, || curve_rows(cfg))?,
        Command::Verify => Err(CliError::key("command", "verify does not produce result rows")),
    }
}

fn sweep_rows(cfg: &RunConfig, grid: poisonlab_core::experiments::SweepGrid) -> Result<Vec<ResultRow>, CliError> {
    let results = run_sweep(&grid, cfg.threads)?;
    Ok(results.iter().map(|r| ResultRow::from_cell(cfg, r)).collect())
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::key("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Learning curves at constant bias vectors `(v, …, v)`. Without an explicit
/// `bias`, every atom of the hard distribution is used.
fn curve_rows(cfg: &RunConfig) -> Result<Vec<ResultRow>, CliError> {
    let (eta, d) = (cfg.etas[0], cfg.dims[0]);
    let (scheme, hard) = build_scheme_d(eta, d)?;
    let support: Vec<f64> = hard.atom_values().into_iter().map(|(v, _)| v).collect();
    let biases = match &cfg.biases {
        Some(b) => {
            if let Some(v) = b.iter().find(|v| !support.contains(v)) {
                return Err(CliError::key(
                    "bias",
                    format!("{v} is not in the hard support {support:?}"),
                ));
            }
            b.clone()
        }
        None => support,
    };
    let sizes = cfg.sizes.sizes(eta);
    let mut rows = Vec::new();
    for &v in &biases {
        let u = BiasVector::uniform(d, v)?;
        let learner = learner_by_id(&cfg.learners[0], d, eta, &u)?;
        let key = format!("curve|eta={eta}|d={d}|bias={v:e}|learner={}|trials={}", cfg.learners[0], cfg.trials);
        let source = RandomSource::new(cfg.seed, fnv1a64(key.as_bytes()));
        let report = learning_curve_experiment(&learner, &u, &scheme, eta, &sizes, cfg.trials, &source)?;
        let bayes = bayes_loss(&ProductBiasDistribution::new(u.clone()));
        for p in &report.points {
            let metadata = Metadata {
                experiment: "curve".into(),
                learner: learner.id(),
                adversary: scheme.id(),
                d,
                eta,
                n: p.n,
                bias: u.coords().to_vec(),
            };
            let est = ExcessEstimate::new(p.excess, (p.ci_low, p.ci_high), cfg.trials, cfg.seed, bayes, metadata)?;
            let bound = BoundCheck {
                name: "curve_sqrt_d_eta_over_36".into(),
                value: report.threshold,
                pass: p.excess >= report.threshold,
            };
            rows.push(ResultRow::from_estimate(cfg, &est, Some(&bound)));
        }
    }
    Ok(rows)
}
