//! Grid sweeps over experiment parameters.

use rayon::prelude::*;

use super::{
    learner_by_id, lower_bound_experiment, mc_adversarial_loss, upper_bound, ExcessEstimate,
    DEFAULT_SEED, DEFAULT_TRIALS,
};
use crate::adversaries::adversary_by_id;
use crate::budget::Budget;
use crate::domain::{BiasVector, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::{VcLearner, VcLearnerConfig};
use crate::rng::{fnv1a64, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    /// Monte Carlo adversarial excess of a named learner and adversary.
    Adversarial,
    /// Oblivious excess on the hard distribution against `√(dη)/16`.
    Lower,
    /// Subsample-cover learner against `36√(ηd)·ln(e/(ηd))`.
    Upper,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Adversarial => "adversarial",
            Self::Lower => "lower",
            Self::Upper => "upper",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adversarial" => Ok(Self::Adversarial),
            "lower" => Ok(Self::Lower),
            "upper" => Ok(Self::Upper),
            other => Err(Error::InvalidValue(format!(
                "unknown experiment `{other}` (expected adversarial, lower or upper)"
            ))),
        }
    }
}

/// How sample sizes are chosen per budget.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeRule {
    Fixed(Vec<usize>),
    /// `n = ⌈c/η⌉`.
    Scaled(u64),
}

impl SizeRule {
    pub fn sizes(&self, eta: Budget) -> Vec<usize> {
        match self {
            Self::Fixed(v) => v.clone(),
            Self::Scaled(c) => vec![(c * eta.denom()).div_ceil(eta.numer()) as usize],
        }
    }
}

impl Default for SizeRule {
    fn default() -> Self {
        Self::Scaled(4)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub experiment: ExperimentKind,
    pub etas: Vec<Budget>,
    pub dims: Vec<usize>,
    pub sizes: SizeRule,
    /// Each value `v` becomes the bias vector `(v, …, v)`.
    pub biases: Vec<f64>,
    pub learners: Vec<String>,
    pub adversaries: Vec<String>,
    /// Monte Carlo trials per cell; `F`-trials per bias point for `Lower`.
    pub trials: usize,
    /// Outer draws of `u` for `Lower`.
    pub outer_trials: usize,
    pub seed: u64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Adversarial,
            etas: vec![Budget::new(1, 64).expect("valid")],
            dims: vec![1],
            sizes: SizeRule::default(),
            biases: vec![0.25],
            learners: vec!["exp".into()],
            adversaries: vec!["greedy".into()],
            trials: DEFAULT_TRIALS,
            outer_trials: 200,
            seed: DEFAULT_SEED,
        }
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub experiment: ExperimentKind,
    pub eta: Budget,
    pub d: usize,
    pub n: usize,
    pub bias: f64,
    pub learner: String,
    pub adversary: String,
    pub trials: usize,
    pub outer_trials: usize,
    pub seed: u64,
}

impl SweepCell {
    /// Canonical text form; the cell's stream is derived from it.
    pub fn key(&self) -> String {
        format!(
            "{}|eta={}|d={}|n={}|bias={:e}|learner={}|adversary={}|trials={}|outer={}",
            self.experiment.name(),
            self.eta,
            self.d,
            self.n,
            self.bias,
            self.learner,
            self.adversary,
            self.trials,
            self.outer_trials
        )
    }

    pub fn source(&self) -> RandomSource {
        RandomSource::new(self.seed, fnv1a64(self.key().as_bytes()))
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.etas.is_empty() {
            return Err(Error::Empty("eta list"));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidValue("dimension list must be nonempty and positive".into()));
        }
        if let SizeRule::Fixed(v) = &self.sizes {
            if v.is_empty() || v.contains(&0) {
                return Err(Error::InvalidValue("size list must be nonempty and positive".into()));
            }
        }
        if let SizeRule::Scaled(0) = self.sizes {
            return Err(Error::InvalidValue("size factor must be positive".into()));
        }
        if self.trials == 0 || self.outer_trials == 0 {
            return Err(Error::InvalidValue("trial counts must be positive".into()));
        }
        match self.experiment {
            ExperimentKind::Adversarial => {
                if self.learners.is_empty() {
                    return Err(Error::Empty("learner list"));
                }
                if self.adversaries.is_empty() {
                    return Err(Error::Empty("adversary list"));
                }
                if self.biases.is_empty() {
                    return Err(Error::Empty("bias list"));
                }
            }
            ExperimentKind::Lower => {
                if self.learners.is_empty() {
                    return Err(Error::Empty("learner list"));
                }
            }
            ExperimentKind::Upper => {
                if self.adversaries.is_empty() {
                    return Err(Error::Empty("adversary list"));
                }
                if self.biases.is_empty() {
                    return Err(Error::Empty("bias list"));
                }
            }
        }
        if let Some(b) = self.biases.iter().find(|b| !(-0.5..=0.5).contains(*b)) {
            return Err(Error::InvalidValue(format!("bias {b} outside [-1/2, 1/2]")));
        }
        Ok(())
    }

    /// Cells in grid order: eta, d, n, bias, learner, adversary.
    ///
    /// `Lower` cells ignore biases and adversaries; `Upper` cells always use the `vc` learner.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        self.validate()?;
        let (biases, learners, adversaries): (Vec<f64>, Vec<String>, Vec<String>) = match self.experiment {
            ExperimentKind::Adversarial => (self.biases.clone(), self.learners.clone(), self.adversaries.clone()),
            ExperimentKind::Lower => (vec![0.0], self.learners.clone(), vec!["scheme".into()]),
            ExperimentKind::Upper => (self.biases.clone(), vec!["vc".into()], self.adversaries.clone()),
        };
        let mut out = Vec::new();
        for &eta in &self.etas {
            for &d in &self.dims {
                for n in self.sizes.sizes(eta) {
                    for &bias in &biases {
                        for learner in &learners {
                            for adversary in &adversaries {
                                out.push(SweepCell {
                                    experiment: self.experiment,
                                    eta,
                                    d,
                                    n,
                                    bias,
                                    learner: learner.clone(),
                                    adversary: adversary.clone(),
                                    trials: self.trials,
                                    outer_trials: self.outer_trials,
                                    seed: self.seed,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A bound a cell was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub estimate: ExcessEstimate,
    pub bound: Option<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: SweepCell,
    pub outcome: std::result::Result<CellOutcome, String>,
}

pub fn run_cell(cell: &SweepCell) -> Result<CellOutcome> {
    let source = cell.source();
    match cell.experiment {
        ExperimentKind::Adversarial => {
            let u = BiasVector::uniform(cell.d, cell.bias)?;
            let learner = learner_by_id(&cell.learner, cell.d, cell.eta, &u)?;
            let adversary = adversary_by_id(&cell.adversary, cell.d)?;
            let dist = ProductBiasDistribution::new(u);
            let estimate = mc_adversarial_loss(&learner, adversary.as_ref(), &dist, cell.n, cell.eta, cell.trials, &source)?;
            Ok(CellOutcome { estimate, bound: None })
        }
        ExperimentKind::Lower => {
            let u = BiasVector::uniform(cell.d, cell.bias)?;
            let learner = learner_by_id(&cell.learner, cell.d, cell.eta, &u)?;
            let r = lower_bound_experiment(&learner, cell.eta, cell.d, cell.n, cell.outer_trials, cell.trials, &source)?;
            let bound = BoundCheck { name: "lower_sqrt_d_eta_over_16".into(), value: r.threshold, pass: r.pass };
            Ok(CellOutcome { estimate: r.estimate, bound: Some(bound) })
        }
        ExperimentKind::Upper => {
            let cfg = VcLearnerConfig::new(cell.eta, cell.d)?;
            cfg.check_size(cell.n)?;
            let learner = VcLearner::new(crate::domain::HypothesisClass::full(cell.d)?, cfg);
            let adversary = adversary_by_id(&cell.adversary, cell.d)?;
            let dist = ProductBiasDistribution::new(BiasVector::uniform(cell.d, cell.bias)?);
            let mut estimate = mc_adversarial_loss(&learner, adversary.as_ref(), &dist, cell.n, cell.eta, cell.trials, &source)?;
            estimate.metadata.experiment = "upper".into();
            let value = upper_bound(cell.eta, cell.d);
            let bound = BoundCheck { name: "upper_36_sqrt_eta_d_log".into(), value, pass: estimate.ci_high <= value };
            Ok(CellOutcome { estimate, bound: Some(bound) })
        }
    }
}

/// Runs every cell, in grid order. Per-cell failures are recorded, not propagated.
///
/// `threads = None` uses the global rayon pool. Output does not depend on it.
pub fn run_sweep(grid: &SweepGrid, threads: Option<usize>) -> Result<Vec<CellResult>> {
    let cells = grid.cells()?;
    let run = || -> Vec<CellResult> {
        cells
            .par_iter()
            .map(|cell| CellResult { cell: cell.clone(), outcome: run_cell(cell).map_err(|e| e.to_string()) })
            .collect()
    };
    match threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidValue(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepGrid {
        SweepGrid {
            etas: vec![Budget::new(1, 8).unwrap(), Budget::new(1, 16).unwrap()],
            dims: vec![1, 2],
            sizes: SizeRule::Fixed(vec![16]),
            biases: vec![0.25],
            learners: vec!["exp".into()],
            adversaries: vec!["greedy".into()],
            trials: 200,
            ..SweepGrid::default()
        }
    }

    #[test]
    fn two_by_two_grid_has_four_rows_with_metadata() {
        let rows = run_sweep(&small(), Some(2)).unwrap();
        assert_eq!(rows.len(), 4);
        let mut seen = Vec::new();
        for r in &rows {
            let est = &r.outcome.as_ref().unwrap().estimate;
            assert_eq!(est.metadata.eta, r.cell.eta);
            assert_eq!(est.metadata.d, r.cell.d);
            assert_eq!(est.metadata.n, 16);
            seen.push((r.cell.eta, r.cell.d));
        }
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn one_cell_matches_direct_call() {
        let grid = SweepGrid { trials: 300, ..SweepGrid::default() };
        let rows = run_sweep(&grid, None).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = run_cell(&grid.cells().unwrap()[0]).unwrap();
        assert_eq!(rows[0].outcome.as_ref().unwrap(), &direct);
        assert_eq!(rows[0].cell.n, 256);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = run_sweep(&small(), Some(1)).unwrap();
        let b = run_sweep(&small(), Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cell_errors_are_recorded() {
        let grid = SweepGrid { learners: vec!["exp".into(), "nope".into()], trials: 50, ..SweepGrid::default() };
        let rows = run_sweep(&grid, Some(1)).unwrap();
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.as_ref().unwrap_err().contains("nope"));
    }

    #[test]
    fn cell_streams_differ() {
        let cells = small().cells().unwrap();
        let mut streams: Vec<u64> = cells.iter().map(|c| c.source().stream()).collect();
        streams.sort_unstable();
        streams.dedup();
        assert_eq!(streams.len(), cells.len());
    }

    #[test]
    fn scaled_rule() {
        assert_eq!(SizeRule::Scaled(4).sizes(Budget::new(1, 64).unwrap()), vec![256]);
        assert_eq!(SizeRule::Scaled(4).sizes(Budget::new(3, 64).unwrap()), vec![86]);
        assert!(SweepGrid { etas: vec![], ..SweepGrid::default() }.validate().is_err());
        assert!(SweepGrid { biases: vec![0.7], ..SweepGrid::default() }.validate().is_err());
    }

    #[test]
    fn upper_and_lower_cells() {
        let up = SweepGrid {
            experiment: ExperimentKind::Upper,
            biases: vec![0.0, 0.5],
            trials: 100,
            ..SweepGrid::default()
        };
        let rows = run_sweep(&up, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.cell.learner == "vc" && r.outcome.as_ref().unwrap().bound.as_ref().unwrap().pass));
        let low = SweepGrid {
            experiment: ExperimentKind::Lower,
            learners: vec!["const-plus".into()],
            sizes: SizeRule::Fixed(vec![8]),
            trials: 4,
            outer_trials: 50,
            ..SweepGrid::default()
        };
        let rows = run_sweep(&low, None).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].outcome.as_ref().unwrap().bound.is_some());
    }
}
