//! Result rows and their CSV/JSON encodings.
//!
//! CSV reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly. JSON uses the same field names with
//! native numbers.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use poisonlab_core::experiments::{BoundCheck, CellResult, ExcessEstimate};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::ARTIFACT_VERSION;

/// Column order of the CSV output.
pub const COLUMNS: [&str; 20] = [
    "command",
    "experiment",
    "learner",
    "adversary",
    "d",
    "eta",
    "n",
    "bias",
    "trials",
    "seed",
    "mean",
    "ci_low",
    "ci_high",
    "bayes_loss",
    "bound_name",
    "bound_value",
    "pass",
    "status",
    "artifact_version",
    "config_hash",
];

/// One output record. Estimate fields are `None` when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub command: String,
    pub experiment: String,
    pub learner: String,
    pub adversary: String,
    pub d: usize,
    /// Exact fraction `a/b`.
    pub eta: String,
    pub n: usize,
    /// Bias coordinates, `;`-separated.
    pub bias: String,
    pub trials: usize,
    pub seed: u64,
    pub mean: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bayes_loss: Option<f64>,
    pub bound_name: String,
    pub bound_value: Option<f64>,
    pub pass: Option<bool>,
    /// `ok` or `error: <message>`.
    pub status: String,
    pub artifact_version: String,
    pub config_hash: String,
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_bias(coords: &[f64]) -> String {
    coords.iter().map(|&c| format_real(c)).collect::<Vec<_>>().join(";")
}

impl ResultRow {
    /// Row for a successful estimate.
    pub fn from_estimate(cfg: &RunConfig, est: &ExcessEstimate, bound: Option<&BoundCheck>) -> Self {
        let m = &est.metadata;
        Self {
            command: cfg.command.name().into(),
            experiment: m.experiment.clone(),
            learner: m.learner.clone(),
            adversary: m.adversary.clone(),
            d: m.d,
            eta: m.eta.to_string(),
            n: m.n,
            bias: format_bias(&m.bias),
            trials: est.trials,
            seed: est.seed,
            mean: Some(est.mean),
            ci_low: Some(est.ci_low),
            ci_high: Some(est.ci_high),
            bayes_loss: Some(est.bayes_loss),
            bound_name: bound.map(|b| b.name.clone()).unwrap_or_default(),
            bound_value: bound.map(|b| b.value),
            pass: bound.map(|b| b.pass),
            status: "ok".into(),
            artifact_version: ARTIFACT_VERSION.into(),
            config_hash: cfg.config_hash(),
        }
    }

    /// Row for a sweep cell, successful or not.
    pub fn from_cell(cfg: &RunConfig, result: &CellResult) -> Self {
        match &result.outcome {
            Ok(o) => Self::from_estimate(cfg, &o.estimate, o.bound.as_ref()),
            Err(msg) => {
                let c = &result.cell;
                Self {
                    command: cfg.command.name().into(),
                    experiment: c.experiment.name().into(),
                    learner: c.learner.clone(),
                    adversary: c.adversary.clone(),
                    d: c.d,
                    eta: c.eta.to_string(),
                    n: c.n,
                    bias: format_bias(&vec![c.bias; c.d]),
                    trials: c.trials,
                    seed: c.seed,
                    mean: None,
                    ci_low: None,
                    ci_high: None,
                    bayes_loss: None,
                    bound_name: String::new(),
                    bound_value: None,
                    pass: None,
                    status: format!("error: {msg}"),
                    artifact_version: ARTIFACT_VERSION.into(),
                    config_hash: cfg.config_hash(),
                }
            }
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn csv_record(&self) -> [String; 20] {
        let real = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        [
            self.command.clone(),
            self.experiment.clone(),
            self.learner.clone(),
            self.adversary.clone(),
            self.d.to_string(),
            self.eta.clone(),
            self.n.to_string(),
            self.bias.clone(),
            self.trials.to_string(),
            self.seed.to_string(),
            real(self.mean),
            real(self.ci_low),
            real(self.ci_high),
            real(self.bayes_loss),
            self.bound_name.clone(),
            real(self.bound_value),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
            self.status.clone(),
            self.artifact_version.clone(),
            self.config_hash.clone(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<(), CliError> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(COLUMNS)?;
    for r in rows {
        wr.write_record(r.csv_record())?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut w: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<ResultRow>, CliError> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(CliError::key("csv header", format!("unexpected columns {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("").to_string();
        let bad = |i: usize| CliError::key(COLUMNS[i], format!("cannot parse `{}`", f(i)));
        let int = |i: usize| f(i).parse::<usize>().map_err(|_| bad(i));
        let real = |i: usize| -> Result<Option<f64>, CliError> {
            let s = f(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|_| bad(i))
            }
        };
        out.push(ResultRow {
            command: f(0),
            experiment: f(1),
            learner: f(2),
            adversary: f(3),
            d: int(4)?,
            eta: f(5),
            n: int(6)?,
            bias: f(7),
            trials: int(8)?,
            seed: f(9).parse().map_err(|_| bad(9))?,
            mean: real(10)?,
            ci_low: real(11)?,
            ci_high: real(12)?,
            bayes_loss: real(13)?,
            bound_name: f(14),
            bound_value: real(15)?,
            pass: match f(16).as_str() {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(16))?),
            },
            status: f(17),
            artifact_version: f(18),
            config_hash: f(19),
        });
    }
    Ok(out)
}

/// Writes rows in the configured format to `cfg.out`, or stdout when unset.
pub fn emit_results(rows: &[ResultRow], cfg: &RunConfig) -> Result<(), CliError> {
    if rows.is_empty() {
        eprintln!("warning: no result rows");
    }
    let encode = |w: &mut dyn Write| -> Result<(), CliError> {
        match cfg.format {
            OutputFormat::Csv => write_csv(rows, w),
            OutputFormat::Json => write_json(rows, w),
        }
    };
    match &cfg.out {
        Some(path) => {
            let mut buf = Vec::new();
            encode(&mut buf)?;
            write_file(path, &buf)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            encode(&mut lock)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}
