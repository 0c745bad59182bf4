//! Canned experiment suite: each experiment checks a family of exact
//! claims against the tables and emits verdict rows plus CSV traces.
//!
//! Runs are deterministic functions of the configuration: identical
//! configs produce byte-identical output files, with sampling pinned by
//! the seed list. Every pass/fail comparison is an exact rational
//! comparison; the only tolerance anywhere is the Monte Carlo frequency
//! slack, which is echoed in the manifest.

mod block;
mod bounds;
mod krels;
mod loss_gap;
mod m_convergence;
mod range;

use crate::complexity::{CacheError, ComplexityTable, EnumerationBudget, TableCache};
use crate::environments::EnvError;
use crate::machines::{DescriptorError, Machine};
use crate::predict::PredictError;
use crate::rational::Rat;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

pub const EXPERIMENT_IDS: [&str; 6] =
    ["loss-gap", "range", "block", "bounds", "krels", "m-convergence"];

/// Sample count and one-sided slack for the single Monte Carlo check (the
/// block-code frequency estimate). Everything else is exact.
pub const MC_SAMPLES: usize = 200;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Machine descriptor for the main table, e.g. "R".
    pub machine: String,
    pub budget: EnumerationBudget,
    pub horizon: usize,
    /// Block size for the block-machine experiment.
    pub s: u32,
    /// Loss perturbation for the loss-gap experiment; must stay below 1/15.
    pub eps: Rat,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults: reference machine at L=14, S=4096, horizon 32, s=6,
    /// eps=1/24, eight seeds.
    pub fn with_dirs(out_dir: impl Into<PathBuf>, cache_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            machine: "R".into(),
            budget: EnumerationBudget::new(14, 4096),
            horizon: 32,
            s: 6,
            eps: Rat::new(1, 24),
            seeds: (1..=8).collect(),
            out_dir: out_dir.into(),
            cache_dir: cache_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        Machine::from_descriptor(&self.machine)?;
        if self.budget.max_len > 20 {
            return Err(ExperimentError::BadConfig(format!(
                "budget L={} enumerates more than 2^21 programs",
                self.budget.max_len
            )));
        }
        if self.horizon == 0 {
            return Err(ExperimentError::BadConfig("horizon must be positive".into()));
        }
        if self.s < 2 {
            return Err(ExperimentError::BadConfig(format!("block size {} below 2", self.s)));
        }
        if self.eps < Rat::zero() || self.eps >= Rat::new(1, 15) {
            return Err(ExperimentError::BadConfig(format!(
                "eps {} outside [0, 1/15)",
                self.eps
            )));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::BadConfig("need at least one seed".into()));
        }
        Ok(())
    }

    /// Full configuration echo, one sorted key=value per line. Paths are
    /// deliberately excluded so identical configs in different directories
    /// produce identical files.
    pub fn manifest(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        let mut lines = vec![
            format!("budget_l={}", self.budget.max_len),
            format!("budget_s={}", self.budget.steps),
            format!("eps={}", self.eps),
            format!("horizon={}", self.horizon),
            format!("machine={}", self.machine),
            format!("mc_samples={}", MC_SAMPLES),
            format!("mc_slack=2^-{}", self.s),
            format!("s={}", self.s),
            format!("seeds={}", seeds.join(",")),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }
}

#[derive(Debug)]
pub enum ExperimentError {
    Io(io::Error),
    Machine(DescriptorError),
    Cache(CacheError),
    Env(EnvError),
    Predict(PredictError),
    BadConfig(String),
    UnknownExperiment(String),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Io(e) => write!(f, "io error: {}", e),
            ExperimentError::Machine(e) => write!(f, "bad machine descriptor: {}", e),
            ExperimentError::Cache(e) => write!(f, "table cache: {}", e),
            ExperimentError::Env(e) => write!(f, "environment: {}", e),
            ExperimentError::Predict(e) => write!(f, "prediction: {}", e),
            ExperimentError::BadConfig(msg) => write!(f, "bad config: {}", msg),
            ExperimentError::UnknownExperiment(id) => {
                write!(f, "unknown experiment `{}`; known: {}", id, EXPERIMENT_IDS.join(", "))
            }
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<io::Error> for ExperimentError {
    fn from(e: io::Error) -> Self {
        ExperimentError::Io(e)
    }
}

impl From<DescriptorError> for ExperimentError {
    fn from(e: DescriptorError) -> Self {
        ExperimentError::Machine(e)
    }
}

impl From<CacheError> for ExperimentError {
    fn from(e: CacheError) -> Self {
        ExperimentError::Cache(e)
    }
}

impl From<EnvError> for ExperimentError {
    fn from(e: EnvError) -> Self {
        ExperimentError::Env(e)
    }
}

impl From<PredictError> for ExperimentError {
    fn from(e: PredictError) -> Self {
        ExperimentError::Predict(e)
    }
}

/// One line of verdicts.csv: an exact witness, optionally asserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictRow {
    pub experiment: &'static str,
    /// Some(true)/Some(false) for asserted checks, None for informational
    /// witnesses.
    pub pass: Option<bool>,
    pub witness_name: String,
    pub witness_value: String,
    pub anchor: &'static str,
}

impl VerdictRow {
    fn new(
        experiment: &'static str,
        pass: Option<bool>,
        witness_name: impl Into<String>,
        witness_value: impl fmt::Display,
        anchor: &'static str,
    ) -> VerdictRow {
        VerdictRow {
            experiment,
            pass,
            witness_name: witness_name.into(),
            witness_value: witness_value.to_string(),
            anchor,
        }
    }
}

/// The verdict rows of one or more experiments plus the overall outcome.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub rows: Vec<VerdictRow>,
    pub all_pass: bool,
}

fn table_for(cfg: &ExperimentConfig) -> Result<Arc<ComplexityTable>, ExperimentError> {
    let machine = Machine::from_descriptor(&cfg.machine)?;
    let cache = TableCache::new(&cfg.cache_dir);
    let (table, _) = cache.get_or_build(&machine, cfg.budget)?;
    Ok(table)
}

fn run_experiment(
    id: &str,
    cfg: &ExperimentConfig,
) -> Result<Vec<VerdictRow>, ExperimentError> {
    match id {
        "loss-gap" => loss_gap::run(cfg),
        "range" => range::run(cfg, table_for(cfg)?.as_ref()),
        "block" => block::run(cfg, table_for(cfg)?.as_ref()),
        "bounds" => bounds::run(cfg, table_for(cfg)?.as_ref()),
        "krels" => krels::run(cfg, table_for(cfg)?.as_ref()),
        "m-convergence" => m_convergence::run(cfg, table_for(cfg)?.as_ref()),
        other => Err(ExperimentError::UnknownExperiment(other.to_string())),
    }
}

/// Runs one experiment and writes manifest.txt plus verdicts.csv for it.
pub fn run_single(id: &str, cfg: &ExperimentConfig) -> Result<SuiteOutcome, ExperimentError> {
    cfg.validate()?;
    let rows = run_experiment(id, cfg)?;
    finish(cfg, rows)
}

/// Runs the whole suite in a fixed order and writes the combined outputs.
pub fn run_all(cfg: &ExperimentConfig) -> Result<SuiteOutcome, ExperimentError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for id in EXPERIMENT_IDS {
        rows.extend(run_experiment(id, cfg)?);
    }
    finish(cfg, rows)
}

fn finish(cfg: &ExperimentConfig, rows: Vec<VerdictRow>) -> Result<SuiteOutcome, ExperimentError> {
    fs::create_dir_all(&cfg.out_dir)?;
    fs::write(cfg.out_dir.join("manifest.txt"), cfg.manifest())?;

    let mut csv = fs::File::create(cfg.out_dir.join("verdicts.csv"))?;
    writeln!(csv, "experiment,pass,witness_name,witness_value,anchor")?;
    for row in &rows {
        let pass = match row.pass {
            Some(true) => "true",
            Some(false) => "false",
            None => "info",
        };
        writeln!(
            csv,
            "{},{},{},{},{}",
            row.experiment, pass, row.witness_name, row.witness_value, row.anchor
        )?;
    }

    let all_pass = rows.iter().all(|r| r.pass != Some(false));
    Ok(SuiteOutcome { rows, all_pass })
}

/// Opens a trace CSV under the experiment's own output directory.
fn trace_file(
    cfg: &ExperimentConfig,
    experiment: &str,
    name: &str,
) -> Result<fs::File, ExperimentError> {
    let dir = cfg.out_dir.join(experiment);
    fs::create_dir_all(&dir)?;
    Ok(fs::File::create(dir.join(name))?)
}
