//! Command-line front end: enumeration dumps, table exports, posterior
//! traces, and the canned experiment suite.

use clap::{Parser, Subcommand};
use kmlab::complexity::{save_table, EnumerationBudget, TableCache};
use kmlab::environments::Environment;
use kmlab::experiments::{run_all, run_single, ExperimentConfig, SuiteOutcome};
use kmlab::loss::LossMatrix;
use kmlab::machines::Machine;
use kmlab::predict::{step_loss_reports, PredictiveFunction};
use kmlab::rational::Rat;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kmlab",
    about = "Exact prediction experiments on budget-enumerated monotone machines",
    version
)]
struct Cli {
    /// Machine descriptor: R, or U:s=<n>:inner=<descriptor>
    #[arg(long, global = true, default_value = "R")]
    machine: String,

    /// Program length budget L (table covers all programs up to this length)
    #[arg(long, global = true, default_value_t = 14)]
    budget_l: u32,

    /// Step budget S per program run
    #[arg(long, global = true, default_value_t = 4096)]
    budget_s: u64,

    /// Horizon for path-based experiments and traces
    #[arg(long, global = true, default_value_t = 32)]
    horizon: usize,

    /// Block size for the block-machine experiment
    #[arg(long, global = true, default_value_t = 6)]
    s: u32,

    /// Loss perturbation <num>/<den> for the loss-gap experiment
    #[arg(long, global = true, default_value = "1/24")]
    eps: String,

    /// Sampling seed; repeat the flag for several
    #[arg(long = "seed", global = true)]
    seeds: Vec<u64>,

    /// Output directory for manifests, verdicts, and traces
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Cache directory for enumeration tables
    #[arg(long, global = true, default_value = "cache")]
    cache: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all programs up to the budget and dump the run records
    Enumerate,
    /// Export km/k/bigM for all strings up to min(horizon, 8) as CSV
    Table,
    /// Trace the normalized table predictor against an environment under
    /// error-loss, one CSV row per step
    Predict {
        /// Environment descriptor: det:zeros, det:ones, det:alt,
        /// det:prog=<bits>, bern:<p>/<q>, block:s=<n>
        #[arg(long, default_value = "det:zeros")]
        env: String,
    },
    /// Run one experiment and write manifest, verdicts, and traces
    Experiment {
        /// One of: loss-gap, range, block, bounds, krels, m-convergence
        id: String,
    },
    /// Run the whole experiment suite
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::FAILURE
        }
    }
}

fn config_from(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::with_dirs(&cli.out, &cli.cache);
    cfg.machine = cli.machine.clone();
    cfg.budget = EnumerationBudget::new(cli.budget_l, cli.budget_s);
    cfg.horizon = cli.horizon;
    cfg.s = cli.s;
    cfg.eps = cli.eps.parse::<Rat>().map_err(|e| e.to_string())?;
    if !cli.seeds.is_empty() {
        cfg.seeds = cli.seeds.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<bool, String> {
    let cfg = config_from(cli)?;
    match &cli.command {
        Command::Enumerate => {
            let table = build_table(&cfg)?;
            let path = cfg.out_dir.join("enumeration.tsv");
            fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
            save_table(&table, &path).map_err(|e| e.to_string())?;
            println!(
                "{} records ({} halting) -> {}",
                table.records().len(),
                table.halting_programs().len(),
                path.display()
            );
            Ok(true)
        }
        Command::Table => {
            let table = build_table(&cfg)?;
            let depth = cfg.horizon.min(8);
            fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
            let path = cfg.out_dir.join("table.csv");
            let mut file = fs::File::create(&path).map_err(|e| e.to_string())?;
            table.export_csv(depth, &mut file).map_err(|e| e.to_string())?;
            println!("strings up to length {} -> {}", depth, path.display());
            Ok(true)
        }
        Command::Predict { env } => {
            let env: Environment = env.parse().map_err(|e: kmlab::environments::EnvError| e.to_string())?;
            let table = build_table(&cfg)?;
            let horizon = cfg.horizon.min(16);
            let b = PredictiveFunction::m_from_table(&table, horizon).normalized();
            let path = env.sample(horizon, cfg.seeds[0]);
            let reports = step_loss_reports(&b, &env, &LossMatrix::error_loss(), &path)
                .map_err(|e| e.to_string())?;
            fs::create_dir_all(&cfg.out_dir).map_err(|e| e.to_string())?;
            let out_path = cfg.out_dir.join("predict.csv");
            let mut file = fs::File::create(&out_path).map_err(|e| e.to_string())?;
            writeln!(
                file,
                "t,context,b_p0,b_p1,mu_p0,mu_p1,action_b,action_mu,loss_b,loss_mu"
            )
            .map_err(|e| e.to_string())?;
            for r in &reports {
                writeln!(
                    file,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.t,
                    r.context,
                    r.posterior_b.get(false),
                    r.posterior_b.get(true),
                    r.posterior_mu.get(false),
                    r.posterior_mu.get(true),
                    r.action_b,
                    r.action_mu,
                    r.loss_b,
                    r.loss_mu
                )
                .map_err(|e| e.to_string())?;
            }
            println!("{} steps -> {}", reports.len(), out_path.display());
            Ok(true)
        }
        Command::Experiment { id } => {
            let outcome = run_single(id, &cfg).map_err(|e| e.to_string())?;
            report(&outcome, &cfg);
            Ok(outcome.all_pass)
        }
        Command::All => {
            let outcome = run_all(&cfg).map_err(|e| e.to_string())?;
            report(&outcome, &cfg);
            Ok(outcome.all_pass)
        }
    }
}

fn build_table(cfg: &ExperimentConfig) -> Result<std::sync::Arc<kmlab::complexity::ComplexityTable>, String> {
    let machine = Machine::from_descriptor(&cfg.machine).map_err(|e| e.to_string())?;
    let (table, status) = TableCache::new(&cfg.cache_dir)
        .get_or_build(&machine, cfg.budget)
        .map_err(|e| e.to_string())?;
    eprintln!("table {} L={} S={}: cache {:?}", cfg.machine, cfg.budget.max_len, cfg.budget.steps, status);
    Ok(table)
}

fn report(outcome: &SuiteOutcome, cfg: &ExperimentConfig) {
    let mut passed = 0usize;
    let mut failed = 0usize;
    for row in &outcome.rows {
        match row.pass {
            Some(true) => passed += 1,
            Some(false) => {
                failed += 1;
                println!(
                    "FAIL {}: {} = {}",
                    row.experiment, row.witness_name, row.witness_value
                );
            }
            None => {}
        }
    }
    println!(
        "{} checks passed, {} failed, {} informational; verdicts -> {}",
        passed,
        failed,
        outcome.rows.len() - passed - failed,
        cfg.out_dir.join("verdicts.csv").display()
    );
}
