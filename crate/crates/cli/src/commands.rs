use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use diffsel_core::harness::score_path;
use diffsel_core::simulate::simulate_path;
use diffsel_core::{run_experiment, DiffusionFamily, FamilyTag, PenaltySpec, Target};

use crate::config::parse_config;
use crate::error::CliError;
use crate::files::{
    curves_table, parse_path, replications_table, scatter_table, serialize_path, single_fit_curves,
    with_suffix, write_atomic,
};

#[derive(Parser, Debug)]
#[command(
    name = "diffsel",
    version,
    about = "Drift and diffusion estimation by penalized least squares"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exactly simulate a stationary path; writes `<out>.xi.path` and `<out>.x.path`.
    Simulate(SimulateArgs),
    /// Estimate drift and σ² from a path file.
    Estimate(EstimateArgs),
    /// Run a replicated experiment described by a key=value config file.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// family1 | family2 | family2-twobumps | unittest-zerodrift
    #[arg(long)]
    pub family: FamilyTag,
    #[arg(long, default_value_t = 6.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Number of increments; the files hold n + 1 values.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Which process the file holds (xi or x); selects the truth curves.
    #[arg(long, default_value = "xi")]
    pub target: Target,
    /// Generating family, used only for truth columns and errors.
    #[arg(long)]
    pub family: Option<FamilyTag>,
    #[arg(long, default_value_t = 6.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 4.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 9)]
    pub rmax: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Experiment(a) => cmd_experiment(&a),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let family = DiffusionFamily::new(args.family, args.theta, args.c)?;
    let (xi, x) = simulate_path(&family, args.n, args.delta, args.seed)?;
    write_atomic(&with_suffix(&args.out, ".xi.path"), &serialize_path(&xi))?;
    write_atomic(&with_suffix(&args.out, ".x.path"), &serialize_path(&x))?;
    Ok(())
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let path = parse_path(&text)?;
    let spec = PenaltySpec::practical(path.increments(), path.delta())
        .with_kappa(args.kappa)?
        .with_r_max(args.rmax)?;
    let family = args
        .family
        .map(|tag| DiffusionFamily::new(tag, args.theta, args.c))
        .transpose()?;
    let truth = family.as_ref().map(|f| (f, args.target));
    let record = score_path(&path, &spec, truth, 0)?;
    let curves = single_fit_curves(&record, truth);
    write_atomic(
        &with_suffix(&args.out, ".replications.csv"),
        &replications_table([(0, Some(&record))]),
    )?;
    write_atomic(
        &with_suffix(&args.out, ".curves.csv"),
        &curves_table(&curves),
    )?;
    write_atomic(
        &with_suffix(&args.out, ".scatter.csv"),
        &scatter_table(&path),
    )?;
    Ok(())
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = run_experiment(&config)?;
    for failure in report.records.iter().filter_map(|r| r.as_ref().err()) {
        eprintln!(
            "warning: replication {} failed: {}",
            failure.replication, failure.error
        );
    }
    let rows = report
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.as_ref().ok()));
    write_atomic(
        &with_suffix(&args.out, ".replications.csv"),
        &replications_table(rows),
    )?;
    match &report.curves {
        Some(curves) => write_atomic(
            &with_suffix(&args.out, ".curves.csv"),
            &curves_table(curves),
        )?,
        None => return Err(CliError::Runtime("every replication failed".into())),
    }
    let agg = &report.aggregates;
    let model = |m: Option<diffsel_core::DyadicModel>| {
        m.map_or("none".to_string(), |m| format!("({},{})", m.p(), m.r()))
    };
    eprintln!(
        "modal drift model {}, modal σ² model {}, median errors {:.4e} / {:.4e}, failures {}",
        model(agg.modal_drift_model),
        model(agg.modal_vol_model),
        agg.drift_err_median,
        agg.vol_err_median,
        agg.failures
    );
    Ok(())
}
