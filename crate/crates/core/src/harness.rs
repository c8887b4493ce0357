//! Simulate, estimate, and score against the known coefficients.

use rayon::prelude::*;

use crate::basis::{DyadicModel, PiecewisePolyFn, Window};
use crate::error::{invalid, Error, Result};
use crate::regression::{
    central_window, empirical_norm_sq, make_drift_responses, make_vol_responses, quantile,
    SamplePath,
};
use crate::selection::{select_model, PenaltySpec, SelectionResult};
use crate::simulate::{simulate_path_stream, DiffusionFamily};

/// Number of grid points in the plotting curves.
pub const CURVE_POINTS: usize = 512;

/// Which process is observed: the unit-diffusion `ξ` (truth `α`, `1`) or
/// `X` (truth `b`, `σ²`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    XiProcess,
    XProcess,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::XiProcess => "xi",
            Target::XProcess => "x",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xi" => Ok(Target::XiProcess),
            "x" => Ok(Target::XProcess),
            other => invalid(format!("unknown target '{other}' (expected xi or x)")),
        }
    }
}

pub fn truth_drift(family: &DiffusionFamily, target: Target, x: f64) -> f64 {
    match target {
        Target::XiProcess => family.alpha(x),
        Target::XProcess => family.model_coeffs(x).0,
    }
}

pub fn truth_vol(family: &DiffusionFamily, target: Target, x: f64) -> f64 {
    match target {
        Target::XiProcess => 1.0,
        Target::XProcess => family.model_coeffs(x).1.powi(2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub drift: SelectionResult,
    pub vol: SelectionResult,
    pub window: Window,
}

/// Drift and `σ²` selection on one path over its central 95% window.
pub fn estimate_both(path: &SamplePath, spec: &PenaltySpec) -> Result<Estimates> {
    let drift_data = make_drift_responses(path);
    let window = central_window(drift_data.predictors())?;
    let drift = select_model(&drift_data, spec, window)?;
    let vol_data = make_vol_responses(path);
    let vol = select_model(&vol_data, spec, window)?;
    Ok(Estimates { drift, vol, window })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: DiffusionFamily,
    pub n: usize,
    pub delta: f64,
    pub replications: usize,
    pub seed: u64,
    pub penalty_spec: PenaltySpec,
    pub target: Target,
}

impl ExperimentConfig {
    /// Config with the practical penalty defaults for `(n, delta)`.
    pub fn new(
        family: DiffusionFamily,
        n: usize,
        delta: f64,
        replications: usize,
        seed: u64,
        target: Target,
    ) -> Self {
        Self {
            family,
            n,
            delta,
            replications,
            seed,
            penalty_spec: PenaltySpec::practical(n, delta),
            target,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return invalid(format!("n must be at least 10, got {}", self.n));
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return invalid(format!("delta must be positive, got {}", self.delta));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub drift_model: DyadicModel,
    pub vol_model: DyadicModel,
    pub drift_err: f64,
    pub vol_err: f64,
    pub window: Window,
    pub drift_estimate: PiecewisePolyFn,
    pub vol_estimate: PiecewisePolyFn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationFailure {
    pub replication: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub modal_drift_model: Option<DyadicModel>,
    pub modal_vol_model: Option<DyadicModel>,
    pub drift_err_median: f64,
    pub drift_err_iqr: f64,
    pub vol_err_median: f64,
    pub vol_err_iqr: f64,
    pub failures: usize,
}

/// Truth and pointwise-median estimates on an equispaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub window: Window,
    pub x: Vec<f64>,
    pub truth_drift: Vec<f64>,
    pub est_drift: Vec<f64>,
    pub truth_vol: Vec<f64>,
    pub est_vol: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<std::result::Result<ReplicationRecord, ReplicationFailure>>,
    pub aggregates: Aggregates,
    pub curves: Option<Curves>,
}

impl ExperimentReport {
    pub fn successes(&self) -> impl Iterator<Item = &ReplicationRecord> {
        self.records.iter().filter_map(|r| r.as_ref().ok())
    }
}

/// Estimates on an observed path and, when the generating family is known,
/// scores them against its truth. Errors are `NaN` without a truth.
pub fn score_path(
    path: &SamplePath,
    spec: &PenaltySpec,
    truth: Option<(&DiffusionFamily, Target)>,
    replication: usize,
) -> Result<ReplicationRecord> {
    let est = estimate_both(path, spec)?;
    let predictors = &path.values()[..path.increments()];
    let (drift_err, vol_err) = match truth {
        Some((family, target)) => (
            empirical_norm_sq(predictors, est.window, |x| {
                est.drift.estimate.evaluate(x) - truth_drift(family, target, x)
            }),
            empirical_norm_sq(predictors, est.window, |x| {
                est.vol.estimate.evaluate(x) - truth_vol(family, target, x)
            }),
        ),
        None => (f64::NAN, f64::NAN),
    };
    Ok(ReplicationRecord {
        replication,
        drift_model: est.drift.chosen,
        vol_model: est.vol.chosen,
        drift_err,
        vol_err,
        window: est.window,
        drift_estimate: est.drift.estimate,
        vol_estimate: est.vol.estimate,
    })
}

fn replicate(
    config: &ExperimentConfig,
    n: usize,
    spec: &PenaltySpec,
    replication: usize,
) -> Result<(ReplicationRecord, Vec<f64>)> {
    let (xi, x) = simulate_path_stream(
        &config.family,
        n,
        config.delta,
        config.seed,
        replication as u64,
    )?;
    let path = match config.target {
        Target::XiProcess => xi,
        Target::XProcess => x,
    };
    let record = score_path(
        &path,
        spec,
        Some((&config.family, config.target)),
        replication,
    )?;
    let predictors = path.values()[..path.increments()].to_vec();
    Ok((record, predictors))
}

/// Runs all replications; replication `r` draws from stream `r` of the seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let outcomes: Vec<_> = (0..config.replications)
        .into_par_iter()
        .map(|r| replicate(config, config.n, &config.penalty_spec, r))
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut pooled = Vec::new();
    for (r, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((record, predictors)) => {
                pooled.extend(predictors);
                records.push(Ok(record));
            }
            Err(error) => records.push(Err(ReplicationFailure {
                replication: r,
                error,
            })),
        }
    }
    let aggregates = aggregate(&records);
    let curves = if pooled.is_empty() {
        None
    } else {
        Some(pooled_curves(config, &records, central_window(&pooled)?))
    };
    Ok(ExperimentReport {
        config: config.clone(),
        records,
        aggregates,
        curves,
    })
}

fn pooled_curves(
    config: &ExperimentConfig,
    records: &[std::result::Result<ReplicationRecord, ReplicationFailure>],
    window: Window,
) -> Curves {
    let ok: Vec<&ReplicationRecord> = records.iter().filter_map(|r| r.as_ref().ok()).collect();
    let x = grid(window, CURVE_POINTS);
    let median_at = |xv: f64, pick: &dyn Fn(&ReplicationRecord) -> &PiecewisePolyFn| {
        let mut vals: Vec<f64> = ok.iter().map(|r| pick(r).evaluate(xv)).collect();
        median(&mut vals)
    };
    Curves {
        window,
        truth_drift: x
            .iter()
            .map(|&v| truth_drift(&config.family, config.target, v))
            .collect(),
        est_drift: x
            .iter()
            .map(|&v| median_at(v, &|r| &r.drift_estimate))
            .collect(),
        truth_vol: x
            .iter()
            .map(|&v| truth_vol(&config.family, config.target, v))
            .collect(),
        est_vol: x
            .iter()
            .map(|&v| median_at(v, &|r| &r.vol_estimate))
            .collect(),
        x,
    }
}

/// `points` equispaced values spanning the window, endpoints included.
pub fn grid(window: Window, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![window.lo()];
    }
    let step = window.width() / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                window.hi()
            } else {
                window.lo() + i as f64 * step
            }
        })
        .collect()
}

fn median(vals: &mut [f64]) -> f64 {
    if vals.is_empty() {
        return f64::NAN;
    }
    vals.sort_by(f64::total_cmp);
    quantile(vals, 0.5)
}

fn iqr(vals: &mut [f64]) -> f64 {
    if vals.is_empty() {
        return f64::NAN;
    }
    vals.sort_by(f64::total_cmp);
    quantile(vals, 0.75) - quantile(vals, 0.25)
}

/// Most frequent model; ties go to the smallest `(dimension, p, r)`.
pub fn modal_model(models: impl IntoIterator<Item = DyadicModel>) -> Option<DyadicModel> {
    let mut counts: Vec<(DyadicModel, usize)> = Vec::new();
    for m in models {
        match counts.iter_mut().find(|(k, _)| *k == m) {
            Some((_, c)) => *c += 1,
            None => counts.push((m, 1)),
        }
    }
    counts
        .into_iter()
        .min_by_key(|(m, c)| (std::cmp::Reverse(*c), m.dimension(), m.p(), m.r()))
        .map(|(m, _)| m)
}

pub fn aggregate(
    records: &[std::result::Result<ReplicationRecord, ReplicationFailure>],
) -> Aggregates {
    let ok: Vec<&ReplicationRecord> = records.iter().filter_map(|r| r.as_ref().ok()).collect();
    let mut drift: Vec<f64> = ok.iter().map(|r| r.drift_err).collect();
    let mut vol: Vec<f64> = ok.iter().map(|r| r.vol_err).collect();
    Aggregates {
        modal_drift_model: modal_model(ok.iter().map(|r| r.drift_model)),
        modal_vol_model: modal_model(ok.iter().map(|r| r.vol_model)),
        drift_err_median: median(&mut drift),
        drift_err_iqr: iqr(&mut drift),
        vol_err_median: median(&mut vol),
        vol_err_iqr: iqr(&mut vol),
        failures: records.len() - ok.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskRow {
    pub n: usize,
    pub median_drift_err: f64,
    pub median_vol_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    pub rows: Vec<RiskRow>,
    /// `errors[i][r]` = `(drift, σ²)` error of replication `r` at `ns[i]`;
    /// `None` when that replication failed.
    pub errors: Vec<Vec<Option<(f64, f64)>>>,
}

/// Median errors for each sample size. Replication `r` uses stream `r` at
/// every `n`, so rows are paired by seed. The penalty is the practical one
/// for each `n`, keeping the config's `κ` and `r_max`.
pub fn risk_curve(config: &ExperimentConfig, ns: &[usize]) -> Result<RiskCurve> {
    if ns.is_empty() {
        return invalid("risk curve needs at least one sample size");
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("sample sizes must be strictly increasing");
    }
    let mut rows = Vec::with_capacity(ns.len());
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let cfg = ExperimentConfig {
            n,
            ..config.clone()
        };
        cfg.validate()?;
        let spec = PenaltySpec::practical(n, config.delta)
            .with_kappa(config.penalty_spec.kappa())?
            .with_r_max(config.penalty_spec.r_max())?;
        let errs: Vec<Option<(f64, f64)>> = (0..config.replications)
            .into_par_iter()
            .map(|r| {
                replicate(&cfg, n, &spec, r)
                    .ok()
                    .map(|(rec, _)| (rec.drift_err, rec.vol_err))
            })
            .collect();
        let mut d: Vec<f64> = errs.iter().flatten().map(|e| e.0).collect();
        let mut v: Vec<f64> = errs.iter().flatten().map(|e| e.1).collect();
        rows.push(RiskRow {
            n,
            median_drift_err: median(&mut d),
            median_vol_err: median(&mut v),
        });
        errors.push(errs);
    }
    Ok(RiskCurve { rows, errors })
}
