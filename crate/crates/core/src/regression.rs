//! Regression responses built from a discretely observed path, and
//! least-squares projection onto a fixed dyadic space.
//!
//! For a path `X_{kΔ}`, the drift responses are the scaled increments
//! `Y_k = (X_{(k+1)Δ} − X_{kΔ}) / Δ` and the volatility responses are
//! `U_k = (X_{(k+1)Δ} − X_{kΔ})² / Δ`; both are regressed on `X_{kΔ}`.

use faer::Mat;

use crate::basis::{DyadicModel, PiecewisePolyFn, Window, R_MAX};
use crate::error::{invalid, Result};

/// Relative singular-value cutoff for the per-bin solves.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Observations `X_{kΔ}`, `k = 1..=n+1`, at a regular step `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    delta: f64,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return invalid(format!("sampling interval must be positive, got {delta}"));
        }
        if values.len() < 2 {
            return invalid(format!(
                "a path needs at least 2 values, got {}",
                values.len()
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite observation at index {k}"));
        }
        Ok(Self { delta, values })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of increments `n`.
    pub fn increments(&self) -> usize {
        self.values.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    Drift,
    Volatility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    predictors: Vec<f64>,
    responses: Vec<f64>,
    kind: ResponseKind,
}

impl RegressionData {
    pub fn new(predictors: Vec<f64>, responses: Vec<f64>, kind: ResponseKind) -> Result<Self> {
        if predictors.len() != responses.len() {
            return invalid(format!(
                "{} predictors but {} responses",
                predictors.len(),
                responses.len()
            ));
        }
        if predictors.is_empty() {
            return invalid("regression data is empty");
        }
        if predictors.iter().chain(&responses).any(|v| !v.is_finite()) {
            return invalid("regression data contains non-finite entries");
        }
        if kind == ResponseKind::Volatility && responses.iter().any(|&u| u < 0.0) {
            return invalid("volatility responses must be nonnegative");
        }
        Ok(Self {
            predictors,
            responses,
            kind,
        })
    }

    pub fn predictors(&self) -> &[f64] {
        &self.predictors
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn kind(&self) -> ResponseKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.predictors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictors.is_empty()
    }

    /// Same predictors with every response multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let responses = self.responses.iter().map(|y| y * factor).collect();
        Self::new(self.predictors.clone(), responses, self.kind)
    }
}

/// `(X_{kΔ}, (X_{(k+1)Δ} − X_{kΔ}) / Δ)`.
pub fn make_drift_responses(path: &SamplePath) -> RegressionData {
    let delta = path.delta();
    let (predictors, responses) = path
        .values()
        .windows(2)
        .map(|w| (w[0], (w[1] - w[0]) / delta))
        .unzip();
    RegressionData {
        predictors,
        responses,
        kind: ResponseKind::Drift,
    }
}

/// `(X_{kΔ}, (X_{(k+1)Δ} − X_{kΔ})² / Δ)`.
pub fn make_vol_responses(path: &SamplePath) -> RegressionData {
    let delta = path.delta();
    let (predictors, responses) = path
        .values()
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            (w[0], d * d / delta)
        })
        .unzip();
    RegressionData {
        predictors,
        responses,
        kind: ResponseKind::Volatility,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub estimate: PiecewisePolyFn,
    /// Contrast at the estimate over all `n` points.
    pub contrast: f64,
    /// Number of identifiable coefficients (numerical rank summed over bins).
    pub dof_used: usize,
}

/// Least-squares minimizer of the contrast over `S_m` on `window`.
///
/// Each bin is solved independently; rank-deficient bins get the
/// minimum-norm solution and empty bins get zero coefficients.
pub fn fit_least_squares(
    data: &RegressionData,
    model: DyadicModel,
    window: Window,
) -> Result<FitOutcome> {
    let k = model.r() + 1;
    let bins = model.bins();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); bins];
    let mut rhs: Vec<Vec<f64>> = vec![Vec::new(); bins];
    let mut vals = [0.0; R_MAX + 1];
    for (&x, &y) in data.predictors.iter().zip(&data.responses) {
        if !window.contains(x) {
            continue;
        }
        if let Some(j) = model.local_basis(window.to_unit(x), &mut vals) {
            rows[j].extend_from_slice(&vals[..k]);
            rhs[j].push(y);
        }
    }

    let mut coeffs = vec![0.0; model.dimension()];
    let mut dof_used = 0;
    for j in 0..bins {
        if rhs[j].is_empty() {
            continue;
        }
        let (sol, rank) = min_norm_lstsq(&rows[j], &rhs[j], k)?;
        coeffs[j * k..(j + 1) * k].copy_from_slice(&sol);
        dof_used += rank;
    }

    let estimate = PiecewisePolyFn::new(model, coeffs, window)?;
    let contrast = contrast(data, &estimate);
    Ok(FitOutcome {
        estimate,
        contrast,
        dof_used,
    })
}

/// Minimum-norm least squares for a row-major `m × k` design via thin SVD;
/// singular values at or below `RANK_CUTOFF · σ_max` are treated as zero.
fn min_norm_lstsq(design: &[f64], y: &[f64], k: usize) -> Result<(Vec<f64>, usize)> {
    let m = y.len();
    let a = Mat::from_fn(m, k, |i, j| design[i * k + j]);
    let svd = a
        .thin_svd()
        .map_err(|e| crate::Error::InvalidArgument(format!("least-squares solve failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = (0..s.nrows()).map(|i| s[i]).fold(0.0, f64::max);
    let eps = RANK_CUTOFF * smax;
    let mut sol = vec![0.0; k];
    let mut rank = 0;
    for i in 0..s.nrows() {
        if s[i] <= eps {
            continue;
        }
        rank += 1;
        let proj: f64 = (0..m).map(|r| u[(r, i)] * y[r]).sum::<f64>() / s[i];
        for (c, out) in sol.iter_mut().enumerate() {
            *out += v[(c, i)] * proj;
        }
    }
    Ok((sol, rank))
}

/// `n^{-1} Σ (y_k − f(x_k))²`.
pub fn contrast(data: &RegressionData, f: &PiecewisePolyFn) -> f64 {
    let sum: f64 = data
        .predictors
        .iter()
        .zip(&data.responses)
        .map(|(&x, &y)| {
            let e = y - f.evaluate(x);
            e * e
        })
        .sum();
    sum / data.len() as f64
}

/// `n^{-1} Σ d(x_k)² 1{x_k ∈ window}` where `d` is the pointwise difference
/// between an estimate and the truth.
pub fn empirical_norm_sq(predictors: &[f64], window: Window, diff: impl Fn(f64) -> f64) -> f64 {
    if predictors.is_empty() {
        return 0.0;
    }
    let sum: f64 = predictors
        .iter()
        .filter(|&&x| window.contains(x))
        .map(|&x| {
            let d = diff(x);
            d * d
        })
        .sum();
    sum / predictors.len() as f64
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Window between the 2.5% and 97.5% empirical quantiles of the predictors.
/// A constant sample gets the unit-width window centred on its value.
pub fn central_window(predictors: &[f64]) -> Result<Window> {
    if predictors.is_empty() {
        return invalid("cannot build a window from no points");
    }
    let mut sorted = predictors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = quantile(&sorted, 0.025);
    let hi = quantile(&sorted, 0.975);
    if lo < hi {
        Window::new(lo, hi)
    } else {
        Window::new(lo - 0.5, hi + 0.5)
    }
}
