//! Penalized model selection over the dyadic collection.
//!
//! The criterion for `m = (p, r)` is `γ_n(f̂_m) + pen(m)` with
//!
//! ```text
//! pen(m) = κ (ŝ² / n) 2^p (r + 1 + ln^{2.5}(r + 1))
//! ```
//!
//! where `ŝ²` is the contrast of a pilot fit in a medium-dimension model.

use rayon::prelude::*;

use crate::basis::{DyadicModel, PiecewisePolyFn, Window, R_MAX};
use crate::error::{invalid, Result};
use crate::regression::{fit_least_squares, RegressionData};

pub const DEFAULT_KAPPA: f64 = 4.0;
pub const DEFAULT_R_MAX: usize = R_MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec {
    kappa: f64,
    r_max: usize,
    d_max: usize,
    medium_dim_target: usize,
}

impl PenaltySpec {
    pub fn new(kappa: f64, r_max: usize, d_max: usize, medium_dim_target: usize) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return invalid(format!("kappa must be positive, got {kappa}"));
        }
        if r_max > R_MAX {
            return invalid(format!(
                "r_max {r_max} exceeds the supported maximum {R_MAX}"
            ));
        }
        if d_max == 0 {
            return invalid("d_max must be at least 1");
        }
        if medium_dim_target == 0 || medium_dim_target > d_max {
            return invalid(format!(
                "pilot dimension {medium_dim_target} must lie in 1..={d_max}"
            ));
        }
        Ok(Self {
            kappa,
            r_max,
            d_max,
            medium_dim_target,
        })
    }

    /// Defaults for a sample of `n` increments at step `delta`:
    /// `d_max = max(8, ⌊nΔ / ln(max(nΔ, e))⌋)`, pilot dimension `⌊√d_max⌋`.
    pub fn practical(n: usize, delta: f64) -> Self {
        let d_max = practical_d_max(n, delta);
        Self {
            kappa: DEFAULT_KAPPA,
            r_max: DEFAULT_R_MAX,
            d_max,
            medium_dim_target: ((d_max as f64).sqrt().floor() as usize).max(1),
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(kappa, self.r_max, self.d_max, self.medium_dim_target)
    }

    pub fn with_r_max(self, r_max: usize) -> Result<Self> {
        Self::new(self.kappa, r_max, self.d_max, self.medium_dim_target)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn medium_dim_target(&self) -> usize {
        self.medium_dim_target
    }

    /// `κ (ŝ²/n) 2^p (r + 1 + ln^{2.5}(r + 1))`.
    pub fn penalty(&self, model: DyadicModel, s_hat_sq: f64, n: usize) -> f64 {
        let r1 = (model.r() + 1) as f64;
        let shape = r1 + r1.ln().powf(2.5);
        self.kappa * s_hat_sq / n as f64 * model.bins() as f64 * shape
    }
}

pub fn practical_d_max(n: usize, delta: f64) -> usize {
    let horizon = n as f64 * delta;
    let soft = horizon / horizon.max(std::f64::consts::E).ln();
    (soft.floor() as usize).max(8)
}

/// All `(p, r)` with `r ≤ r_max` and `2^p (r+1) ≤ d_max`, ordered by
/// dimension, then `p`, then `r`.
pub fn enumerate_models(spec: &PenaltySpec) -> Vec<DyadicModel> {
    let mut models = Vec::new();
    for r in 0..=spec.r_max {
        let mut p = 0u32;
        while (1usize << p) * (r + 1) <= spec.d_max {
            models.push(DyadicModel::new(p, r).expect("within limits"));
            p += 1;
        }
    }
    models.sort_by_key(|m| (m.dimension(), m.p(), m.r()));
    models
}

/// The pilot model: `r = 1` (when admissible) with dimension closest to the
/// medium target, ties to the smaller `p`.
pub fn pilot_model(spec: &PenaltySpec) -> Option<DyadicModel> {
    let models = enumerate_models(spec);
    let target = spec.medium_dim_target as i64;
    let closest = |pool: &mut dyn Iterator<Item = DyadicModel>| {
        pool.min_by_key(|m| ((m.dimension() as i64 - target).abs(), m.p(), m.r()))
    };
    closest(&mut models.iter().copied().filter(|m| m.r() == 1))
        .or_else(|| closest(&mut models.iter().copied()))
}

/// Contrast of the pilot fit, used as the noise-level plug-in `ŝ²`.
pub fn pilot_variance(data: &RegressionData, spec: &PenaltySpec, window: Window) -> Result<f64> {
    let Some(model) = pilot_model(spec) else {
        return invalid("model collection is empty");
    };
    Ok(fit_least_squares(data, model, window)?.contrast)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub model: DyadicModel,
    pub contrast: f64,
    pub penalty: f64,
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen: DyadicModel,
    pub estimate: PiecewisePolyFn,
    pub per_model_trace: Vec<TraceEntry>,
    pub s_hat_sq: f64,
}

impl SelectionResult {
    pub fn chosen_entry(&self) -> &TraceEntry {
        self.per_model_trace
            .iter()
            .find(|e| e.model == self.chosen)
            .expect("chosen model is in the trace")
    }
}

/// Fits every model in the collection and returns the penalized-contrast
/// minimizer. Ties go to the earliest model in enumeration order, i.e. the
/// smallest dimension and then the smallest `p`.
pub fn select_model(
    data: &RegressionData,
    spec: &PenaltySpec,
    window: Window,
) -> Result<SelectionResult> {
    let models = enumerate_models(spec);
    if models.is_empty() {
        return invalid("model collection is empty");
    }
    let s_hat_sq = pilot_variance(data, spec, window)?;
    let n = data.len();
    let fits = models
        .par_iter()
        .map(|&m| fit_least_squares(data, m, window))
        .collect::<Result<Vec<_>>>()?;

    let mut trace = Vec::with_capacity(models.len());
    let mut best = 0;
    for (i, fit) in fits.iter().enumerate() {
        let model = fit.estimate.model();
        let penalty = spec.penalty(model, s_hat_sq, n);
        let criterion = fit.contrast + penalty;
        if criterion
            < trace
                .get(best)
                .map_or(f64::INFINITY, |e: &TraceEntry| e.criterion)
        {
            best = i;
        }
        trace.push(TraceEntry {
            model,
            contrast: fit.contrast,
            penalty,
            criterion,
        });
    }
    let estimate = fits.into_iter().nth(best).expect("index in range").estimate;
    Ok(SelectionResult {
        chosen: trace[best].model,
        estimate,
        per_model_trace: trace,
        s_hat_sq,
    })
}
