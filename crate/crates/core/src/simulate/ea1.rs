//! Exact transitions of `dξ = α(ξ) dt + dW` by retrospective rejection (EA1).
//!
//! Given `ξ_0 = x`, one attempt is:
//!
//! 1. draw the endpoint `y` with density proportional to
//!    `exp(A(y) − (y − x)²/(2Δ))`;
//! 2. draw a Poisson(`m_span · Δ`) number of marks `(t_i, v_i)` uniformly on
//!    `[0, Δ] × [0, m_span]`;
//! 3. draw a Brownian bridge from `(0, x)` to `(Δ, y)` at the times `t_i`;
//! 4. accept `y` iff every mark lies above the graph of
//!    `φ(ω) = (α²(ω) + α′(ω))/2 − ell`.
//!
//! A rejected attempt restarts from step 1.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::family::DiffusionFamily;
use crate::error::{invalid, Error, Result};

/// Attempt budget shared by every rejection loop in the simulator.
pub const REJECTION_BUDGET: u64 = 1_000_000;

const GRID_HALF_WIDTH: f64 = 50.0;
const GRID_POINTS: usize = 1_000_001;
const SPAN_INFLATION: f64 = 1.01;

/// Constants making the EA1 weight well defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ea1Bounds {
    /// Lower bound of `(α² + α′)/2`.
    pub ell: f64,
    /// Upper bound of `(α² + α′)/2 − ell`.
    pub m_span: f64,
    /// Supremum of `A`.
    pub a_sup: f64,
}

impl Ea1Bounds {
    /// Bounds for `family`, closed form where available and otherwise from a
    /// grid scan plus the tail limit, then certified on the grid.
    pub fn for_family(family: &DiffusionFamily) -> Result<Self> {
        use super::family::FamilyTag::*;
        let (theta, c) = (family.theta(), family.c());
        let bounds = match family.tag() {
            Family1 => {
                let k = (theta / c + c / 2.0).powi(2) + theta + c * c / 2.0;
                Self {
                    ell: -(theta + c * c / 2.0) / 2.0,
                    m_span: k / 2.0,
                    a_sup: 0.0,
                }
            }
            Family2 | Family2TwoBumps => {
                let tail = theta * theta / (2.0 * c * c);
                let (mut lo, mut hi) = (tail, tail);
                for xi in grid() {
                    let v = family.half_alpha_sq_plus_prime(xi);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let span = hi - lo;
                let ell = lo - 0.005 * span;
                Self {
                    ell,
                    m_span: (hi - ell) * SPAN_INFLATION,
                    a_sup: family.big_a(0.0),
                }
            }
            UnitTestZeroDrift => Self {
                ell: 0.0,
                m_span: 0.0,
                a_sup: 0.0,
            },
        };
        bounds.certify(family)?;
        Ok(bounds)
    }

    /// Checks `0 ≤ φ ≤ m_span` and `A ≤ a_sup` on an equispaced grid over
    /// `[−50, 50]`.
    pub fn certify(&self, family: &DiffusionFamily) -> Result<()> {
        if !(self.m_span >= 0.0 && self.ell.is_finite() && self.a_sup.is_finite()) {
            return invalid(format!("malformed EA1 bounds {self:?}"));
        }
        let tol = 1e-12 * (1.0 + self.ell.abs() + self.m_span);
        for xi in grid() {
            let phi = family.half_alpha_sq_plus_prime(xi) - self.ell;
            if phi < -tol || phi > self.m_span * (1.0 + 1e-9) + tol {
                return invalid(format!(
                    "EA1 bounds violated at ξ = {xi}: φ = {phi}, span {}",
                    self.m_span
                ));
            }
            if family.big_a(xi) - self.a_sup > tol {
                return invalid(format!("A exceeds its supremum bound at ξ = {xi}"));
            }
        }
        Ok(())
    }
}

fn grid() -> impl Iterator<Item = f64> {
    let step = 2.0 * GRID_HALF_WIDTH / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(move |i| -GRID_HALF_WIDTH + i as f64 * step)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Endpoint draw with density `∝ exp(A(y) − (y − x)²/(2Δ))`.
///
/// When `A` is concave the proposal is `N(x + α(x)Δ, Δ)` and the acceptance
/// ratio is `exp(A(y) − A(x) − α(x)(y − x)) ≤ 1`; otherwise the global rule
/// of [`ea1_endpoint_proposal_global`] is used.
pub fn ea1_endpoint_proposal<R: Rng + ?Sized>(
    x: f64,
    delta: f64,
    family: &DiffusionFamily,
    bounds: &Ea1Bounds,
    rng: &mut R,
) -> Result<f64> {
    if !family.has_concave_potential() {
        return ea1_endpoint_proposal_global(x, delta, family, bounds, rng);
    }
    let sd = delta.sqrt();
    let (ax, slope) = (family.big_a(x), family.alpha(x));
    let centre = x + slope * delta;
    for _ in 0..REJECTION_BUDGET {
        let y = centre + sd * normal(rng);
        let log_ratio = family.big_a(y) - ax - slope * (y - x);
        if rng.random::<f64>().ln() <= log_ratio.min(0.0) {
            return Ok(y);
        }
    }
    Err(Error::SamplerFailure {
        sampler: "EA1 endpoint proposal",
        budget: REJECTION_BUDGET,
    })
}

/// Endpoint draw proposing `N(x, Δ)` and accepting with `exp(A(y) − a_sup)`.
pub fn ea1_endpoint_proposal_global<R: Rng + ?Sized>(
    x: f64,
    delta: f64,
    family: &DiffusionFamily,
    bounds: &Ea1Bounds,
    rng: &mut R,
) -> Result<f64> {
    let sd = delta.sqrt();
    for _ in 0..REJECTION_BUDGET {
        let y = x + sd * normal(rng);
        let log_ratio = family.big_a(y) - bounds.a_sup;
        if rng.random::<f64>().ln() <= log_ratio.min(0.0) {
            return Ok(y);
        }
    }
    Err(Error::SamplerFailure {
        sampler: "EA1 endpoint proposal",
        budget: REJECTION_BUDGET,
    })
}

/// Brownian bridge from `(0, x0)` to `(Δ, x_delta)` at strictly increasing
/// times in `(0, Δ)`, sampled sequentially.
pub fn brownian_bridge_values<R: Rng + ?Sized>(
    times: &[f64],
    x0: f64,
    x_delta: f64,
    delta: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let (mut s, mut ws) = (0.0, x0);
    for &t in times {
        if !(t > s && t < delta) {
            return invalid(format!(
                "bridge times must be increasing inside (0, {delta})"
            ));
        }
        let mean = ws + (t - s) / (delta - s) * (x_delta - ws);
        let var = (t - s) * (delta - t) / (delta - s);
        let w = mean + var.sqrt() * normal(rng);
        out.push(w);
        s = t;
        ws = w;
    }
    Ok(out)
}

/// One exact draw of `ξ_Δ` given `ξ_0 = x`.
pub fn ea1_transition<R: Rng + ?Sized>(
    x: f64,
    delta: f64,
    family: &DiffusionFamily,
    bounds: &Ea1Bounds,
    rng: &mut R,
) -> Result<f64> {
    let rate = bounds.m_span * delta;
    let poisson = if rate > 0.0 {
        Some(Poisson::new(rate).map_err(|e| Error::InvalidArgument(e.to_string()))?)
    } else {
        None
    };
    let mut marks: Vec<(f64, f64)> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for _ in 0..REJECTION_BUDGET {
        let y = ea1_endpoint_proposal(x, delta, family, bounds, rng)?;
        let count = poisson.as_ref().map_or(0, |p| p.sample(rng) as usize);
        if count == 0 {
            return Ok(y);
        }
        marks.clear();
        for _ in 0..count {
            let t = delta * rng.random::<f64>();
            let v = bounds.m_span * rng.random::<f64>();
            marks.push((t, v));
        }
        marks.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Ties and the measure-zero endpoint t = 0 are redrawn.
        if marks.windows(2).any(|w| w[0].0 == w[1].0) || marks[0].0 == 0.0 {
            continue;
        }
        times.clear();
        times.extend(marks.iter().map(|m| m.0));
        let bridge = brownian_bridge_values(&times, x, y, delta, rng)?;
        let accepted = marks
            .iter()
            .zip(&bridge)
            .all(|(&(_, v), &w)| v > family.half_alpha_sq_plus_prime(w) - bounds.ell);
        if accepted {
            return Ok(y);
        }
    }
    Err(Error::SamplerFailure {
        sampler: "EA1 transition",
        budget: REJECTION_BUDGET,
    })
}
