//! Exact simulation of stationary discrete samples.

mod ea1;
mod family;
mod rng;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp, StandardNormal};

pub use ea1::{
    brownian_bridge_values, ea1_endpoint_proposal, ea1_endpoint_proposal_global, ea1_transition,
    Ea1Bounds, REJECTION_BUDGET,
};
pub use family::{two_bumps_g_inv, DiffusionFamily, FamilyTag};
pub use rng::RngStream;

use crate::error::{invalid, Error, Result};
use crate::regression::SamplePath;

/// One draw of `ξ_0` from the stationary law of the unit-diffusion process.
///
/// Family 1: `X_0 = Z / V^{1/2}` with `V ~ χ²(ν)`, `ν = 1 + 2θ/c²` (so that
/// `ν^{1/2} X_0 ~ t(ν)`), and `ξ_0 = argsinh(X_0)/c`. Family 2: rejection
/// from the Laplace law with rate `2θ/c`. The zero-drift test family has no
/// stationary law and starts at 0.
pub fn sample_stationary<R: Rng + ?Sized>(family: &DiffusionFamily, rng: &mut R) -> Result<f64> {
    let (theta, c) = (family.theta(), family.c());
    match family.tag() {
        FamilyTag::Family1 => {
            let nu = 1.0 + 2.0 * theta / (c * c);
            let chi = ChiSquared::new(nu).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let z: f64 = StandardNormal.sample(rng);
            let x0 = z / chi.sample(rng).sqrt();
            Ok(x0.asinh() / c)
        }
        FamilyTag::Family2 | FamilyTag::Family2TwoBumps => {
            let rate = 2.0 * theta / c;
            let exp = Exp::new(rate).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let k = 2.0 * theta / (c * c);
            for _ in 0..REJECTION_BUDGET {
                let magnitude = exp.sample(rng);
                let xi = if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                };
                let log_accept = -k * ((1.0 + c * c * xi * xi).sqrt() - c * magnitude);
                if rng.random::<f64>().ln() <= log_accept {
                    return Ok(xi);
                }
            }
            Err(Error::SamplerFailure {
                sampler: "stationary rejection sampler",
                budget: REJECTION_BUDGET,
            })
        }
        FamilyTag::UnitTestZeroDrift => Ok(0.0),
    }
}

/// Acceptance probability of the family-2 stationary sampler at `ξ`.
pub fn stationary_acceptance(family: &DiffusionFamily, xi: f64) -> f64 {
    let (theta, c) = (family.theta(), family.c());
    let k = 2.0 * theta / (c * c);
    (-k * ((1.0 + c * c * xi * xi).sqrt() - c * xi.abs())).exp()
}

/// Stationary `ξ` path of `n + 1` observations and its image `X = F^{-1}(ξ)`,
/// drawn from stream `stream_id` of `seed`.
pub fn simulate_path_stream(
    family: &DiffusionFamily,
    n: usize,
    delta: f64,
    seed: u64,
    stream_id: u64,
) -> Result<(SamplePath, SamplePath)> {
    if n == 0 {
        return invalid("a path needs at least one increment");
    }
    if !(delta.is_finite() && delta > 0.0) {
        return invalid(format!("sampling interval must be positive, got {delta}"));
    }
    let bounds = Ea1Bounds::for_family(family)?;
    let mut rng = RngStream::new(seed, stream_id);
    let mut xi = Vec::with_capacity(n + 1);
    let mut current = sample_stationary(family, &mut rng)?;
    xi.push(current);
    for _ in 0..n {
        current = ea1_transition(current, delta, family, &bounds, &mut rng)?;
        xi.push(current);
    }
    let x = xi.iter().map(|&v| family.to_observed(v)).collect();
    Ok((SamplePath::new(delta, xi)?, SamplePath::new(delta, x)?))
}

/// [`simulate_path_stream`] on stream 0.
pub fn simulate_path(
    family: &DiffusionFamily,
    n: usize,
    delta: f64,
    seed: u64,
) -> Result<(SamplePath, SamplePath)> {
    simulate_path_stream(family, n, delta, seed, 0)
}
