//! Diffusion families with a unit-diffusion representation
//! `dξ = α(ξ) dt + dW` and an explicit map `X = F^{-1}(ξ)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    /// `b(x) = −θx`, `σ(x) = c(1+x²)^{1/2}`; `ξ = argsinh(X)/c`.
    Family1,
    /// `α(ξ) = −θξ/(1+c²ξ²)^{1/2}`; `X = argsinh(cξ)`.
    Family2,
    /// Same `ξ` as [`FamilyTag::Family2`]; `X = argsinh(ξ−5) + argsinh(ξ+5)`.
    Family2TwoBumps,
    /// Standard Brownian motion started at 0.
    UnitTestZeroDrift,
}

impl FamilyTag {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::Family1 => "family1",
            FamilyTag::Family2 => "family2",
            FamilyTag::Family2TwoBumps => "family2-twobumps",
            FamilyTag::UnitTestZeroDrift => "unittest-zerodrift",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "family1" => Ok(FamilyTag::Family1),
            "family2" => Ok(FamilyTag::Family2),
            "family2-twobumps" | "twobumps" => Ok(FamilyTag::Family2TwoBumps),
            "unittest-zerodrift" => Ok(FamilyTag::UnitTestZeroDrift),
            other => invalid(format!("unknown family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionFamily {
    tag: FamilyTag,
    theta: f64,
    c: f64,
}

const BUMP: f64 = 5.0;

impl DiffusionFamily {
    pub fn new(tag: FamilyTag, theta: f64, c: f64) -> Result<Self> {
        if !(theta.is_finite() && c.is_finite()) {
            return invalid("family parameters must be finite");
        }
        if tag != FamilyTag::UnitTestZeroDrift && c <= 0.0 {
            return invalid(format!("c must be positive, got {c}"));
        }
        match tag {
            FamilyTag::Family1 if theta + c * c / 2.0 <= 0.0 => {
                invalid("family1 requires θ + c²/2 > 0")
            }
            FamilyTag::Family2 | FamilyTag::Family2TwoBumps if theta <= 0.0 => {
                invalid("family2 requires θ > 0")
            }
            _ => Ok(Self { tag, theta, c }),
        }
    }

    pub fn unit_test() -> Self {
        Self {
            tag: FamilyTag::UnitTestZeroDrift,
            theta: 1.0,
            c: 1.0,
        }
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn family1_amplitude(&self) -> f64 {
        self.theta / self.c + self.c / 2.0
    }

    /// Drift `α(ξ)` of the unit-diffusion process.
    pub fn alpha(&self, xi: f64) -> f64 {
        match self.tag {
            FamilyTag::Family1 => -self.family1_amplitude() * (self.c * xi).tanh(),
            FamilyTag::Family2 | FamilyTag::Family2TwoBumps => {
                -self.theta * xi / (1.0 + self.c * self.c * xi * xi).sqrt()
            }
            FamilyTag::UnitTestZeroDrift => 0.0,
        }
    }

    pub fn alpha_prime(&self, xi: f64) -> f64 {
        match self.tag {
            FamilyTag::Family1 => {
                let sech = 1.0 / (self.c * xi).cosh();
                -self.family1_amplitude() * self.c * sech * sech
            }
            FamilyTag::Family2 | FamilyTag::Family2TwoBumps => {
                let s = (1.0 + self.c * self.c * xi * xi).sqrt();
                -self.theta / (s * s * s)
            }
            FamilyTag::UnitTestZeroDrift => 0.0,
        }
    }

    /// Antiderivative `A` of `α`, normalized as in the closed forms
    /// (`A(0) = 0` for family 1, `A(0) = −θ/c²` for family 2).
    pub fn big_a(&self, xi: f64) -> f64 {
        match self.tag {
            FamilyTag::Family1 => -(0.5 + self.theta / (self.c * self.c)) * log_cosh(self.c * xi),
            FamilyTag::Family2 | FamilyTag::Family2TwoBumps => {
                -(self.theta / (self.c * self.c)) * (1.0 + self.c * self.c * xi * xi).sqrt()
            }
            FamilyTag::UnitTestZeroDrift => 0.0,
        }
    }

    /// `(α² + α′)/2`, the integrand of the EA1 path weight.
    pub fn half_alpha_sq_plus_prime(&self, xi: f64) -> f64 {
        let a = self.alpha(xi);
        0.5 * (a * a + self.alpha_prime(xi))
    }

    /// Whether `A` is concave on ℝ, which licenses a tangent-line endpoint
    /// proposal. Holds for every family here since `α′ ≤ 0`.
    pub fn has_concave_potential(&self) -> bool {
        true
    }

    /// Observed process value `X = F^{-1}(ξ)`.
    pub fn to_observed(&self, xi: f64) -> f64 {
        match self.tag {
            FamilyTag::Family1 => (self.c * xi).sinh(),
            FamilyTag::Family2 => (self.c * xi).asinh(),
            FamilyTag::Family2TwoBumps => two_bumps_g(xi),
            FamilyTag::UnitTestZeroDrift => xi,
        }
    }

    /// `ξ = F(X)`.
    pub fn to_unit_diffusion(&self, x: f64) -> f64 {
        match self.tag {
            FamilyTag::Family1 => x.asinh() / self.c,
            FamilyTag::Family2 => x.sinh() / self.c,
            FamilyTag::Family2TwoBumps => two_bumps_g_inv(x),
            FamilyTag::UnitTestZeroDrift => x,
        }
    }

    /// True `(b(x), σ(x))` of the observed process.
    pub fn model_coeffs(&self, x: f64) -> (f64, f64) {
        let (theta, c) = (self.theta, self.c);
        match self.tag {
            FamilyTag::Family1 => (-theta * x, c * (1.0 + x * x).sqrt()),
            FamilyTag::Family2 => {
                let (sh, ch) = (x.sinh(), x.cosh());
                (-(theta + c * c / (2.0 * ch)) * sh / (ch * ch), c / ch)
            }
            FamilyTag::Family2TwoBumps => {
                let xi = two_bumps_g_inv(x);
                let (g1, g2) = two_bumps_derivs(xi);
                (g1 * self.alpha(xi) + 0.5 * g2, g1)
            }
            FamilyTag::UnitTestZeroDrift => (0.0, 1.0),
        }
    }
}

/// `ln cosh(y)` without overflow for large `|y|`.
fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn two_bumps_g(xi: f64) -> f64 {
    (xi - BUMP).asinh() + (xi + BUMP).asinh()
}

/// `G^{-1}(x) = tanh(x/2) ((cosh x + 51)/2)^{1/2}`.
///
/// Algebraically equal to the `[49 sinh² x + 100 + cosh x (sinh² x − 100)]^{1/2}
/// / (2^{1/2} sinh x)` form, but free of the cancellation near 0.
pub fn two_bumps_g_inv(x: f64) -> f64 {
    (0.5 * x).tanh() * (0.5 * (x.cosh() + 2.0 * BUMP * BUMP + 1.0)).sqrt()
}

/// `(G′(ξ), G″(ξ))`.
fn two_bumps_derivs(xi: f64) -> (f64, f64) {
    let (m, p) = (xi - BUMP, xi + BUMP);
    let (qm, qp) = (1.0 + m * m, 1.0 + p * p);
    let g1 = 1.0 / qm.sqrt() + 1.0 / qp.sqrt();
    let g2 = -m / (qm * qm.sqrt()) - p / (qp * qp.sqrt());
    (g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(tag: FamilyTag, theta: f64, c: f64) -> DiffusionFamily {
        DiffusionFamily::new(tag, theta, c).unwrap()
    }

    #[test]
    fn family1_at_origin() {
        let f = fam(FamilyTag::Family1, 6.0, 2.0);
        assert_eq!(f.alpha(0.0), 0.0);
        assert_eq!(f.big_a(0.0), 0.0);
        assert!((2.0 * f.half_alpha_sq_plus_prime(0.0) + 8.0).abs() < 1e-14);
        assert_eq!(f.model_coeffs(0.0), (0.0, 2.0));
    }

    #[test]
    fn family1_closed_form_combination() {
        let (theta, c) = (6.0, 2.0);
        let f = fam(FamilyTag::Family1, theta, c);
        let k = (theta / c + c / 2.0).powi(2) + theta + c * c / 2.0;
        for i in -40..=40 {
            let xi = i as f64 * 0.1;
            let t = (c * xi).tanh();
            let want = k * t * t - (theta + c * c / 2.0);
            assert!((2.0 * f.half_alpha_sq_plus_prime(xi) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn family2_at_origin() {
        let f = fam(FamilyTag::Family2, 3.0, 2.0);
        assert_eq!(f.alpha(0.0), 0.0);
        assert_eq!(f.alpha_prime(0.0), -3.0);
        assert_eq!(f.big_a(0.0), -0.75);
        let (b, s) = f.model_coeffs(0.0);
        assert_eq!(b, 0.0);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in [
            fam(FamilyTag::Family1, 6.0, 2.0),
            fam(FamilyTag::Family2, 3.0, 2.0),
            fam(FamilyTag::Family2TwoBumps, 1.0, 10.0),
        ] {
            for i in -30..=30 {
                let xi = i as f64 * 0.13;
                let da = (f.alpha(xi + h) - f.alpha(xi - h)) / (2.0 * h);
                assert!(
                    (da - f.alpha_prime(xi)).abs() < 1e-6,
                    "{:?} at {xi}",
                    f.tag()
                );
                let dbig = (f.big_a(xi + h) - f.big_a(xi - h)) / (2.0 * h);
                assert!((dbig - f.alpha(xi)).abs() < 1e-6, "{:?} at {xi}", f.tag());
            }
        }
    }

    #[test]
    fn transforms_round_trip() {
        for f in [
            fam(FamilyTag::Family1, 6.0, 2.0),
            fam(FamilyTag::Family2, 3.0, 2.0),
            fam(FamilyTag::Family2TwoBumps, 1.0, 10.0),
            DiffusionFamily::unit_test(),
        ] {
            for i in -50..=50 {
                let xi = i as f64 * 0.2;
                let back = f.to_unit_diffusion(f.to_observed(xi));
                assert!(
                    (back - xi).abs() < 1e-9 * (1.0 + xi.abs()),
                    "{:?} {xi}",
                    f.tag()
                );
            }
        }
    }

    #[test]
    fn two_bumps_inverse_matches_displayed_formula() {
        let displayed = |x: f64| {
            let (sh, ch) = (x.sinh(), x.cosh());
            (49.0 * sh * sh + 100.0 + ch * (sh * sh - 100.0)).sqrt() / (2f64.sqrt() * sh)
        };
        for x in [0.5, 1.0, 2.0, 3.0, -1.5, -2.5, 4.0] {
            let want = displayed(x);
            assert!(
                (two_bumps_g_inv(x) - want).abs() < 1e-10 * want.abs(),
                "{x}"
            );
        }
        assert_eq!(two_bumps_g_inv(0.0), 0.0);
        // near the origin G^{-1}(x) ≈ x / G′(0) = x √26 / 2
        let x = 1e-8;
        assert!((two_bumps_g_inv(x) - x * 26f64.sqrt() / 2.0).abs() < 1e-20);
    }

    #[test]
    fn two_bumps_sigma_at_g5() {
        let f = fam(FamilyTag::Family2TwoBumps, 1.0, 10.0);
        let (_, s) = f.model_coeffs(two_bumps_g(5.0));
        let want = 1.0 + 1.0 / 101f64.sqrt();
        assert!((s - want).abs() < 1e-12);
    }

    #[test]
    fn two_bumps_drift_is_ito_image() {
        // b(G(ξ)) = G′(ξ)α(ξ) + G″(ξ)/2 with G″ by finite differences.
        let f = fam(FamilyTag::Family2TwoBumps, 1.0, 10.0);
        let h = 1e-4;
        for xi in [-7.0, -3.3, -0.4, 0.0, 1.2, 4.9, 8.0] {
            let g1 = (two_bumps_g(xi + h) - two_bumps_g(xi - h)) / (2.0 * h);
            let g2 = (two_bumps_g(xi + h) - 2.0 * two_bumps_g(xi) + two_bumps_g(xi - h)) / (h * h);
            let (b, s) = f.model_coeffs(two_bumps_g(xi));
            assert!((s - g1).abs() < 1e-7);
            assert!((b - (g1 * f.alpha(xi) + 0.5 * g2)).abs() < 1e-5);
        }
    }

    #[test]
    fn admissibility() {
        assert!(DiffusionFamily::new(FamilyTag::Family1, -3.0, 2.0).is_err());
        assert!(DiffusionFamily::new(FamilyTag::Family1, -1.0, 2.0).is_ok());
        assert!(DiffusionFamily::new(FamilyTag::Family2, 0.0, 2.0).is_err());
        assert!(DiffusionFamily::new(FamilyTag::Family2TwoBumps, 1.0, -1.0).is_err());
        assert_eq!("family2".parse::<FamilyTag>().unwrap(), FamilyTag::Family2);
        assert!("family9".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn log_cosh_is_stable() {
        assert_eq!(log_cosh(0.0), 0.0);
        assert!((log_cosh(1.3) - 1.3f64.cosh().ln()).abs() < 1e-14);
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
