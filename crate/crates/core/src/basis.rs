//! Dyadic piecewise polynomial spaces with an orthonormal Legendre basis.
//!
//! The space `S_m`, `m = (p, r)`, consists of functions on `[0, 1]` that are
//! polynomials of degree at most `r` on each of the `2^p` dyadic bins. The
//! basis function for bin `j` (1-based) and degree `ℓ` is
//!
//! ```text
//! φ_{j,ℓ}(x) = 2^{p/2} (2ℓ+1)^{1/2} Q_ℓ(2(2^p x − j + 1) − 1) 1{x ∈ I_j}
//! ```
//!
//! with `Q_ℓ` the Legendre polynomial on `[−1, 1]`. Bins are half-open
//! `[(j−1)/2^p, j/2^p)` except the last, which is closed at 1.

use crate::error::{invalid, Result};

/// Highest polynomial degree per bin supported by the collection.
pub const R_MAX: usize = 9;

const MAX_LEVEL: u32 = 30;
const CLAMP_SLACK: f64 = 1e-12;

/// Closed interval `[lo, hi]` mapped affinely onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    lo: f64,
    hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return invalid(format!("degenerate window [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    /// The unit interval itself.
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.lo) / (self.hi - self.lo)
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
}

/// Model index `m = (p, r)`: `2^p` bins, global degree `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicModel {
    p: u32,
    r: usize,
}

impl DyadicModel {
    pub fn new(p: u32, r: usize) -> Result<Self> {
        if r > R_MAX {
            return invalid(format!("degree {r} exceeds the maximum {R_MAX}"));
        }
        if p > MAX_LEVEL {
            return invalid(format!("dyadic level {p} exceeds {MAX_LEVEL}"));
        }
        Ok(Self { p, r })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bins(&self) -> usize {
        1usize << self.p
    }

    /// `D_m = 2^p (r + 1)`.
    pub fn dimension(&self) -> usize {
        self.bins() * (self.r + 1)
    }

    /// Certified bound `D_m (r + 1)` on `sup_x Σ φ_{j,ℓ}(x)²`.
    pub fn norm_connection_bound(&self) -> f64 {
        (self.dimension() * (self.r + 1)) as f64
    }

    /// Zero-based bin index of `u`, or `None` outside `[0, 1]`.
    pub fn bin_of(&self, u: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let bins = self.bins();
        let j = (u * bins as f64).floor() as usize;
        Some(j.min(bins - 1))
    }

    /// Fills `out[ℓ] = φ_{j,ℓ}(u)` for `ℓ = 0..=r` where `j` is the bin that
    /// contains `u`, and returns that zero-based bin index.
    pub(crate) fn local_basis(&self, u: f64, out: &mut [f64]) -> Option<usize> {
        let j = self.bin_of(u)?;
        let bins = self.bins() as f64;
        let local = u * bins - j as f64;
        let t = (2.0 * local - 1.0).clamp(-1.0, 1.0);
        legendre_all(self.r, t, out);
        let scale = bins.sqrt();
        for (l, v) in out.iter_mut().enumerate().take(self.r + 1) {
            *v *= scale * ((2 * l + 1) as f64).sqrt();
        }
        Some(j)
    }
}

/// Legendre polynomial `Q_degree(u)` on `[−1, 1]` by the three-term recurrence.
pub fn legendre_eval(degree: usize, u: f64) -> Result<f64> {
    if degree > R_MAX {
        return invalid(format!("degree {degree} exceeds the maximum {R_MAX}"));
    }
    if u.is_nan() || u.abs() > 1.0 + CLAMP_SLACK {
        return invalid(format!("argument {u} outside [-1, 1]"));
    }
    let mut q = [0.0; R_MAX + 1];
    legendre_all(degree, u.clamp(-1.0, 1.0), &mut q);
    Ok(q[degree])
}

/// `out[ℓ] = Q_ℓ(u)` for `ℓ = 0..=degree`.
fn legendre_all(degree: usize, u: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if degree == 0 {
        return;
    }
    out[1] = u;
    for l in 1..degree {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * u * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// `φ_{j,ℓ}(x)` for `x` in unit coordinates; `j` is 1-based.
pub fn phi_eval(model: DyadicModel, j: usize, l: usize, x: f64) -> Result<f64> {
    if j == 0 || j > model.bins() {
        return invalid(format!("bin index {j} outside 1..={}", model.bins()));
    }
    if l > model.r() {
        return invalid(format!("degree {l} exceeds model degree {}", model.r()));
    }
    let mut vals = [0.0; R_MAX + 1];
    match model.local_basis(x, &mut vals) {
        Some(bin) if bin + 1 == j => Ok(vals[l]),
        _ => Ok(0.0),
    }
}

/// Free function form of [`Window::to_unit`].
pub fn window_to_unit(window: Window, x: f64) -> f64 {
    window.to_unit(x)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Element of `S_m` on a data window: coefficients `t_{j,ℓ}` stored bin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolyFn {
    model: DyadicModel,
    coeffs: Vec<f64>,
    window: Window,
}

impl PiecewisePolyFn {
    pub fn new(model: DyadicModel, coeffs: Vec<f64>, window: Window) -> Result<Self> {
        if coeffs.len() != model.dimension() {
            return invalid(format!(
                "expected {} coefficients, got {}",
                model.dimension(),
                coeffs.len()
            ));
        }
        Ok(Self {
            model,
            coeffs,
            window,
        })
    }

    pub fn zero(model: DyadicModel, window: Window) -> Self {
        Self {
            model,
            coeffs: vec![0.0; model.dimension()],
            window,
        }
    }

    pub fn model(&self) -> DyadicModel {
        self.model
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient `t_{j,ℓ}` with 1-based bin index `j`.
    pub fn coeff(&self, j: usize, l: usize) -> f64 {
        self.coeffs[(j - 1) * (self.model.r() + 1) + l]
    }

    /// Value at `x` in data coordinates; zero outside the window.
    pub fn evaluate(&self, x: f64) -> f64 {
        if !self.window.contains(x) {
            return 0.0;
        }
        let mut vals = [0.0; R_MAX + 1];
        let u = self.window.to_unit(x);
        let Some(j) = self.model.local_basis(u, &mut vals) else {
            return 0.0;
        };
        let k = self.model.r() + 1;
        self.coeffs[j * k..(j + 1) * k]
            .iter()
            .zip(&vals[..k])
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Orthogonal projection onto `S_target` over the same window. When the
    /// target space contains this one the projection is an exact re-expansion.
    pub fn project_onto(&self, target: DyadicModel) -> Self {
        // Integrand degree ≤ 2·R_MAX on each sub-bin of a common refinement.
        let (nodes, weights) = gauss_legendre(R_MAX + 1);
        let pieces = target.bins().max(self.model.bins()) / target.bins();
        let tb = target.bins() as f64;
        let k = target.r() + 1;
        let mut coeffs = vec![0.0; target.dimension()];
        let mut vals = [0.0; R_MAX + 1];
        for j in 0..target.bins() {
            for piece in 0..pieces {
                let a = (j as f64 + piece as f64 / pieces as f64) / tb;
                let half = 0.5 / (tb * pieces as f64);
                for (node, w) in nodes.iter().zip(&weights) {
                    let u = a + half * (node + 1.0);
                    let fx = self.evaluate(self.window.from_unit(u));
                    target.local_basis(u, &mut vals);
                    for l in 0..k {
                        coeffs[j * k + l] += w * half * fx * vals[l];
                    }
                }
            }
        }
        Self {
            model: target,
            coeffs,
            window: self.window,
        }
    }
}
