//! Test-side oracles, independent of the library's implementation paths.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

/// One-sample Kolmogorov–Smirnov distance against `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn normal_cdf(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
    let n = Normal::new(mean, sd).unwrap();
    move |x| n.cdf(x)
}

/// CDF of an unnormalized density on `[lo, hi]` by cumulative trapezoid on
/// `points` nodes, linearly interpolated; 0 / 1 outside.
pub struct QuadratureCdf {
    lo: f64,
    step: f64,
    cum: Vec<f64>,
}

impl QuadratureCdf {
    pub fn new(density: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Self {
        let step = (hi - lo) / (points - 1) as f64;
        let vals: Vec<f64> = (0..points).map(|i| density(lo + i as f64 * step)).collect();
        let mut cum = vec![0.0; points];
        for i in 1..points {
            cum[i] = cum[i - 1] + 0.5 * step * (vals[i - 1] + vals[i]);
        }
        let total = cum[points - 1];
        cum.iter_mut().for_each(|c| *c /= total);
        Self { lo, step, cum }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let h = (x - self.lo) / self.step;
        if h <= 0.0 {
            return 0.0;
        }
        let i = h.floor() as usize;
        if i + 1 >= self.cum.len() {
            return 1.0;
        }
        let frac = h - i as f64;
        self.cum[i] + frac * (self.cum[i + 1] - self.cum[i])
    }
}

/// Euler–Maruyama for `dξ = α(ξ) dt + dW` over `[0, delta]` in `steps` steps.
pub fn euler_unit_diffusion<R: Rng>(
    alpha: impl Fn(f64) -> f64,
    x0: f64,
    delta: f64,
    steps: usize,
    rng: &mut R,
) -> f64 {
    let h = delta / steps as f64;
    let sd = h.sqrt();
    let mut x = x0;
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(rng);
        x += alpha(x) * h + sd * z;
    }
    x
}

/// Composite Gauss–Legendre rule on `[0, 1]` with `panels` equal panels of
/// `order` nodes each; nodes computed by Newton on the Legendre recurrence.
pub fn composite_gauss(panels: usize, order: usize) -> Vec<(f64, f64)> {
    let mut base = Vec::new();
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..order {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        base.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = p as f64 * h;
        for &(x, w) in &base {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Criterion report line; returns `passed` for chaining into an assert.
pub fn report(id: u32, name: &str, passed: bool, detail: &str) -> bool {
    println!(
        "[{}] criterion {id}: {name} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}
