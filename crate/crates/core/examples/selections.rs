//! Runs the four reference setups (n = 5000, Δ = 1/20) and prints the
//! selected models of every replication.
//!
//! `cargo run --release -p diffsel-core --example selections [replications]`

use diffsel_core::harness::grid;
use diffsel_core::{run_experiment, DiffusionFamily, ExperimentConfig, FamilyTag, Target};

fn main() {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let setups = [
        (
            "family1 xi",
            FamilyTag::Family1,
            6.0,
            2.0,
            Target::XiProcess,
        ),
        ("family1 x", FamilyTag::Family1, 6.0, 2.0, Target::XProcess),
        ("family2 x", FamilyTag::Family2, 3.0, 2.0, Target::XProcess),
        (
            "two bumps x",
            FamilyTag::Family2TwoBumps,
            1.0,
            10.0,
            Target::XProcess,
        ),
    ];
    for (name, tag, theta, c, target) in setups {
        let family = DiffusionFamily::new(tag, theta, c).expect("admissible parameters");
        let config = ExperimentConfig::new(family, 5000, 0.05, reps, 2007, target);
        let report = run_experiment(&config).expect("valid config");
        println!("== {name}");
        for rec in report.successes() {
            let vol: Vec<f64> = grid(rec.window, 200)
                .iter()
                .map(|&x| rec.vol_estimate.evaluate(x))
                .collect();
            let vol_range = (
                vol.iter().copied().fold(f64::INFINITY, f64::min),
                vol.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            );
            println!(
                "rep {:2}: drift ({},{}) err {:.3e} | vol ({},{}) err {:.3e} | vol range [{:.3}, {:.3}]",
                rec.replication,
                rec.drift_model.p(),
                rec.drift_model.r(),
                rec.drift_err,
                rec.vol_model.p(),
                rec.vol_model.r(),
                rec.vol_err,
                vol_range.0,
                vol_range.1
            );
        }
        println!("aggregates: {:?}", report.aggregates);
    }
}
