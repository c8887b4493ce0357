//! Nonparametric estimation of the drift and squared diffusion coefficient of
//! a stationary one-dimensional diffusion observed at discrete times.
//!
//! Estimators are least-squares fits over dyadic piecewise Legendre spaces,
//! with the space chosen by a penalized contrast. The [`simulate`] module
//! produces exact discrete samples (EA1 retrospective rejection) for a few
//! diffusion families, which [`harness`] uses to check the estimators
//! against known coefficients.

pub mod basis;
pub mod error;
pub mod harness;
pub mod regression;
pub mod selection;
pub mod simulate;

pub use basis::{DyadicModel, PiecewisePolyFn, Window, R_MAX};
pub use error::{Error, Result};
pub use harness::{
    estimate_both, risk_curve, run_experiment, Estimates, ExperimentConfig, ExperimentReport,
    ReplicationRecord, RiskCurve, Target,
};
pub use regression::{FitOutcome, RegressionData, ResponseKind, SamplePath};
pub use selection::{PenaltySpec, SelectionResult, TraceEntry};
pub use simulate::{simulate_path, DiffusionFamily, Ea1Bounds, FamilyTag, RngStream};
