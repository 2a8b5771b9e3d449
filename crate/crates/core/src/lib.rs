//! Template estimation from randomly shifted, noisy curves.
//!
//! Each observed curve is `dY_j(x) = f(x - τ_j) dx + ε dW_j(x)` on the unit
//! circle. In the Fourier domain the shifts act as a random convolution whose
//! mean operator is diagonal with eigenvalues `γ_k = E[e^{-2iπkτ}]`, so the
//! template coefficients can be recovered by deconvolving the averaged curve
//! coefficients and keeping a symmetric band `|k| <= N`. The cut-off `N` is
//! chosen from the data by minimising an unbiased (or penalised) estimate of
//! the quadratic risk.
//!
//! The crate is `no_std` (it needs `alloc`). Randomness is always supplied by
//! the caller, and Monte Carlo replications go through [`ReplicationRunner`]
//! so a std front-end can fan them out across threads without changing any
//! result.
//!
//! Sign convention, used everywhere: analysis uses `e^{-2iπkx}` and synthesis
//! uses `e^{+2iπkx}`, so `θ_k = ∫₀¹ f(x) e^{-2iπkx} dx`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod catalog;
pub mod density;
mod error;
pub mod montecarlo;
pub mod risk;
pub mod selection;
pub mod simulate;
pub mod spectral;
pub mod stats;

pub use density::{verify_polynomial_decay, DecayBounds, DecayCheck, DensityKind, ShiftDensity};
pub use error::{Error, Result};
pub use montecarlo::{
    mc_risk, oracle_ratio, rate_study, replicate_rng, run_replicate, Estimator, McRisk, OracleRatio, RateStudy,
    RateStudyPlan, Replicate, ReplicationRunner, Scenario, Sequential,
};
pub use risk::{exact_risk, oracle_cutoff, r_bar, r_tilde, RiskKind, RiskReport, RiskRow, RiskTerms};
pub use selection::{
    compute_m0, criterion, criterion_trace, criterion_u, criterion_u_bar, criterion_u_tilde, estimate, select_cutoff,
    theta_hat_squared, CriterionKind, CutoffSelection, EstimateKind, LogBase, PenaltyForm, SelectionConfig,
    SpectralEstimate, Truncation,
};
pub use simulate::{render_curves, simulate, simulate_aggregates, Design, SequenceObservations};
pub use spectral::{analyze, synthesize, Template};

/// Complex coefficient type used throughout.
pub type Complex = num_complex::Complex64;
