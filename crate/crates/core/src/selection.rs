//! Spectral cut-off estimators and data-driven choice of the cut-off.
//!
//! All three criteria are sums over the symmetric band `|k| <= N` of a
//! per-frequency increment built from `Θ̂²_k = |γ_k|^{-2}(|c̃_k|² - ε²/n)`:
//!
//! * `U`: `-(1 - 1/n) Θ̂²_k + (ε²/n)|γ_k|^{-2} + (1/n)|γ_k|^{-2} Θ̂²_k`, an
//!   unbiased estimate of `R(θ, N) - ‖θ‖²`.
//! * `Ū`: `-Θ̂²_k + (ε²/n)|γ_k|^{-2} + pen_k` with a `log²(n)/n` penalty.
//! * `Ũ`: `-Θ̂²_k + (ε²/n)|γ_k|^{-2}`, the classical inverse-problem URE.
//!
//! `Θ̂²_k` is never clipped at zero; clipping would bias the risk estimate.
//! [`negative_theta_hat_count`] reports how often it would have mattered.

use alloc::vec::Vec;

use crate::spectral::{frequencies, slot};
use crate::{Complex, Error, Result, SequenceObservations, ShiftDensity, Template};

/// `|γ_k|` at or below this is treated as a vanishing eigenvalue.
pub const VANISHING_GAMMA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Decimal,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => libm::log(x),
            LogBase::Decimal => libm::log10(x),
        }
    }
}

/// Form of the per-frequency penalty in `Ū`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyForm {
    /// `L · |γ_k|^{-4} (|c̃_k|² - ε²/n)`, i.e. `L |γ_k|^{-2} Θ̂²_k`, which
    /// estimates the `log²(n)/n Σ |γ_k|^{-2}|θ_k|²` term of `R̄`.
    #[default]
    Proof,
    /// `L · |γ_k|^{-2} (|c̃_k| - ε²/n)`, with an unsquared modulus.
    Printed,
}

/// Knobs shared by the truncation level, the penalty and `R̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub log_base: LogBase,
    /// Multiplies `log²(n)/n` in the truncation threshold.
    pub threshold_multiplier: f64,
    /// Multiplies `log²(n)/n` in the `Ū` penalty and in `R̄`.
    pub penalty_multiplier: f64,
    pub penalty_form: PenaltyForm,
    /// Replaces the computed truncation level when set.
    pub m0_override: Option<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            log_base: LogBase::Natural,
            threshold_multiplier: 1.0,
            penalty_multiplier: 1.0,
            penalty_form: PenaltyForm::Proof,
            m0_override: None,
        }
    }
}

impl SelectionConfig {
    fn log_sq_over_n(&self, n: usize) -> f64 {
        let l = self.log_base.log(n as f64);
        l * l / n as f64
    }

    /// `threshold_multiplier · log²(n)/n`.
    pub fn threshold(&self, n: usize) -> f64 {
        self.threshold_multiplier * self.log_sq_over_n(n)
    }

    /// `penalty_multiplier · log²(n)/n`.
    pub fn penalty_weight(&self, n: usize) -> f64 {
        self.penalty_multiplier * self.log_sq_over_n(n)
    }
}

/// Largest admissible cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub m0: usize,
    /// No `k <= K` crossed the threshold, so `m0 = K`.
    pub saturated: bool,
    /// `m0` came from [`SelectionConfig::m0_override`].
    pub overridden: bool,
}

/// `m0 = inf{k >= 1 : |γ_k|² <= log²(n)/n} - 1`, capped at `K`.
pub fn compute_m0(density: &ShiftDensity, n: usize, max_freq: usize, cfg: &SelectionConfig) -> Result<Truncation> {
    if n < 2 {
        return Err(Error::invalid("n", "truncation level needs n >= 2"));
    }
    if max_freq == 0 {
        return Err(Error::invalid("max_freq", "must be at least 1"));
    }
    let threshold = cfg.threshold(n);
    let crossing = (1..=max_freq as i64).find(|&k| density.gamma_norm_sqr(k) <= threshold);
    Ok(match crossing {
        Some(k) => Truncation {
            m0: k as usize - 1,
            saturated: false,
            overridden: false,
        },
        None => Truncation {
            m0: max_freq,
            saturated: true,
            overridden: false,
        },
    })
}

/// Truncation level used for selection: the override if any, otherwise
/// [`compute_m0`].
pub fn resolve_m0(density: &ShiftDensity, n: usize, max_freq: usize, cfg: &SelectionConfig) -> Result<Truncation> {
    match cfg.m0_override {
        Some(m0) if m0 > max_freq => Err(Error::invalid(
            "m0_override",
            alloc::format!("{m0} exceeds the band K = {max_freq}"),
        )),
        Some(m0) => Ok(Truncation {
            m0,
            saturated: false,
            overridden: true,
        }),
        None => compute_m0(density, n, max_freq, cfg),
    }
}

pub(crate) fn inv_gamma_sq(density: &ShiftDensity, k: i64) -> Result<f64> {
    let g2 = density.gamma_norm_sqr(k);
    if g2 <= VANISHING_GAMMA * VANISHING_GAMMA {
        return Err(Error::VanishingEigenvalue { k });
    }
    Ok(1.0 / g2)
}

/// `Θ̂²_k = |γ_k|^{-2} (|c̃_k|² - ε²/n)`; may be negative.
pub fn theta_hat_squared(obs: &SequenceObservations, density: &ShiftDensity, k: i64) -> Result<f64> {
    check_band(obs, k.unsigned_abs() as usize)?;
    let w = inv_gamma_sq(density, k)?;
    Ok(w * (obs.c_tilde_at(k).norm_sqr() - obs.design().noise_var()))
}

/// Number of `|k| <= upto` where `Θ̂²_k < 0`.
pub fn negative_theta_hat_count(obs: &SequenceObservations, density: &ShiftDensity, upto: usize) -> Result<usize> {
    check_band(obs, upto)?;
    let mut count = 0;
    for k in -(upto as i64)..=upto as i64 {
        if theta_hat_squared(obs, density, k)? < 0.0 {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    U,
    UBar,
    UTilde,
}

fn check_band(obs: &SequenceObservations, cutoff: usize) -> Result<()> {
    if cutoff > obs.max_freq() {
        return Err(Error::invalid(
            "cutoff",
            alloc::format!("{cutoff} exceeds the band K = {}", obs.max_freq()),
        ));
    }
    Ok(())
}

/// Contribution of frequency `k` to the criterion.
fn increment(
    kind: CriterionKind,
    obs: &SequenceObservations,
    density: &ShiftDensity,
    k: i64,
    cfg: &SelectionConfig,
) -> Result<f64> {
    let n = obs.curves();
    let nf = n as f64;
    let noise_var = obs.design().noise_var();
    let w = inv_gamma_sq(density, k)?;
    let c = obs.c_tilde_at(k);
    let centred = c.norm_sqr() - noise_var;
    let theta_sq = w * centred;
    let variance = noise_var * w;
    Ok(match kind {
        CriterionKind::U => -(1.0 - 1.0 / nf) * theta_sq + variance + w * theta_sq / nf,
        CriterionKind::UTilde => -theta_sq + variance,
        CriterionKind::UBar => {
            let pen = match cfg.penalty_form {
                PenaltyForm::Proof => w * theta_sq,
                PenaltyForm::Printed => w * (c.norm() - noise_var),
            };
            -theta_sq + variance + cfg.penalty_weight(n) * pen
        }
    })
}

/// Criterion values for `N = 0..=upto`. Entry `N` is entry `N - 1` plus the
/// increments at `k = N` and `k = -N`.
pub fn criterion_trace(
    kind: CriterionKind,
    obs: &SequenceObservations,
    density: &ShiftDensity,
    upto: usize,
    cfg: &SelectionConfig,
) -> Result<Vec<f64>> {
    check_band(obs, upto)?;
    let mut values = Vec::with_capacity(upto + 1);
    let mut acc = increment(kind, obs, density, 0, cfg)?;
    values.push(acc);
    for m in 1..=upto as i64 {
        acc += increment(kind, obs, density, m, cfg)? + increment(kind, obs, density, -m, cfg)?;
        values.push(acc);
    }
    Ok(values)
}

/// Value of a criterion at cut-off `N`. Bit-identical to entry `N` of
/// [`criterion_trace`].
pub fn criterion(
    kind: CriterionKind,
    obs: &SequenceObservations,
    density: &ShiftDensity,
    cutoff: usize,
    cfg: &SelectionConfig,
) -> Result<f64> {
    Ok(*criterion_trace(kind, obs, density, cutoff, cfg)?
        .last()
        .expect("trace has cutoff + 1 entries"))
}

/// `U(Y, N)`.
pub fn criterion_u(obs: &SequenceObservations, density: &ShiftDensity, cutoff: usize) -> Result<f64> {
    criterion(CriterionKind::U, obs, density, cutoff, &SelectionConfig::default())
}

/// `Ū(Y, N)`; log base, penalty weight and penalty form come from `cfg`.
pub fn criterion_u_bar(
    obs: &SequenceObservations,
    density: &ShiftDensity,
    cutoff: usize,
    cfg: &SelectionConfig,
) -> Result<f64> {
    criterion(CriterionKind::UBar, obs, density, cutoff, cfg)
}

/// `Ũ(Y, N)`.
pub fn criterion_u_tilde(obs: &SequenceObservations, density: &ShiftDensity, cutoff: usize) -> Result<f64> {
    criterion(CriterionKind::UTilde, obs, density, cutoff, &SelectionConfig::default())
}

/// Index of the smallest value; ties go to the smallest index. NaNs are never
/// selected unless every entry is NaN.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] || values[best].is_nan() && !v.is_nan() {
            best = i;
        }
    }
    best
}

/// Result of minimising a criterion over `N = 0..=m0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSelection {
    chosen: usize,
    truncation: Truncation,
    values: Vec<f64>,
    kind: CriterionKind,
}

impl CutoffSelection {
    pub fn chosen_n(&self) -> usize {
        self.chosen
    }

    pub fn m0(&self) -> usize {
        self.truncation.m0
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Criterion values indexed by `N`.
    pub fn criterion_values(&self) -> &[f64] {
        &self.values
    }

    pub fn criterion_kind(&self) -> CriterionKind {
        self.kind
    }
}

/// Evaluates the criterion for every `N <= m0` and keeps the first minimiser.
pub fn select_cutoff(
    obs: &SequenceObservations,
    density: &ShiftDensity,
    kind: CriterionKind,
    cfg: &SelectionConfig,
) -> Result<CutoffSelection> {
    let truncation = resolve_m0(density, obs.curves(), obs.max_freq(), cfg)?;
    let values = criterion_trace(kind, obs, density, truncation.m0, cfg)?;
    Ok(CutoffSelection {
        chosen: argmin(&values),
        truncation,
        values,
        kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateKind {
    /// Cut-off chosen by `Ū`.
    ThetaStar,
    /// Cut-off chosen by `Ũ`.
    ThetaTilde,
    /// Cut-off chosen by the unpenalised `U`.
    ThetaU,
    FixedN,
}

impl EstimateKind {
    pub fn criterion(self) -> Option<CriterionKind> {
        match self {
            EstimateKind::ThetaStar => Some(CriterionKind::UBar),
            EstimateKind::ThetaTilde => Some(CriterionKind::UTilde),
            EstimateKind::ThetaU => Some(CriterionKind::U),
            EstimateKind::FixedN => None,
        }
    }
}

/// Projection estimate `θ̂_k = c̃_k/γ_k` on `|k| <= cutoff`, zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    coeffs: Vec<Complex>,
    max_freq: usize,
    cutoff: usize,
    kind: EstimateKind,
}

impl SpectralEstimate {
    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex {
        if k.unsigned_abs() as usize > self.max_freq {
            Complex::new(0.0, 0.0)
        } else {
            self.coeffs[slot(k, self.max_freq)]
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn kind(&self) -> EstimateKind {
        self.kind
    }

    /// `‖θ̂ - θ‖²` over the band of `truth`.
    pub fn sq_error(&self, truth: &Template) -> Result<f64> {
        if truth.max_freq() != self.max_freq {
            return Err(Error::FrequencyMismatch {
                expected: self.max_freq,
                found: truth.max_freq(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(truth.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }

    /// The estimate as a template, real-valued when its coefficients are
    /// exactly Hermitian.
    pub fn to_template(&self) -> Result<Template> {
        let t =
            Template::real_from_coeffs(self.coeffs.clone()).or_else(|_| Template::from_coeffs(self.coeffs.clone()))?;
        Ok(t.with_label("estimate"))
    }
}

pub fn estimate(
    obs: &SequenceObservations,
    density: &ShiftDensity,
    cutoff: usize,
    kind: EstimateKind,
) -> Result<SpectralEstimate> {
    check_band(obs, cutoff)?;
    let max_freq = obs.max_freq();
    let mut coeffs = alloc::vec![Complex::new(0.0, 0.0); 2 * max_freq + 1];
    for k in frequencies(cutoff) {
        inv_gamma_sq(density, k)?;
        coeffs[slot(k, max_freq)] = obs.c_tilde_at(k) / density.gamma(k);
    }
    Ok(SpectralEstimate {
        coeffs,
        max_freq,
        cutoff,
        kind,
    })
}
