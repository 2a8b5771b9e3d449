//! Exact quadratic risks of projection estimators when `θ` is known.
//!
//! For the band `|k| <= N`:
//!
//! ```text
//! bias = Σ_{|k|>N} |θ_k|²
//! V1   = (ε²/n) Σ_{|k|≤N} |γ_k|^{-2}
//! V2   = (1/n)  Σ_{|k|≤N} |θ_k|² (|γ_k|^{-2} - 1)
//! R    = bias + V1 + V2
//! R̄    = bias + V1 + L Σ_{|k|≤N} |γ_k|^{-2} |θ_k|²,   L = log²(n)/n
//! R̃    = bias + V1
//! ```

use alloc::vec::Vec;

use crate::selection::{argmin, inv_gamma_sq, resolve_m0};
use crate::{Design, Error, Result, SelectionConfig, ShiftDensity, Template};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskTerms {
    pub bias: f64,
    pub v1: f64,
    pub v2: f64,
    pub total: f64,
}

/// Partial sums needed by all three risks at one cut-off.
#[derive(Debug, Clone, Copy)]
struct BandSums {
    bias: f64,
    inv_gamma: f64,
    v2_core: f64,
    weighted_energy: f64,
}

fn band_sums(template: &Template, density: &ShiftDensity, design: &Design, cutoff: usize) -> Result<BandSums> {
    design.check_template(template)?;
    if cutoff > design.max_freq() {
        return Err(Error::invalid("cutoff", "exceeds the band K"));
    }
    let k_max = design.max_freq() as i64;
    let cut = cutoff as i64;
    let mut sums = BandSums {
        bias: 0.0,
        inv_gamma: 0.0,
        v2_core: 0.0,
        weighted_energy: 0.0,
    };
    for k in -k_max..=k_max {
        let energy = template.coeff(k).norm_sqr();
        if k.abs() > cut {
            sums.bias += energy;
        } else {
            let w = inv_gamma_sq(density, k)?;
            sums.inv_gamma += w;
            sums.v2_core += energy * (w - 1.0);
            sums.weighted_energy += energy * w;
        }
    }
    Ok(sums)
}

/// Bias/variance decomposition of `E‖θ̂ - θ‖²` for the cut-off `N`.
pub fn exact_risk(template: &Template, density: &ShiftDensity, design: &Design, cutoff: usize) -> Result<RiskTerms> {
    let s = band_sums(template, density, design, cutoff)?;
    let n = design.curves() as f64;
    let v1 = design.noise_var() * s.inv_gamma;
    let v2 = s.v2_core / n;
    Ok(RiskTerms {
        bias: s.bias,
        v1,
        v2,
        total: s.bias + v1 + v2,
    })
}

/// `R̄(θ, N)`; the log factor follows `cfg`.
pub fn r_bar(
    template: &Template,
    density: &ShiftDensity,
    design: &Design,
    cutoff: usize,
    cfg: &SelectionConfig,
) -> Result<f64> {
    let s = band_sums(template, density, design, cutoff)?;
    Ok(s.bias + design.noise_var() * s.inv_gamma + cfg.penalty_weight(design.curves()) * s.weighted_energy)
}

/// `R̃(θ, N)`.
pub fn r_tilde(template: &Template, density: &ShiftDensity, design: &Design, cutoff: usize) -> Result<f64> {
    let s = band_sums(template, density, design, cutoff)?;
    Ok(s.bias + design.noise_var() * s.inv_gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiskKind {
    R,
    RBar,
    RTilde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskRow {
    pub cutoff: usize,
    pub bias: f64,
    pub v1: f64,
    pub v2: f64,
    pub r: f64,
    pub r_bar: f64,
    pub r_tilde: f64,
}

impl RiskRow {
    pub fn get(&self, kind: RiskKind) -> f64 {
        match kind {
            RiskKind::R => self.r,
            RiskKind::RBar => self.r_bar,
            RiskKind::RTilde => self.r_tilde,
        }
    }
}

/// Risk curves over `N = 0..=m0` and their minimisers.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub rows: Vec<RiskRow>,
    pub oracle_r: usize,
    pub oracle_r_bar: usize,
    pub oracle_r_tilde: usize,
}

impl RiskReport {
    pub fn compute(
        template: &Template,
        density: &ShiftDensity,
        design: &Design,
        m0: usize,
        cfg: &SelectionConfig,
    ) -> Result<Self> {
        let rows = (0..=m0)
            .map(|cutoff| {
                let terms = exact_risk(template, density, design, cutoff)?;
                Ok(RiskRow {
                    cutoff,
                    bias: terms.bias,
                    v1: terms.v1,
                    v2: terms.v2,
                    r: terms.total,
                    r_bar: r_bar(template, density, design, cutoff, cfg)?,
                    r_tilde: r_tilde(template, density, design, cutoff)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pick = |kind| argmin(&rows.iter().map(|r: &RiskRow| r.get(kind)).collect::<Vec<_>>());
        Ok(RiskReport {
            oracle_r: pick(RiskKind::R),
            oracle_r_bar: pick(RiskKind::RBar),
            oracle_r_tilde: pick(RiskKind::RTilde),
            rows,
        })
    }

    /// Smallest value of a risk over the report's range.
    pub fn min(&self, kind: RiskKind) -> f64 {
        self.rows.iter().map(|r| r.get(kind)).fold(f64::INFINITY, f64::min)
    }

    pub fn oracle(&self, kind: RiskKind) -> usize {
        match kind {
            RiskKind::R => self.oracle_r,
            RiskKind::RBar => self.oracle_r_bar,
            RiskKind::RTilde => self.oracle_r_tilde,
        }
    }
}

/// Exhaustive argmin of a risk over `N = 0..=m0`, smallest `N` on ties.
pub fn oracle_cutoff(
    template: &Template,
    density: &ShiftDensity,
    design: &Design,
    kind: RiskKind,
    m0: usize,
    cfg: &SelectionConfig,
) -> Result<usize> {
    Ok(RiskReport::compute(template, density, design, m0, cfg)?.oracle(kind))
}

/// Truncation level for a scenario, honouring `cfg.m0_override`.
pub fn scenario_m0(density: &ShiftDensity, design: &Design, cfg: &SelectionConfig) -> Result<usize> {
    Ok(resolve_m0(density, design.curves(), design.max_freq(), cfg)?.m0)
}
