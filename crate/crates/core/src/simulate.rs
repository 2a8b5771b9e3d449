//! Exact sequence-space simulation of shifted noisy curves.
//!
//! Curve `j` is represented by its Fourier coefficients
//! `c_{j,k} = θ_k e^{-2iπkτ_j} + ε z_{k,j}`. The noise is the spectrum of a
//! real white noise: `z_{0,j} ~ N(0, 1)`, and for `k >= 1` the real and
//! imaginary parts of `z_{k,j}` are independent `N(0, 1/2)` with
//! `z_{-k,j} = conj(z_{k,j})`. So `E|z_{k,j}|² = 1` at every frequency.
//!
//! Draw order per curve is fixed: `τ_j`, then `z_{0,j}`, then
//! `(Re z_{k,j}, Im z_{k,j})` for `k = 1..=K`. The noise is drawn even when
//! `ε = 0` so that datasets differing only in `ε` share their shifts.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{frequencies, slot, synthesize};
use crate::{Complex, Error, Result, ShiftDensity, Template};

/// Sampling design: number of curves, noise level and frequency band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    curves: usize,
    noise: f64,
    max_freq: usize,
}

impl Design {
    pub fn new(curves: usize, noise: f64, max_freq: usize) -> Result<Self> {
        if curves == 0 {
            return Err(Error::invalid("n", "at least one curve is required"));
        }
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(Error::invalid(
                "epsilon",
                alloc::format!("must be finite and >= 0, got {noise}"),
            ));
        }
        if max_freq == 0 {
            return Err(Error::invalid("max_freq", "must be at least 1"));
        }
        Ok(Design {
            curves,
            noise,
            max_freq,
        })
    }

    /// Number of curves `n`.
    pub fn curves(&self) -> usize {
        self.curves
    }

    /// Noise level `ε`.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    /// `ε² / n`, the variance of the averaged noise at each frequency.
    pub fn noise_var(&self) -> f64 {
        self.noise * self.noise / self.curves as f64
    }

    pub(crate) fn check_template(&self, template: &Template) -> Result<()> {
        if template.max_freq() != self.max_freq {
            return Err(Error::FrequencyMismatch {
                expected: self.max_freq,
                found: template.max_freq(),
            });
        }
        Ok(())
    }
}

/// One simulated dataset in sequence space.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceObservations {
    /// Row-major `n × (2K+1)`, absent for aggregate-only simulations.
    per_curve: Option<Vec<Complex>>,
    c_tilde: Vec<Complex>,
    gamma_tilde: Vec<Complex>,
    design: Design,
    /// True shifts, kept for diagnostics. No estimator reads them.
    shifts: Option<Vec<f64>>,
}

impl SequenceObservations {
    /// Builds observations from aggregates alone, e.g. for testing criteria on
    /// hand-made inputs. Enforces `γ̃_0 = 1`, `|γ̃_k| <= 1` and the conjugate
    /// symmetry of `γ̃`.
    pub fn from_aggregates(c_tilde: Vec<Complex>, gamma_tilde: Vec<Complex>, design: Design) -> Result<Self> {
        let width = 2 * design.max_freq + 1;
        if c_tilde.len() != width || gamma_tilde.len() != width {
            return Err(Error::invalid(
                "aggregates",
                alloc::format!("expected {width} coefficients"),
            ));
        }
        let k_max = design.max_freq;
        if gamma_tilde[slot(0, k_max)] != Complex::new(1.0, 0.0) {
            return Err(Error::invalid("gamma_tilde", "gamma_tilde_0 must equal 1"));
        }
        for k in 1..=k_max as i64 {
            let g = gamma_tilde[slot(k, k_max)];
            if g.norm() > 1.0 || gamma_tilde[slot(-k, k_max)] != g.conj() {
                return Err(Error::invalid(
                    "gamma_tilde",
                    alloc::format!("invalid value at k = {k}"),
                ));
            }
        }
        Ok(SequenceObservations {
            per_curve: None,
            c_tilde,
            gamma_tilde,
            design,
            shifts: None,
        })
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn curves(&self) -> usize {
        self.design.curves
    }

    pub fn noise(&self) -> f64 {
        self.design.noise
    }

    pub fn max_freq(&self) -> usize {
        self.design.max_freq
    }

    pub fn c_tilde(&self) -> &[Complex] {
        &self.c_tilde
    }

    pub fn gamma_tilde(&self) -> &[Complex] {
        &self.gamma_tilde
    }

    /// `c̃_k`.
    pub fn c_tilde_at(&self, k: i64) -> Complex {
        self.c_tilde[slot(k, self.design.max_freq)]
    }

    /// `γ̃_k`.
    pub fn gamma_tilde_at(&self, k: i64) -> Complex {
        self.gamma_tilde[slot(k, self.design.max_freq)]
    }

    pub fn shifts(&self) -> Option<&[f64]> {
        self.shifts.as_deref()
    }

    pub fn has_curves(&self) -> bool {
        self.per_curve.is_some()
    }

    /// Coefficients `c_{j,k}`, `k = -K..=K`, of curve `j`.
    pub fn curve(&self, j: usize) -> Option<&[Complex]> {
        let width = 2 * self.design.max_freq + 1;
        self.per_curve.as_ref().and_then(|m| m.get(j * width..(j + 1) * width))
    }
}

/// Draws a dataset and keeps every per-curve coefficient and the true shifts.
pub fn simulate<R: Rng + ?Sized>(
    template: &Template,
    density: &ShiftDensity,
    design: &Design,
    rng: &mut R,
) -> Result<SequenceObservations> {
    draw(template, density, design, rng, true)
}

/// Same draws as [`simulate`] (so the same aggregates for the same RNG
/// state), without retaining the `n × (2K+1)` coefficient matrix or shifts.
pub fn simulate_aggregates<R: Rng + ?Sized>(
    template: &Template,
    density: &ShiftDensity,
    design: &Design,
    rng: &mut R,
) -> Result<SequenceObservations> {
    draw(template, density, design, rng, false)
}

fn draw<R: Rng + ?Sized>(
    template: &Template,
    density: &ShiftDensity,
    design: &Design,
    rng: &mut R,
    retain: bool,
) -> Result<SequenceObservations> {
    design.check_template(template)?;
    let k_max = design.max_freq;
    let width = 2 * k_max + 1;
    let n = design.curves;
    let eps = design.noise;

    let mut per_curve = if retain {
        Some(Vec::with_capacity(n * width))
    } else {
        None
    };
    let mut shifts = if retain { Some(Vec::with_capacity(n)) } else { None };
    let mut c_sum = vec![Complex::new(0.0, 0.0); width];
    let mut g_sum = vec![Complex::new(0.0, 0.0); k_max + 1];
    let mut row = vec![Complex::new(0.0, 0.0); width];

    for _ in 0..n {
        let tau = density.sample(rng);
        let step = Complex::cis(-2.0 * PI * tau);
        let mut phase = Complex::new(1.0, 0.0);
        for k in 0..=k_max as i64 {
            let z = if k == 0 {
                let z0: f64 = StandardNormal.sample(rng);
                Complex::new(z0, 0.0)
            } else {
                phase *= step;
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(re, im) * FRAC_1_SQRT_2
            };
            let pos = template.coeff(k) * phase + z * eps;
            let neg = template.coeff(-k) * phase.conj() + z.conj() * eps;
            row[slot(k, k_max)] = pos;
            row[slot(-k, k_max)] = neg;
            g_sum[k as usize] += phase;
        }
        for (acc, c) in c_sum.iter_mut().zip(&row) {
            *acc += c;
        }
        if let Some(m) = per_curve.as_mut() {
            m.extend_from_slice(&row);
        }
        if let Some(s) = shifts.as_mut() {
            s.push(tau);
        }
    }

    let inv_n = 1.0 / n as f64;
    let c_tilde = c_sum.into_iter().map(|c| c * inv_n).collect();
    let mut gamma_tilde = vec![Complex::new(0.0, 0.0); width];
    gamma_tilde[slot(0, k_max)] = Complex::new(1.0, 0.0);
    for k in 1..=k_max {
        let mut g = g_sum[k] * inv_n;
        // rounding in the phase recurrence can overshoot the unit disc by an ulp
        let r = g.norm();
        if r > 1.0 {
            g /= r;
        }
        gamma_tilde[slot(k as i64, k_max)] = g;
        gamma_tilde[slot(-(k as i64), k_max)] = g.conj();
    }

    Ok(SequenceObservations {
        per_curve,
        c_tilde,
        gamma_tilde,
        design: *design,
        shifts,
    })
}

/// Synthesizes every curve on a uniform grid (one row per curve), after
/// symmetrizing its coefficients to `(c_k + conj(c_{-k}))/2`.
pub fn render_curves(obs: &SequenceObservations, grid: usize) -> Result<Vec<Vec<f64>>> {
    let k_max = obs.max_freq();
    let mut rows = Vec::with_capacity(obs.curves());
    for j in 0..obs.curves() {
        let coeffs = obs.curve(j).ok_or(Error::MissingCurves)?;
        let sym: Vec<Complex> = frequencies(k_max)
            .map(|k| {
                if k == 0 {
                    Complex::new(coeffs[slot(0, k_max)].re, 0.0)
                } else if k > 0 {
                    (coeffs[slot(k, k_max)] + coeffs[slot(-k, k_max)].conj()) * 0.5
                } else {
                    (coeffs[slot(-k, k_max)] + coeffs[slot(k, k_max)].conj()).conj() * 0.5
                }
            })
            .collect();
        let curve = Template::real_from_coeffs(sym)?;
        rows.push(synthesize(&curve, grid)?);
    }
    Ok(rows)
}
