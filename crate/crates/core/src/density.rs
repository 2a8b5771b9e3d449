//! Shift laws: exact Fourier coefficients `γ_k = E[e^{-2iπkτ}]` and samplers.

use alloc::string::String;
use core::f64::consts::{PI, SQRT_2};

use rand::distr::{Distribution, Open01, Uniform};
use rand::Rng;
use rand_distr::Normal;

use crate::{Complex, Error, Result};

/// Relative slack in [`verify_polynomial_decay`]; declared constants are
/// often attained with equality (e.g. at `k = 1` for the Laplace law).
pub const DECAY_CHECK_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    /// All shifts equal zero, `γ_k = 1`.
    PointMass,
    /// `g(x) = (1/(√2σ)) exp(-√2|x|/σ)`, `γ_k = 1/(1 + 2σ²π²k²)`.
    Laplace { sigma: f64 },
    /// Centred normal, `γ_k = exp(-2π²k²σ²)`. Decays faster than any power.
    Gaussian { sigma: f64 },
    /// Uniform on `[-a, a]`, `γ_k = sin(2πka)/(2πka)`. Has zeros.
    Uniform { half_width: f64 },
}

/// Two-sided polynomial bound `c_min |k|^{-β} <= |γ_k| <= c_max |k|^{-β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBounds {
    pub beta: f64,
    pub c_min: f64,
    pub c_max: f64,
}

/// A shift density with closed-form Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDensity {
    kind: DensityKind,
    decay: Option<DecayBounds>,
    label: String,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            alloc::format!("must be finite and > 0, got {value}"),
        ))
    }
}

impl ShiftDensity {
    pub fn point_mass() -> Self {
        ShiftDensity {
            kind: DensityKind::PointMass,
            decay: Some(DecayBounds {
                beta: 0.0,
                c_min: 1.0,
                c_max: 1.0,
            }),
            label: "point-mass".into(),
        }
    }

    /// Laplace law with standard deviation `sigma`; ill-posedness `β = 2`
    /// with `C_min = 1/(2σ²π² + 1)` and `C_max = 1/(2σ²π²)`.
    pub fn laplace(sigma: f64) -> Result<Self> {
        let sigma = positive("sigma", sigma)?;
        let a = 2.0 * sigma * sigma * PI * PI;
        Ok(ShiftDensity {
            kind: DensityKind::Laplace { sigma },
            decay: Some(DecayBounds {
                beta: 2.0,
                c_min: 1.0 / (a + 1.0),
                c_max: 1.0 / a,
            }),
            label: alloc::format!("laplace(sigma={sigma})"),
        })
    }

    /// Centred Gaussian. No polynomial decay is declared.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let sigma = positive("sigma", sigma)?;
        Ok(ShiftDensity {
            kind: DensityKind::Gaussian { sigma },
            decay: None,
            label: alloc::format!("gaussian(sigma={sigma})"),
        })
    }

    /// Uniform on `[-half_width, half_width]`. No polynomial decay is declared
    /// since `γ_k` vanishes whenever `2ka` is an integer.
    pub fn uniform(half_width: f64) -> Result<Self> {
        let half_width = positive("half_width", half_width)?;
        Ok(ShiftDensity {
            kind: DensityKind::Uniform { half_width },
            decay: None,
            label: alloc::format!("uniform(a={half_width})"),
        })
    }

    /// Replaces the declared decay record.
    pub fn with_decay(mut self, decay: DecayBounds) -> Self {
        self.decay = Some(decay);
        self
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn decay(&self) -> Option<DecayBounds> {
        self.decay
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `γ_k`. All catalog laws are symmetric, so the value is real.
    pub fn gamma(&self, k: i64) -> Complex {
        Complex::new(self.gamma_real(k), 0.0)
    }

    fn gamma_real(&self, k: i64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let kf = k as f64;
        match self.kind {
            DensityKind::PointMass => 1.0,
            DensityKind::Laplace { sigma } => 1.0 / (1.0 + 2.0 * sigma * sigma * PI * PI * kf * kf),
            DensityKind::Gaussian { sigma } => libm::exp(-2.0 * PI * PI * kf * kf * sigma * sigma),
            DensityKind::Uniform { half_width } => {
                let arg = 2.0 * PI * kf * half_width;
                libm::sin(arg) / arg
            }
        }
    }

    /// `|γ_k|²`.
    pub fn gamma_norm_sqr(&self, k: i64) -> f64 {
        let g = self.gamma_real(k);
        g * g
    }

    /// Draws one shift `τ`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DensityKind::PointMass => 0.0,
            DensityKind::Laplace { sigma } => {
                // inverse CDF with scale b = σ/√2
                let b = sigma / SQRT_2;
                let u: f64 = Open01.sample(rng);
                if u < 0.5 {
                    b * libm::log(2.0 * u)
                } else {
                    -b * libm::log(2.0 * (1.0 - u))
                }
            }
            DensityKind::Gaussian { sigma } => Normal::new(0.0, sigma)
                .expect("sigma validated at construction")
                .sample(rng),
            DensityKind::Uniform { half_width } => Uniform::new_inclusive(-half_width, half_width)
                .expect("half_width validated at construction")
                .sample(rng),
        }
    }
}

/// Outcome of [`verify_polynomial_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayCheck {
    Holds,
    /// Smallest `|k|` at which either side of the bound fails.
    Violated {
        k: i64,
    },
    /// The density declares no polynomial decay.
    Undeclared,
}

impl DecayCheck {
    pub fn holds(self) -> bool {
        self == DecayCheck::Holds
    }
}

/// Scans `1 <= |k| <= k_max` against the density's declared decay bounds.
pub fn verify_polynomial_decay(density: &ShiftDensity, k_max: usize) -> DecayCheck {
    let Some(DecayBounds { beta, c_min, c_max }) = density.decay() else {
        return DecayCheck::Undeclared;
    };
    for k in 1..=k_max as i64 {
        let scale = libm::pow(k as f64, -beta);
        let lower = c_min * scale * (1.0 - DECAY_CHECK_RTOL);
        let upper = c_max * scale * (1.0 + DECAY_CHECK_RTOL);
        for kk in [k, -k] {
            let g = density.gamma(kk).norm();
            if g < lower || g > upper {
                return DecayCheck::Violated { k };
            }
        }
    }
    DecayCheck::Holds
}
