//! Fourier coefficient arrays over a symmetric frequency band and the
//! discrete synthesis/analysis pair on a uniform grid of `[0, 1)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Complex, Error, Result};

/// Max-norm bound on the imaginary part of a real-valued synthesis.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Array position of frequency `k` in a `-K..=K` coefficient vector.
#[inline]
pub fn slot(k: i64, max_freq: usize) -> usize {
    debug_assert!(k.unsigned_abs() as usize <= max_freq);
    (k + max_freq as i64) as usize
}

/// Iterator over `-K..=K`.
#[inline]
pub fn frequencies(max_freq: usize) -> impl Iterator<Item = i64> + Clone {
    let k = max_freq as i64;
    -k..=k
}

/// First `k >= 0` where `coeffs[-k] != conj(coeffs[k])`, compared exactly.
pub fn hermitian_violation(coeffs: &[Complex], max_freq: usize) -> Option<i64> {
    (0..=max_freq as i64).find(|&k| coeffs[slot(-k, max_freq)] != coeffs[slot(k, max_freq)].conj())
}

/// Fourier coefficients `θ_k`, `k = -K..=K`, of a 1-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    coeffs: Vec<Complex>,
    max_freq: usize,
    real_valued: bool,
    label: Option<String>,
}

impl Template {
    /// Wraps a generic complex coefficient array of odd length `2K + 1`, `K >= 1`.
    pub fn from_coeffs(coeffs: Vec<Complex>) -> Result<Self> {
        let max_freq = band_of(coeffs.len())?;
        Ok(Template {
            coeffs,
            max_freq,
            real_valued: false,
            label: None,
        })
    }

    /// Like [`Template::from_coeffs`], but flags the template as the spectrum
    /// of a real function. The Hermitian symmetry must hold exactly.
    pub fn real_from_coeffs(coeffs: Vec<Complex>) -> Result<Self> {
        let max_freq = band_of(coeffs.len())?;
        if let Some(k) = hermitian_violation(&coeffs, max_freq) {
            return Err(Error::NotHermitian { k });
        }
        Ok(Template {
            coeffs,
            max_freq,
            real_valued: true,
            label: None,
        })
    }

    /// Real-valued template from `θ_0` and `θ_1..θ_K`; negative frequencies
    /// are filled in by conjugation.
    pub fn from_nonnegative(dc: f64, positive: &[Complex]) -> Result<Self> {
        let max_freq = positive.len();
        if max_freq == 0 {
            return Err(Error::invalid("max_freq", "must be at least 1"));
        }
        let mut coeffs = vec![Complex::new(0.0, 0.0); 2 * max_freq + 1];
        coeffs[max_freq] = Complex::new(dc, 0.0);
        for (i, &c) in positive.iter().enumerate() {
            let k = i as i64 + 1;
            coeffs[slot(k, max_freq)] = c;
            coeffs[slot(-k, max_freq)] = c.conj();
        }
        Ok(Template {
            coeffs,
            max_freq,
            real_valued: true,
            label: None,
        })
    }

    /// The zero function.
    pub fn zeros(max_freq: usize) -> Result<Self> {
        Self::from_nonnegative(0.0, &vec![Complex::new(0.0, 0.0); max_freq])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// `θ_k`, zero outside the stored band.
    pub fn coeff(&self, k: i64) -> Complex {
        if k.unsigned_abs() as usize > self.max_freq {
            Complex::new(0.0, 0.0)
        } else {
            self.coeffs[slot(k, self.max_freq)]
        }
    }

    /// `‖θ‖² = Σ |θ_k|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ (1 + |k|^{2s}) |θ_k|²`, the quantity bounded by `A` in a periodic
    /// Sobolev ball.
    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        frequencies(self.max_freq)
            .zip(&self.coeffs)
            .map(|(k, c)| (1.0 + libm::pow(k.unsigned_abs() as f64, 2.0 * s)) * c.norm_sqr())
            .sum()
    }

    /// Same function viewed on a different band: truncates or zero-pads.
    pub fn resized(&self, max_freq: usize) -> Result<Self> {
        let coeffs = frequencies(max_freq).map(|k| self.coeff(k)).collect();
        Ok(Template {
            coeffs,
            max_freq: band_of(2 * max_freq + 1)?,
            real_valued: self.real_valued,
            label: self.label.clone(),
        })
    }
}

fn band_of(len: usize) -> Result<usize> {
    if len < 3 || len % 2 == 0 {
        return Err(Error::invalid(
            "coeffs",
            alloc::format!("length must be 2K+1 with K >= 1, got {len}"),
        ));
    }
    Ok((len - 1) / 2)
}

fn check_grid(grid: usize, max_freq: usize) -> Result<()> {
    let needed = 2 * max_freq + 1;
    if grid < needed {
        return Err(Error::Aliasing { grid, max_freq, needed });
    }
    Ok(())
}

/// Unit roots `e^{2iπr/M}` for `r = 0..M`. Indexing by `(k·m) mod M` keeps
/// the phases exact regardless of how large `k·m` gets.
fn roots_of_unity(grid: usize) -> Vec<Complex> {
    (0..grid)
        .map(|r| Complex::cis(2.0 * PI * r as f64 / grid as f64))
        .collect()
}

/// Samples `x ↦ Σ_{|k|≤K} θ_k e^{2iπkx}` at `x_m = m / grid`.
///
/// The template must be flagged real-valued; the imaginary part of the sum is
/// checked against [`IMAG_RESIDUE_TOL`] and then dropped.
pub fn synthesize(template: &Template, grid: usize) -> Result<Vec<f64>> {
    if !template.is_real_valued() {
        return Err(Error::invalid(
            "template",
            "synthesis to real samples needs a real-valued template",
        ));
    }
    let max_freq = template.max_freq();
    if let Some(k) = hermitian_violation(template.coeffs(), max_freq) {
        return Err(Error::NotHermitian { k });
    }
    check_grid(grid, max_freq)?;

    let roots = roots_of_unity(grid);
    let m_len = grid as i64;
    let mut out = Vec::with_capacity(grid);
    let mut residue = 0.0f64;
    for m in 0..m_len {
        let value: Complex = frequencies(max_freq)
            .map(|k| template.coeff(k) * roots[(k * m).rem_euclid(m_len) as usize])
            .sum();
        residue = residue.max(value.im.abs());
        out.push(value.re);
    }
    if residue > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(out)
}

/// Rectangle-rule estimate of `θ_k = ∫₀¹ f(x) e^{-2iπkx} dx` from samples on
/// the uniform grid `x_m = m / M`, for `|k| <= max_freq`.
///
/// Exact for band-limited inputs below the grid's Nyquist frequency. The
/// returned template is real-valued: negative frequencies are set to the
/// conjugates of the positive ones.
pub fn analyze(samples: &[f64], max_freq: usize) -> Result<Template> {
    let grid = samples.len();
    if max_freq == 0 {
        return Err(Error::invalid("max_freq", "must be at least 1"));
    }
    check_grid(grid, max_freq)?;
    let roots = roots_of_unity(grid);
    let m_len = grid as i64;
    let scale = 1.0 / grid as f64;
    let dc = samples.iter().sum::<f64>() * scale;
    let positive: Vec<Complex> = (1..=max_freq as i64)
        .map(|k| {
            let acc: Complex = samples
                .iter()
                .enumerate()
                .map(|(m, &y)| roots[(-k * m as i64).rem_euclid(m_len) as usize] * y)
                .sum();
            acc * scale
        })
        .collect();
    Template::from_nonnegative(dc, &positive)
}
