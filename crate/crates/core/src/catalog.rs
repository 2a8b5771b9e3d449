//! Fixed test templates.

use alloc::vec::Vec;

use crate::{Complex, Error, Result, Template};

/// Amplitude and phase of `θ_k`, `k = 1..=12`, of the wave template.
///
/// A smooth stand-in for a wave-shaped mean pattern: 99.4% of the energy sits
/// in `|k| <= 7`, `θ_0 = 0`, and `max |f| ≈ 1.9`. It is a reconstruction, not
/// a digitized curve.
pub const WAVE_COEFFS: [(f64, f64); 12] = [
    (0.5, 0.3),
    (0.35, 0.6),
    (-0.3, 0.9),
    (0.2, 1.2),
    (0.15, 1.5),
    (-0.1, 1.8),
    (0.08, 2.1),
    (0.04, 2.4),
    (-0.03, 2.7),
    (0.02, 3.0),
    (0.012, 3.3),
    (-0.008, 3.6),
];

/// Wave template on the band `|k| <= max_freq` (which must be at least 8).
/// Coefficients beyond the band are dropped.
pub fn wave_template(max_freq: usize) -> Result<Template> {
    if max_freq < 8 {
        return Err(Error::invalid("max_freq", "the wave template needs K >= 8"));
    }
    let positive: Vec<Complex> = (0..max_freq)
        .map(|i| match WAVE_COEFFS.get(i) {
            Some(&(amp, phase)) => Complex::from_polar(amp, phase),
            None => Complex::new(0.0, 0.0),
        })
        .collect();
    Ok(Template::from_nonnegative(0.0, &positive)?.with_label("wave"))
}

/// Single real cosine: `θ_{±k} = amplitude / 2`.
pub fn spike_template(frequency: usize, amplitude: f64, max_freq: usize) -> Result<Template> {
    if frequency == 0 || frequency > max_freq {
        return Err(Error::invalid("frequency", "must lie in 1..=K"));
    }
    let mut positive = alloc::vec![Complex::new(0.0, 0.0); max_freq];
    positive[frequency - 1] = Complex::new(amplitude / 2.0, 0.0);
    Ok(Template::from_nonnegative(0.0, &positive)?.with_label("spike"))
}

/// Deterministic member of the Sobolev ball `H_s(A)`:
/// `θ_k = c |k|^{-(s + 1/2 + δ/2)}` for `k != 0`, `θ_0 = 0`, with `c` chosen so
/// that `Σ (1 + |k|^{2s}) |θ_k|² = radius` on the band.
pub fn sobolev_template(s: f64, radius: f64, delta: f64, max_freq: usize) -> Result<Template> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", "smoothness must be > 0"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius", "must be > 0"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", "must be > 0"));
    }
    let exponent = -(s + 0.5 + delta / 2.0);
    let raw: Vec<Complex> = (1..=max_freq)
        .map(|k| Complex::new(libm::pow(k as f64, exponent), 0.0))
        .collect();
    let unit = Template::from_nonnegative(0.0, &raw)?;
    let scale = libm::sqrt(radius / unit.sobolev_norm_sq(s));
    let scaled: Vec<Complex> = raw.into_iter().map(|c| c * scale).collect();
    Ok(Template::from_nonnegative(0.0, &scaled)?.with_label("sobolev"))
}
