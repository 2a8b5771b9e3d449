//! Small summary statistics.

use crate::{Error, Result};

/// Sample mean and standard error of the mean.
///
/// Uses deviations from the first sample, so constant input gives exactly
/// that constant and a zero standard error.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let Some(&pivot) = samples.first() else {
        return (f64::NAN, f64::NAN);
    };
    let n = samples.len() as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for &x in samples {
        let d = x - pivot;
        s1 += d;
        s2 += d * d;
    }
    let mean = pivot + s1 / n;
    if samples.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = ((s2 - s1 * s1 / n) / (n - 1.0)).max(0.0);
    (mean, libm::sqrt(var / n))
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::invalid("fit", "x and y lengths differ"));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientPoints(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae are equal"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Quantile `p` of the samples with linear interpolation between order
/// statistics (`h = (len - 1) p`). NaN for empty input.
pub fn quantile(samples: &[f64], p: f64) -> f64 {
    if samples.is_empty() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples_have_zero_stderr() {
        let (m, se) = mean_stderr(&[0.1; 7]);
        assert_eq!(m, 0.1);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn known_mean_and_stderr() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // sd = sqrt(5/3)
        assert!((se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 3.0).collect();
        let (s, b) = linear_fit(&x, &y).unwrap();
        assert!((s + 0.5).abs() < 1e-14 && (b - 3.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert!(quantile(&[], 0.5).is_nan());
    }
}
