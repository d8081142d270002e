//! Least-squares helpers for power-law and trend fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::Domain("fit: x and y lengths differ".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Domain(format!("fit needs at least two points, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("fit: all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        points: n,
    })
}

/// Fits `y ≈ C t^p` on log-log axes and returns the exponent `p`.
pub fn power_law(t: &[f64], y: &[f64]) -> Result<LineFit> {
    if t.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear(&lx, &ly)
}

/// Power-law fit restricted to the latter half of the samples (transient exclusion).
pub fn power_law_tail(t: &[f64], y: &[f64]) -> Result<LineFit> {
    let start = t.len() / 2;
    let start = start.min(t.len().saturating_sub(2));
    power_law(&t[start..], &y[start..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = (1..=20).map(|i| 10.0 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|s| 3.0 * s.powf(-1.0 / 3.0)).collect();
        let f = power_law(&t, &y).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 1e-13);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        let g = power_law_tail(&t, &y).unwrap();
        assert_eq!(g.points, 10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(linear(&[1.0], &[1.0]).is_err());
        assert!(linear(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(power_law(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }
}
