//! The linear propagator `E(t) = e^{itΛ(D)}` and the dispersive-decay measurements built on it.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::Symbol;
use crate::error::{Error, Result};
use crate::fit::{self, LineFit};
use crate::grid::SpectralField;
use crate::norms;

/// Multiplies every coefficient by `e^{itΛ(ξ)}`.
pub fn propagate(sym: &Symbol, f: &SpectralField, t: f64) -> SpectralField {
    if t == 0.0 {
        return f.clone();
    }
    f.map_spectrum(|xi, c| c * Complex64::from_polar(1.0, t * sym.value(xi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub t: f64,
    /// `sup_x ||∂|^β E f|`
    pub sup: f64,
    /// `sup_x` of the same quantity divided by the pointwise envelope.
    pub envelope_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub beta: f64,
    pub records: Vec<DecayRecord>,
    /// Log-log fit of `sup` against `t` on the latter half of the times.
    pub fit: LineFit,
    pub max_envelope_ratio: f64,
}

/// Pointwise decay envelope `t^{-1/3-β/3} ⟨(x+t)/t^{1/3}⟩^{-1/4+β/2}`.
pub fn decay_envelope(x: f64, t: f64, beta: f64) -> f64 {
    let y = (x + t) / t.cbrt();
    let bracket = (1.0 + y * y).sqrt();
    t.powf(-1.0 / 3.0 - beta / 3.0) * bracket.powf(-0.25 + beta / 2.0)
}

/// Measures `sup_x ||∂|^β E(t) f|` for each `t` and compares it with the decay envelope
/// scaled by `‖f‖_Z + t^{-1/6} ‖xf‖₂`.
pub fn decay_scan(sym: &Symbol, f: &SpectralField, times: &[f64], beta: f64) -> Result<DecayReport> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("β must lie in [0,1], got {beta}")));
    }
    let grid = *f.grid();
    for &t in times {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("decay scan times must be ≥ 1, got {t}")));
        }
        grid.check_time(t)?;
    }
    let z = norms::z_norm(f, norms::DEFAULT_Z_WEIGHT);
    let w1 = norms::weight1(f);
    let base = f.abs_derivative(beta);
    const PAD: usize = 4;
    let fine_dx = grid.dx() / PAD as f64;
    let x0 = -0.5 * grid.period();

    let records: Vec<DecayRecord> = times
        .par_iter()
        .map(|&t| {
            let vals = propagate(sym, &base, t).to_complex_values_padded(PAD);
            let scale = z + t.powf(-1.0 / 6.0) * w1;
            let mut sup: f64 = 0.0;
            let mut ratio: f64 = 0.0;
            for (i, v) in vals.iter().enumerate() {
                let a = v.norm();
                sup = sup.max(a);
                let x = x0 + i as f64 * fine_dx;
                ratio = ratio.max(a / (scale * decay_envelope(x, t, beta)));
            }
            DecayRecord {
                t,
                sup,
                envelope_ratio: ratio,
            }
        })
        .collect();

    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let sups: Vec<f64> = records.iter().map(|r| r.sup).collect();
    let fit = fit::power_law_tail(&ts, &sups)?;
    let max_envelope_ratio = records.iter().map(|r| r.envelope_ratio).fold(0.0, f64::max);
    Ok(DecayReport {
        beta,
        records,
        fit,
        max_envelope_ratio,
    })
}

/// `n` times spaced geometrically over `[t0, t1]`.
pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && t0 > 0.0 && t1 > t0);
    let r = (t1 / t0).ln() / (n - 1) as f64;
    (0..n).map(|i| t0 * (r * i as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StationaryInfo {
    NoStationaryPoint,
    /// Stationary points `±ξ₀` of `ξ ↦ xξ/t + Λ(ξ)`.
    Pair {
        xi0: f64,
        second_derivative: f64,
        /// `t^{-1/2} |Λ''(ξ₀)|^{-1/2}`
        contribution_scale: f64,
    },
}

/// Classifies the phase `xξ/t + Λ(ξ)` at the point `(x, t)`.
pub fn stationary_profile(sym: &Symbol, x: f64, t: f64) -> Result<StationaryInfo> {
    if !(t > 0.0 && t.is_finite() && x.is_finite()) {
        return Err(Error::Domain(format!("stationary profile needs t > 0, got ({x}, {t})")));
    }
    match sym.invert_group_velocity(-x / t) {
        Ok(xi0) => {
            let second = sym.eval(xi0, 2)?;
            Ok(StationaryInfo::Pair {
                xi0,
                second_derivative: second,
                contribution_scale: (t * second.abs()).powf(-0.5),
            })
        }
        Err(Error::OutOfRange { .. }) => Ok(StationaryInfo::NoStationaryPoint),
        Err(e) => Err(e),
    }
}

/// Periodic sliding-window maximum with half-width `w` cells.
fn window_max(values: &[f64], w: usize) -> Vec<f64> {
    let n = values.len();
    if 2 * w + 1 >= n {
        let m = values.iter().cloned().fold(0.0, f64::max);
        return vec![m; n];
    }
    let at = |i: isize| values[i.rem_euclid(n as isize) as usize];
    let w = w as isize;
    let mut out = Vec::with_capacity(n);
    let mut dq: VecDeque<isize> = VecDeque::new();
    for i in -w..(n as isize + w) {
        while dq.back().is_some_and(|&j| at(j) <= at(i)) {
            dq.pop_back();
        }
        dq.push_back(i);
        let centre = i - w;
        if centre >= 0 {
            while dq.front().is_some_and(|&j| j < centre - w) {
                dq.pop_front();
            }
            out.push(at(*dq.front().unwrap()));
        }
    }
    out
}

/// `I_λ(u₁,u₂) = sup_{|y₁-y₂| ≤ λ} |u₁(y₁) u₂(y₂)|` over grid points, distances measured on
/// the circle.
pub fn interaction_sup(u1: &SpectralField, u2: &SpectralField, lambda: f64) -> Result<f64> {
    u1.same_grid(u2)?;
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("λ must be non-negative, got {lambda}")));
    }
    let a: Vec<f64> = u1.to_complex_values().iter().map(|c| c.norm()).collect();
    let b: Vec<f64> = u2.to_complex_values().iter().map(|c| c.norm()).collect();
    interaction_sup_values(&a, &b, lambda / u1.grid().dx())
}

/// [`interaction_sup`] on spatial samples, with `λ` given in grid cells.
pub fn interaction_sup_values(a: &[f64], b: &[f64], cells: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch);
    }
    let w = (cells + 1e-9).floor().min(a.len() as f64) as usize;
    let m = window_max(b, w);
    Ok(a.iter().zip(&m).map(|(x, y)| x * y).fold(0.0, f64::max))
}
