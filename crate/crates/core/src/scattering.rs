//! The modified-scattering phase
//!
//! ```text
//! H(ξ,t) = -(6πξ / |Λ''(ξ)|) ∫_0^t |f̂(ξ,s)|² φ_{>1}(|ξ| s^{1/3}) ds / s
//! ```
//!
//! accumulated online from profile samples, the corrected profile `g = e^{iH} f̂`, and
//! dyadic Cauchy-increment reports.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::Symbol;
use crate::error::{Error, Result};
use crate::fit;
use crate::grid::{GridSpec, SpectralField};
use crate::lp;

/// Largest accepted `Δ log s` between consecutive samples after the first.
pub const MAX_LOG_STEP: f64 = 0.05;

const CUT_LO: f64 = 2.5;
const CUT_HI: f64 = 3.0;
const TABLE: usize = 2048;

fn cutoff_density(y: f64) -> f64 {
    3.0 * lp::phi_above(y, 1) / y
}

/// Gauss–Legendre (8 points) on `[a, b]`.
fn gauss8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for i in 0..4 {
        s += W[i] * (f(m - r * X[i]) + f(m + r * X[i]));
    }
    s * r
}

fn cutoff_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let h = (CUT_HI - CUT_LO) / TABLE as f64;
        let mut v = Vec::with_capacity(TABLE + 1);
        let mut acc = 0.0;
        v.push(0.0);
        for i in 0..TABLE {
            let a = CUT_LO + i as f64 * h;
            acc += gauss8(cutoff_density, a, a + h);
            v.push(acc);
        }
        v
    })
}

/// `G(Y) = 3 ∫_0^Y φ_{>1}(y) dy / y`, so that `∫_a^b φ_{>1}(|ξ|s^{1/3}) ds/s = G(|ξ|b^{1/3}) - G(|ξ|a^{1/3})`.
pub fn cutoff_log_integral(y: f64) -> f64 {
    let y = y.abs();
    let tab = cutoff_table();
    if y <= CUT_LO {
        return 0.0;
    }
    if y >= CUT_HI {
        return tab[TABLE] + 3.0 * (y / CUT_HI).ln();
    }
    // cubic Hermite interpolation with exact derivatives
    let h = (CUT_HI - CUT_LO) / TABLE as f64;
    let s = (y - CUT_LO) / h;
    let i = (s.floor() as usize).min(TABLE - 1);
    let u = s - i as f64;
    let a = CUT_LO + i as f64 * h;
    let (p0, p1) = (tab[i], tab[i + 1]);
    let (d0, d1) = (cutoff_density(a) * h, cutoff_density(a + h) * h);
    let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    let h10 = u * (1.0 - u) * (1.0 - u);
    let h01 = u * u * (3.0 - 2.0 * u);
    let h11 = u * u * (u - 1.0);
    h00 * p0 + h10 * d0 + h01 * p1 + h11 * d1
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringState {
    grid: GridSpec,
    /// `-6π s ξ/|Λ''(ξ)|` with `s` the sign of the nonlinearity.
    prefactor: Vec<f64>,
    h: Vec<f64>,
    f_hat: SpectralField,
    g: SpectralField,
    last_t: f64,
    samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSnapshot {
    pub t: f64,
    pub h: Vec<f64>,
    pub f_hat: SpectralField,
    pub g: SpectralField,
}

impl ScatteringState {
    /// Starts at `t = 0` with `H ≡ 0`; `sign` is `+1` for the defocusing equation.
    pub fn new(sym: &Symbol, sign: f64, f_hat0: SpectralField) -> Result<Self> {
        let grid = *f_hat0.grid();
        let prefactor = grid
            .frequencies()
            .into_iter()
            .map(|xi| Ok(-6.0 * std::f64::consts::PI * sign * sym.xi_over_abs_second(xi)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatteringState {
            grid,
            prefactor,
            h: vec![0.0; grid.n()],
            g: f_hat0.clone(),
            f_hat: f_hat0,
            last_t: 0.0,
            samples: 1,
        })
    }

    pub fn last_t(&self) -> f64 {
        self.last_t
    }

    pub fn phase(&self) -> &[f64] {
        &self.h
    }

    pub fn f_hat(&self) -> &SpectralField {
        &self.f_hat
    }

    pub fn g(&self) -> &SpectralField {
        &self.g
    }

    /// Latest `g`, the stand-in for the limit profile `w_∞`.
    pub fn w_inf_estimate(&self) -> &SpectralField {
        &self.g
    }

    /// Adds the phase increment over `[last_t, t_new]`.
    ///
    /// `|f̂|²` is interpolated linearly between the samples and integrated exactly against
    /// the weight `φ_{>1}(|ξ|s^{1/3})/s`.
    pub fn accumulate(&mut self, f_hat_new: &SpectralField, t_new: f64) -> Result<()> {
        if f_hat_new.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if !(t_new > self.last_t) {
            return Err(Error::NonMonotoneTime {
                t_new,
                last_t: self.last_t,
            });
        }
        if self.last_t > 0.0 {
            let dlog = (t_new / self.last_t).ln();
            if dlog > MAX_LOG_STEP * (1.0 + 1e-9) {
                return Err(Error::StepTooCoarse {
                    from: self.last_t,
                    to: t_new,
                    dlog,
                    max: MAX_LOG_STEP,
                });
            }
        }
        let (ca, cb) = (self.last_t.cbrt(), t_new.cbrt());
        let old = self.f_hat.coefficients();
        let new = f_hat_new.coefficients();
        for j in 0..self.grid.n() {
            let xi = self.grid.xi(j).abs();
            let w = cutoff_log_integral(xi * cb) - cutoff_log_integral(xi * ca);
            if w != 0.0 {
                let mean = 0.5 * (old[j].norm_sqr() + new[j].norm_sqr());
                self.h[j] += self.prefactor[j] * mean * w;
            }
        }
        self.f_hat = f_hat_new.clone();
        self.g = corrected(&self.f_hat, &self.h);
        self.last_t = t_new;
        self.samples += 1;
        Ok(())
    }

    pub fn snapshot(&self) -> ScatteringSnapshot {
        ScatteringSnapshot {
            t: self.last_t,
            h: self.h.clone(),
            f_hat: self.f_hat.clone(),
            g: self.g.clone(),
        }
    }
}

fn corrected(f: &SpectralField, h: &[f64]) -> SpectralField {
    let coeffs = f
        .coefficients()
        .iter()
        .zip(h)
        .map(|(c, &p)| c * Complex64::from_polar(1.0, p))
        .collect();
    SpectralField::from_coefficients(*f.grid(), coeffs).expect("same grid")
}

/// Sample times for online accumulation: `t_first`, then geometric with ratio
/// `e^{MAX_LOG_STEP}` up to `t_end`, merged with `extra` (sorted, deduplicated).
pub fn log_sample_times(t_first: f64, t_end: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![t_first];
    let r = MAX_LOG_STEP.exp();
    let mut t = t_first;
    while t * r < t_end {
        t *= r;
        v.push(t);
    }
    v.push(t_end);
    v.extend(extra.iter().copied().filter(|&x| x > 0.0 && x <= t_end));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub xi_min: f64,
    pub xi_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t1: f64,
    pub t2: f64,
    /// `sup_band (1+|ξ|^w) |g(t₂) - g(t₁)|`
    pub corrected: f64,
    /// `sup_band (1+|ξ|^w) |f̂(t₂) - f̂(t₁)|`
    pub uncorrected: f64,
}

/// Weighted sup-band increments between two states, for `ξ_min ≤ |ξ| ≤ ξ_max`.
///
/// The band must sit above `t₁^{-1/3+α}`, where the phase correction is active.
pub fn convergence_report(
    a: &ScatteringSnapshot,
    b: &ScatteringSnapshot,
    band: Band,
    weight: f64,
    alpha: f64,
) -> Result<ConvergenceReport> {
    a.f_hat.same_grid(&b.f_hat)?;
    let threshold = a.t.powf(-1.0 / 3.0 + alpha);
    if band.xi_min < threshold {
        return Err(Error::BandBelowThreshold {
            xi_min: band.xi_min,
            threshold,
        });
    }
    let grid = a.f_hat.grid();
    let mut corrected: f64 = 0.0;
    let mut uncorrected: f64 = 0.0;
    for j in 0..grid.n() {
        let xi = grid.xi(j).abs();
        if xi < band.xi_min || xi > band.xi_max {
            continue;
        }
        let w = 1.0 + xi.powf(weight);
        corrected = corrected.max(w * (b.g.coefficients()[j] - a.g.coefficients()[j]).norm());
        uncorrected =
            uncorrected.max(w * (b.f_hat.coefficients()[j] - a.f_hat.coefficients()[j]).norm());
    }
    Ok(ConvergenceReport {
        t1: a.t,
        t2: b.t,
        corrected,
        uncorrected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicReport {
    pub rows: Vec<ConvergenceReport>,
    /// `κ` from a power-law fit `corrected ∝ t^{-κ}` over the dyads, if at least two are
    /// positive.
    pub kappa: Option<f64>,
}

impl DyadicReport {
    /// Whether corrected increments never grow by more than `allowance` (relative)
    /// from one dyad to the next.
    pub fn nonincreasing(&self, allowance: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].corrected <= (1.0 + allowance) * w[0].corrected)
    }

    /// Error bar for `w_∞`: the last dyadic increment.
    pub fn w_inf_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.corrected)
    }
}

/// Reports on consecutive snapshots (intended to be dyadic in time) and fits `κ`.
pub fn dyadic_report(
    snapshots: &[ScatteringSnapshot],
    band: Band,
    weight: f64,
    alpha: f64,
) -> Result<DyadicReport> {
    let rows = snapshots
        .windows(2)
        .map(|w| convergence_report(&w[0], &w[1], band, weight, alpha))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.corrected > 0.0)
        .map(|r| (r.t1, r.corrected))
        .collect();
    let kappa = if pts.len() >= 2 {
        let (t, v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        fit::power_law(&t, &v).ok().map(|f| -f.slope)
    } else {
        None
    };
    Ok(DyadicReport { rows, kappa })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(128, 40.0).unwrap()
    }

    fn profile() -> SpectralField {
        let mut f = SpectralField::from_fn(grid(), |x| 0.1 * (-x * x / 2.0).exp() * (1.0 + 0.3 * x));
        f.symmetrize();
        f
    }

    #[test]
    fn cutoff_integral() {
        assert_eq!(cutoff_log_integral(2.4), 0.0);
        let g3 = cutoff_log_integral(3.0);
        assert!(g3 > 0.0 && g3 < 3.0 * (3.0f64 / 2.5).ln());
        let direct = {
            let n = 400;
            let h = 0.5 / n as f64;
            (0..n)
                .map(|i| gauss8(cutoff_density, 2.5 + i as f64 * h, 2.5 + (i + 1) as f64 * h))
                .sum::<f64>()
        };
        assert!((g3 - direct).abs() < 1e-13);
        for &y in &[2.6, 2.75, 2.9] {
            let fine: f64 = (0..200)
                .map(|i| {
                    let h = (y - 2.5) / 200.0;
                    gauss8(cutoff_density, 2.5 + i as f64 * h, 2.5 + (i + 1) as f64 * h)
                })
                .sum();
            assert!((cutoff_log_integral(y) - fine).abs() < 1e-12, "y={y}");
        }
        assert!((cutoff_log_integral(30.0) - g3 - 3.0 * 10f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn zero_profile() {
        let z = SpectralField::zeros(grid());
        let mut st = ScatteringState::new(&Symbol::whitham(), 1.0, z.clone()).unwrap();
        for t in log_sample_times(1.0, 20.0, &[]) {
            st.accumulate(&z, t).unwrap();
        }
        assert!(st.phase().iter().all(|&h| h == 0.0));
        assert!(st.g().coefficients().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn static_profile_closed_form() {
        let sym = Symbol::whitham();
        let f = profile();
        let mut st = ScatteringState::new(&sym, 1.0, f.clone()).unwrap();
        let times = log_sample_times(1.0, 400.0, &[]);
        let mut mid = None;
        for &t in &times {
            st.accumulate(&f, t).unwrap();
            if mid.is_none() && t >= 100.0 {
                mid = Some(st.snapshot());
            }
        }
        let mid = mid.unwrap();
        let g = f.grid();
        for j in 0..g.n() {
            let xi = g.xi(j);
            let c2 = f.coefficients()[j].norm_sqr();
            let pre = -6.0 * std::f64::consts::PI * sym.xi_over_abs_second(xi).unwrap();
            let expected = pre * c2 * cutoff_log_integral(xi.abs() * 400f64.cbrt());
            assert!((st.phase()[j] - expected).abs() < 1e-13 * (1.0 + expected.abs()));
            if xi > 0.0 {
                assert!(st.phase()[j] <= mid.h[j]);
            }
            if xi.abs() * mid.t.cbrt() > 3.0 {
                let d = pre * c2 * (400f64 / mid.t).ln();
                assert!((st.phase()[j] - mid.h[j] - d).abs() < 1e-12 * (1.0 + d.abs()));
            }
            // |g| = |f̂|
            assert!((st.g().coefficients()[j].norm() - f.coefficients()[j].norm()).abs() < 1e-16);
        }
        assert!(st.g().hermitian_defect() < 1e-15);
    }

    #[test]
    fn step_control() {
        let f = profile();
        let mut st = ScatteringState::new(&Symbol::whitham(), 1.0, f.clone()).unwrap();
        st.accumulate(&f, 1.0).unwrap();
        assert!(matches!(st.accumulate(&f, 1.0), Err(Error::NonMonotoneTime { .. })));
        assert!(matches!(st.accumulate(&f, 2.0), Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn reports() {
        let f = profile();
        let mut st = ScatteringState::new(&Symbol::whitham(), 1.0, f.clone()).unwrap();
        let mut snaps = vec![];
        for t in log_sample_times(1.0, 64.0, &[8.0, 16.0, 32.0]) {
            st.accumulate(&f, t).unwrap();
            if [8.0, 16.0, 32.0, 64.0].contains(&t) {
                snaps.push(st.snapshot());
            }
        }
        let band = Band { xi_min: 0.7, xi_max: 3.0 };
        let same = convergence_report(&snaps[0], &snaps[0], band, 4.0, 0.1).unwrap();
        assert_eq!(same.corrected, 0.0);
        assert_eq!(same.uncorrected, 0.0);
        let r = dyadic_report(&snaps, band, 4.0, 0.1).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.iter().all(|x| x.uncorrected == 0.0 && x.corrected > 0.0));
        let low = Band { xi_min: 0.1, xi_max: 3.0 };
        assert!(matches!(
            convergence_report(&snaps[0], &snaps[1], low, 4.0, 0.1),
            Err(Error::BandBelowThreshold { .. })
        ));
    }
}
