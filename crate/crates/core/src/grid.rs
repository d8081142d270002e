//! Periodic grids and spectral fields.
//!
//! The torus `[-P/2, P/2)` approximates the line. Coefficients are stored in FFT order
//! (`j = 0, 1, ..., n/2-1, -n/2, ..., -1`) and normalised as samples of the continuous
//! transform `f̂(ξ_j) = (2π)⁻¹ ∫ f e^{-ixξ_j} dx`, so that `f(x) = Σ_j f̂(ξ_j) e^{ixξ_j} Δξ`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Signed lattice index of FFT slot `j`.
#[inline]
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT slot of signed lattice index `m`, if on the lattice.
#[inline]
pub fn slot_of(m: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if m >= -half && m < half {
        Some(if m >= 0 { m as usize } else { (m + n as i64) as usize })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    period: f64,
}

impl GridSpec {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid size {n} must be a power of two ≥ 4"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "period {period} must be positive"
            )));
        }
        Ok(GridSpec { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.period
    }

    /// Largest time for which a disturbance moving at speed ≤ 1 stays clear of wraparound.
    pub fn guard_time(&self) -> f64 {
        self.period / 4.0
    }

    /// Frequency of FFT slot `j`.
    pub fn xi(&self, j: usize) -> f64 {
        signed_index(j, self.n) as f64 * self.dxi()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.xi(j)).collect()
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.period + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t.abs() > self.guard_time() {
            return Err(Error::WrapAround {
                t,
                guard: self.guard_time(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn from_coefficients(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Samples `f̂` at every lattice frequency.
    pub fn from_spectrum(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = (0..grid.n).map(|j| f(grid.xi(j))).collect();
        SpectralField { grid, coeffs }
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_complex_values(grid, data)
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.positions().into_iter().map(f).collect();
        Self::from_real(grid, &values).expect("length matches grid")
    }

    pub fn from_complex_values(grid: GridSpec, mut data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.n {
            return Err(Error::GridMismatch);
        }
        forward_plan(grid.n).process(&mut data);
        let scale = grid.dx() / (2.0 * PI);
        for (j, c) in data.iter_mut().enumerate() {
            // e^{-iξ_j x_0} with x_0 = -P/2 is (-1)^j
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *c *= scale * sign;
        }
        Ok(SpectralField { grid, coeffs: data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Complex values on the native spatial grid.
    pub fn to_complex_values(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        let scale = self.grid.dxi();
        for (j, c) in data.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *c *= scale * sign;
        }
        inverse_plan(self.grid.n).process(&mut data);
        data
    }

    /// Real part of the spatial values; exact for Hermitian coefficient arrays.
    pub fn to_real(&self) -> Vec<f64> {
        self.to_complex_values().into_iter().map(|c| c.re).collect()
    }

    /// Spatial values on a grid refined by `factor` (power of two) through zero padding.
    pub fn to_complex_values_padded(&self, factor: usize) -> Vec<Complex64> {
        assert!(factor.is_power_of_two(), "padding factor must be a power of two");
        let n = self.grid.n;
        let m = n * factor;
        let mut data = vec![Complex64::new(0.0, 0.0); m];
        let half = n / 2;
        let scale = self.grid.dxi();
        for j in 0..n {
            let k = signed_index(j, n);
            let mut c = self.coeffs[j] * scale;
            if k == -(half as i64) && factor > 1 {
                // split the Nyquist mode symmetrically so real fields stay real
                c *= 0.5;
                let plus = slot_of(half as i64, m).expect("within padded lattice");
                data[plus] += c;
            }
            let slot = slot_of(k, m).expect("within padded lattice");
            data[slot] += c;
        }
        // x_0 = -P/2 on the refined grid as well: phase (-1)^k on signed index k
        for (j, c) in data.iter_mut().enumerate() {
            if signed_index(j, m).rem_euclid(2) == 1 {
                *c = -*c;
            }
        }
        inverse_plan(m).process(&mut data);
        data
    }

    /// `sup |u|` measured on a 4× zero-padded grid.
    pub fn sup_norm(&self) -> f64 {
        self.to_complex_values_padded(4)
            .iter()
            .fold(0.0, |acc, c| acc.max(c.norm()))
    }

    /// `‖u‖_{L²}` in physical space, `(2π Σ |f̂_j|² Δξ)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (2.0 * PI * s * self.grid.dxi()).sqrt()
    }

    /// `max_j |f̂(-ξ_j) - conj f̂(ξ_j)|`, ignoring the unpaired Nyquist slot's imaginary part.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let k = signed_index(j, n);
            match slot_of(-k, n) {
                Some(mj) => worst = worst.max((self.coeffs[mj] - self.coeffs[j].conj()).norm()),
                None => worst = worst.max(self.coeffs[j].im.abs()),
            }
        }
        worst
    }

    /// Replaces the coefficients by their Hermitian-symmetric part.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n;
        let old = self.coeffs.clone();
        for j in 0..n {
            let k = signed_index(j, n);
            self.coeffs[j] = match slot_of(-k, n) {
                Some(mj) => 0.5 * (old[j] + old[mj].conj()),
                None => Complex64::new(old[j].re, 0.0),
            };
        }
    }

    pub fn map_spectrum(&self, f: impl Fn(f64, Complex64) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| f(self.grid.xi(j), c))
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        self.map_spectrum(|_, c| c * s)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.same_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.add(&other.scale(-1.0))
    }

    /// `∂_x` applied spectrally.
    pub fn derivative(&self) -> SpectralField {
        self.map_spectrum(|xi, c| c * Complex64::new(0.0, xi))
    }

    /// `|∂|^β` applied spectrally.
    pub fn abs_derivative(&self, beta: f64) -> SpectralField {
        if beta == 0.0 {
            return self.clone();
        }
        self.map_spectrum(|xi, c| c * xi.abs().powf(beta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(256, 40.0).unwrap()
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = grid();
        let f = SpectralField::from_fn(g, |x| (-x * x / 2.0).exp());
        // f̂(ξ) = (2π)^{-1/2} e^{-ξ²/2}
        for j in 0..g.n() {
            let xi = g.xi(j);
            let exact = (-xi * xi / 2.0).exp() / (2.0 * PI).sqrt();
            assert!((f.coefficients()[j] - exact).norm() < 1e-14, "ξ={xi}");
        }
        let back = f.to_real();
        for (i, v) in back.iter().enumerate() {
            let x = g.x(i);
            assert!((v - (-x * x / 2.0).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn parseval() {
        let g = grid();
        let vals: Vec<f64> = (0..g.n()).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let f = SpectralField::from_real(g, &vals).unwrap();
        let direct = (vals.iter().map(|v| v * v).sum::<f64>() * g.dx()).sqrt();
        assert!((f.l2_norm() - direct).abs() < 1e-12 * direct);
        assert!(f.hermitian_defect() < 1e-14);
    }

    #[test]
    fn padding_preserves_values_on_coarse_points() {
        let g = grid();
        let f = SpectralField::from_fn(g, |x| (x / 3.0).cos() * (-x * x / 20.0).exp());
        let coarse = f.to_real();
        let fine = f.to_complex_values_padded(4);
        for i in 0..g.n() {
            assert!((fine[4 * i].re - coarse[i]).abs() < 1e-13);
            assert!(fine[4 * i].im.abs() < 1e-13);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(100, 1.0).is_err());
        assert!(GridSpec::new(64, -1.0).is_err());
        let g = GridSpec::new(1 << 16, (1 << 14) as f64 * PI).unwrap();
        assert!((g.nyquist() - 4.0).abs() < 1e-12);
        assert!(g.check_time(1000.0).is_ok());
        assert!(g.check_time(13000.0).is_err());
    }
}
