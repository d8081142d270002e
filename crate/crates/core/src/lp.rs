//! Dyadic machinery: the bump `φ`, its Littlewood–Paley pieces, frequency projections and
//! the dyadic partition of a time interval.
//!
//! `φ` is even, equal to 1 on `[-5/4, 5/4]` and supported in `[-3/2, 3/2]`;
//! `ψ(ξ) = φ(ξ) - φ(2ξ)`, `φ_l(ξ) = φ(ξ/2^l)`, `ψ_k(ξ) = ψ(ξ/2^k)`. With these
//! conventions `φ_l + Σ_{l<k≤K} ψ_k = φ_K` exactly, and `ψ_k` lives on `5/8·2^k < |ξ| < 3/2·2^k`.

use std::fmt;

use log::warn;

use crate::error::{Error, Result};
use crate::grid::SpectralField;

const PLATEAU: f64 = 1.25;
const EDGE: f64 = 1.5;

/// C^∞ step: 1 for `s ≤ 0`, 0 for `s ≥ 1`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - s)).exp();
    let b = (-1.0 / s).exp();
    a / (a + b)
}

/// The base bump `φ`.
pub fn phi(xi: f64) -> f64 {
    smooth_step((xi.abs() - PLATEAU) / (EDGE - PLATEAU))
}

pub fn psi(xi: f64) -> f64 {
    phi(xi) - phi(2.0 * xi)
}

pub fn phi_l(xi: f64, l: i32) -> f64 {
    phi(xi * (-l as f64).exp2())
}

pub fn psi_k(xi: f64, k: i32) -> f64 {
    psi(xi * (-k as f64).exp2())
}

/// `φ_k^l`: `ψ_k` when `k > l`, `φ_l` when `k = l`, zero below.
pub fn phi_kl(xi: f64, k: i32, l: i32) -> f64 {
    use std::cmp::Ordering::*;
    match k.cmp(&l) {
        Greater => psi_k(xi, k),
        Equal => phi_l(xi, l),
        Less => 0.0,
    }
}

/// `φ_{>l} = 1 - φ_l`.
pub fn phi_above(xi: f64, l: i32) -> f64 {
    1.0 - phi_l(xi, l)
}

/// Smooth compactly supported bump on `(lo, hi)`, `exp(1 - 1/(1 - s²))` in the centred variable.
pub fn mollifier(xi: f64, lo: f64, hi: f64) -> f64 {
    let s = (2.0 * xi - lo - hi) / (hi - lo);
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// `ψ_k(D)`
    Dyadic(i32),
    /// `φ_l(D)`
    Below(i32),
    /// `φ_{>l}(D) = 1 - φ_l(D)`
    Above(i32),
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Band::Dyadic(k) => write!(f, "P_{k}"),
            Band::Below(l) => write!(f, "P_<={l}"),
            Band::Above(l) => write!(f, "P_>{l}"),
        }
    }
}

impl Band {
    pub fn weight(&self, xi: f64) -> f64 {
        match *self {
            Band::Dyadic(k) => psi_k(xi, k),
            Band::Below(l) => phi_l(xi, l),
            Band::Above(l) => phi_above(xi, l),
        }
    }

    /// Whether the band has any support below `nyquist`.
    pub fn resolvable(&self, nyquist: f64) -> bool {
        match *self {
            Band::Dyadic(k) => ((k - 1) as f64).exp2() <= nyquist,
            Band::Below(_) => true,
            Band::Above(l) => PLATEAU * (l as f64).exp2() < nyquist,
        }
    }
}

/// Multiplies `f̂` by the band's bump.
pub fn project(field: &SpectralField, band: Band) -> Result<SpectralField> {
    let nyquist = field.grid().nyquist();
    if let Band::Dyadic(_) = band {
        if !band.resolvable(nyquist) {
            return Err(Error::BandOutOfLattice {
                band: band.to_string(),
                nyquist,
            });
        }
    }
    Ok(field.map_spectrum(|xi, c| c * band.weight(xi)))
}

/// Like [`project`], but bands above the lattice give a zero field (logged) so sweeps keep going.
pub fn project_or_zero(field: &SpectralField, band: Band) -> SpectralField {
    match project(field, band) {
        Ok(p) => p,
        Err(e) => {
            warn!("{e}; returning zero field");
            SpectralField::zeros(*field.grid())
        }
    }
}

/// Dyadic indices `k` whose `ψ_k` touches the lattice `0 < |ξ| ≤ nyquist`, given the lowest
/// index `l` of the `φ_l` block.
pub fn dyadic_range(l: i32, nyquist: f64) -> std::ops::RangeInclusive<i32> {
    let top = (nyquist / 0.625).log2().ceil() as i32;
    (l + 1)..=top.max(l + 1)
}

/// Rows `(ξ, φ, ψ, φ_{>1})` for inspection.
pub fn bump_table(xis: &[f64]) -> Vec<[f64; 4]> {
    xis.iter()
        .map(|&x| [x, phi(x), psi(x), phi_above(x, 1)])
        .collect()
}

/// A partition `q_0, ..., q_{L+1}` of `[0, t]` with `supp q_m ⊂ [2^{m-1}, 2^{m+1}]` for
/// `1 ≤ m ≤ L`, `supp q_0 ⊂ [0, 2]` and `supp q_{L+1} ⊂ [t-2, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePartition {
    t: f64,
    l: usize,
}

pub fn build_time_partition(t: f64) -> Result<TimePartition> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time partition needs t ≥ 0, got {t}")));
    }
    let lg = (2.0 + t).log2().ceil() as i64;
    let l = if t < 4.0 { (lg - 2).max(0) } else { lg } as usize;
    Ok(TimePartition { t, l })
}

impl TimePartition {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// The dyadic count `L`, within 2 of `log₂(2 + t)`.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.l + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn degenerate(&self) -> bool {
        self.t < 4.0
    }

    /// Smooth cutoff near the final time: 1 on `[0, t-2]`, 0 from `t-1` on.
    fn tail_cut(&self, s: f64) -> f64 {
        smooth_step(s - (self.t - 2.0))
    }

    /// Cumulative dyadic cutoff: 1 on `[0, 2^m]`, 0 beyond `2^{m+1}`.
    fn theta(m: usize, s: f64) -> f64 {
        let scale = (m as f64).exp2();
        smooth_step(s / scale - 1.0)
    }

    /// `q_m(s)`.
    pub fn piece(&self, m: usize, s: f64) -> f64 {
        if !(0.0..=self.t).contains(&s) || m > self.l + 1 {
            return 0.0;
        }
        if self.degenerate() {
            let a = (self.t - 2.0).max(0.0);
            let b = self.t.min(2.0);
            let q0 = if b > a {
                smooth_step((s - a) / (b - a))
            } else if s <= a {
                1.0
            } else {
                0.0
            };
            return match m {
                0 => q0,
                m if m == self.l + 1 => 1.0 - q0,
                _ => 0.0,
            };
        }
        let cut = self.tail_cut(s);
        if m == self.l + 1 {
            return 1.0 - cut;
        }
        let q = if m == 0 {
            Self::theta(0, s)
        } else {
            Self::theta(m, s) - Self::theta(m - 1, s)
        };
        q * cut
    }

    pub fn sum(&self, s: f64) -> f64 {
        (0..self.len()).map(|m| self.piece(m, s)).sum()
    }
}
