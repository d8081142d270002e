//! Norms monitored along a run: Sobolev, Z, and the two weighted norms of the profile.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::grid::{signed_index, slot_of, SpectralField};

/// Desk Sobolev index.
pub const DEFAULT_SOBOLEV_INDEX: f64 = 4.0;
/// Desk Z-norm weight exponent.
pub const DEFAULT_Z_WEIGHT: f64 = 4.0;

/// `‖⟨ξ⟩^N f̂‖` measured as the physical `H^N` norm.
pub fn sobolev_norm(f: &SpectralField, index: f64) -> f64 {
    let g = f.grid();
    let s: f64 = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, c)| (1.0 + g.xi(j).powi(2)).powf(index) * c.norm_sqr())
        .sum();
    (2.0 * PI * s * g.dxi()).sqrt()
}

/// `sup_ξ (1 + |ξ|^w) |f̂(ξ)|`.
pub fn z_norm(f: &SpectralField, weight: f64) -> f64 {
    let g = f.grid();
    f.coefficients()
        .iter()
        .enumerate()
        .map(|(j, c)| (1.0 + g.xi(j).abs().powf(weight)) * c.norm())
        .fold(0.0, f64::max)
}

/// `x·f` as a spectral field, formed by multiplying the spatial values by `x ∈ [-P/2, P/2)`.
///
/// This is exact spectral differentiation in `ξ` (`F[xf] = i∂_ξ f̂`) for fields that vanish
/// near the cell boundary.
pub fn x_weighted(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    let vals: Vec<Complex64> = f
        .to_complex_values()
        .into_iter()
        .enumerate()
        .map(|(i, v)| v * g.x(i))
        .collect();
    SpectralField::from_complex_values(g, vals).expect("same grid")
}

/// `‖xf‖₂`.
pub fn weight1(f: &SpectralField) -> f64 {
    x_weighted(f).l2_norm()
}

/// `‖∂_x(xf)‖₂`.
pub fn weight2(f: &SpectralField) -> f64 {
    x_weighted(f).derivative().l2_norm()
}

/// `‖xf‖₂` from a centred finite difference of `f̂` in `ξ`; a cross-check for [`weight1`]
/// accurate to `O(Δξ²)` for well-resolved spectra.
pub fn weight1_fd(f: &SpectralField) -> f64 {
    let g = f.grid();
    let n = g.n();
    let c = f.coefficients();
    let h = g.dxi();
    let mut s = 0.0;
    for j in 0..n {
        let k = signed_index(j, n);
        let up = slot_of(k + 1, n).map_or(Complex64::new(0.0, 0.0), |i| c[i]);
        let down = slot_of(k - 1, n).map_or(Complex64::new(0.0, 0.0), |i| c[i]);
        s += ((up - down) / (2.0 * h)).norm_sqr();
    }
    (2.0 * PI * s * h).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn gaussian() -> SpectralField {
        let g = GridSpec::new(1024, 80.0).unwrap();
        SpectralField::from_fn(g, |x| (-x * x / 2.0).exp())
    }

    #[test]
    fn weighted_norms_of_gaussian() {
        let f = gaussian();
        // ∫ x² e^{-x²} dx = √π / 2
        let exact = (PI.sqrt() / 2.0).sqrt();
        assert!((weight1(&f) - exact).abs() < 1e-12);
        let fd = weight1_fd(&f);
        assert!((fd - exact).abs() < 5e-3, "fd {fd}");
        // ∂_x(x e^{-x²/2}) = (1 - x²) e^{-x²/2}; ∫ (1-x²)² e^{-x²} = 3√π/4
        let exact2 = (3.0 * PI.sqrt() / 4.0).sqrt();
        assert!((weight2(&f) - exact2).abs() < 1e-10);
    }

    #[test]
    fn sobolev_and_z() {
        let f = gaussian();
        assert!((sobolev_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-14);
        assert!(sobolev_norm(&f, 4.0) > f.l2_norm());
        // the weight is 1 at ξ = 0, where f̂ = (2π)^{-1/2}
        let z = z_norm(&f, 4.0);
        assert!(z >= (2.0 * PI).powf(-0.5) - 1e-12);
        let zero = SpectralField::zeros(*f.grid());
        assert_eq!(z_norm(&zero, 4.0), 0.0);
        assert_eq!(weight1(&zero), 0.0);
    }
}
