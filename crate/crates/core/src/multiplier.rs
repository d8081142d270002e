//! Multiplier norms `‖m‖_S = ‖m̌‖_{L¹}` and direct application of trilinear multiplier
//! operators
//!
//! ```text
//! F[T_m(f₁,f₂,f₃)](ξ) = ∬ m(ξ₁, ξ₂, ξ-ξ₁-ξ₂) f̂₁(ξ₁) f̂₂(ξ₂) f̂₃(ξ-ξ₁-ξ₂) dξ₁ dξ₂.
//! ```
//!
//! With `m̌(y) = ∫ m(ξ) e^{iy·ξ} dξ`, `T_m` is an average of translates weighted by
//! `(2π)^{-3} m̌`, so `‖T_m(f₁,f₂,f₃)‖_{p₀} ≤ (2π)^{-3} ‖m‖_S Π‖f_i‖_{p_i}` under Hölder.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_plan, signed_index, slot_of, GridSpec, SpectralField};
use crate::lp;

/// Dense trilinear multipliers are stored only on grids up to this size.
pub const DENSE_MAX_N: usize = 256;

/// Relative edge level above which a sampled multiplier is rejected.
pub const EDGE_TOLERANCE: f64 = 1e-8;

/// A multiplier sampled on a uniform lattice over a `d`-dimensional box, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMultiplier {
    shape: Vec<usize>,
    spacing: f64,
    values: Vec<Complex64>,
}

impl SampledMultiplier {
    /// Samples `m` at `lo + (i + ½)·h` in every coordinate, `points` per axis,
    /// `h = (hi - lo) / points`.
    pub fn sample(
        dims: usize,
        lo: f64,
        hi: f64,
        points: usize,
        m: impl Fn(&[f64]) -> Complex64 + Sync,
    ) -> Result<Self> {
        if dims == 0 || points == 0 || !(hi > lo) {
            return Err(Error::DegenerateBox(format!(
                "dims {dims}, points {points}, [{lo}, {hi}]"
            )));
        }
        let h = (hi - lo) / points as f64;
        let total = points.pow(dims as u32);
        let values = (0..total)
            .into_par_iter()
            .map(|mut flat| {
                let mut xi = vec![0.0; dims];
                for d in (0..dims).rev() {
                    xi[d] = lo + (flat % points) as f64 * h + 0.5 * h;
                    flat /= points;
                }
                m(&xi)
            })
            .collect();
        Ok(SampledMultiplier {
            shape: vec![points; dims],
            spacing: h,
            values,
        })
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn edge_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.shape[0];
        let d = self.dims();
        let mut edge: f64 = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let mut f = flat;
            let mut on_edge = false;
            for _ in 0..d {
                let i = f % n;
                f /= n;
                on_edge |= i == 0 || i == n - 1;
            }
            if on_edge {
                edge = edge.max(v.norm());
            }
        }
        edge / peak
    }
}

/// In-place FFT along every axis of a row-major cube with side `n`.
fn fft_nd(data: &mut [Complex64], n: usize, dims: usize) {
    let plan = forward_plan(n);
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dims {
        let stride = n.pow((dims - 1 - axis) as u32);
        let block = stride * n;
        for start in 0..data.len() / n {
            let outer = start / stride;
            let inner = start % stride;
            let base = outer * block + inner;
            for (i, l) in line.iter_mut().enumerate() {
                *l = data[base + i * stride];
            }
            plan.process(&mut line);
            for (i, l) in line.iter().enumerate() {
                data[base + i * stride] = *l;
            }
        }
    }
}

/// `‖m̌‖_{L¹}` by a zero-padded FFT (`pad ≥ 4`) and a Riemann sum in `y`.
pub fn s_norm(m: &SampledMultiplier, pad: usize) -> Result<f64> {
    if pad < 4 || !pad.is_power_of_two() {
        return Err(Error::Domain(format!("padding factor must be a power of two ≥ 4, got {pad}")));
    }
    let ratio = m.edge_ratio();
    if ratio > EDGE_TOLERANCE {
        return Err(Error::NonDecayedEdge { ratio });
    }
    let d = m.dims();
    let n = m.shape[0];
    let big = n * pad;
    let total = big.pow(d as u32);
    let required = total * std::mem::size_of::<Complex64>();
    const BUDGET: usize = 1 << 30;
    if required > BUDGET {
        return Err(Error::MemoryBudget {
            required,
            budget: BUDGET,
        });
    }
    let mut data = vec![Complex64::default(); total];
    for (flat, v) in m.values.iter().enumerate() {
        let mut f = flat;
        let mut target = 0;
        let mut mul = 1;
        for _ in 0..d {
            target += (f % n) * mul;
            f /= n;
            mul *= big;
        }
        data[target] = *v;
    }
    fft_nd(&mut data, big, d);
    // |m̌(y)| is insensitive to the box offset; y-spacing is 2π/(big·h)
    let h = m.spacing;
    let dy = 2.0 * std::f64::consts::PI / (big as f64 * h);
    let sum: f64 = data.iter().map(|c| c.norm()).sum();
    Ok(sum * h.powi(d as i32) * dy.powi(d as i32))
}

/// `‖m·Π_i φ_{k_i}^{loc}(ξ_i)‖_S` with the dyadic bumps `ψ_{k_i}`, sampled on the box
/// `[-2^{k_max+1}, 2^{k_max+1}]^d` with `points` per axis.
pub fn localized_s_norm(
    m: impl Fn(&[f64]) -> Complex64 + Sync,
    ks: &[i32],
    points: usize,
    pad: usize,
) -> Result<f64> {
    let kmax = *ks.iter().max().ok_or_else(|| Error::DegenerateBox("no bands".into()))?;
    let r = (kmax as f64 + 1.0).exp2();
    let sampled = SampledMultiplier::sample(ks.len(), -r, r, points, |xi| {
        let w: f64 = xi.iter().zip(ks).map(|(&x, &k)| lp::psi_k(x, k)).product();
        if w == 0.0 {
            Complex64::default()
        } else {
            m(xi) * w
        }
    })?;
    s_norm(&sampled, pad)
}

/// A trilinear multiplier: either an evaluator or a dense table on the product lattice.
pub enum Trilinear<'a> {
    Evaluator(&'a (dyn Fn(f64, f64, f64) -> Complex64 + Sync)),
    /// `m[(j1·n + j2)·n + j3]` over FFT slots of the three inputs.
    Dense(&'a [Complex64]),
}

/// Tabulates `m` on the product lattice; only for `n ≤ DENSE_MAX_N`.
pub fn dense_table(
    grid: &crate::grid::GridSpec,
    m: impl Fn(f64, f64, f64) -> Complex64 + Sync,
) -> Result<Vec<Complex64>> {
    let n = grid.n();
    if n > DENSE_MAX_N {
        let required = n.pow(3) * std::mem::size_of::<Complex64>();
        return Err(Error::MemoryBudget {
            required,
            budget: DENSE_MAX_N.pow(3) * std::mem::size_of::<Complex64>(),
        });
    }
    Ok((0..n * n * n)
        .into_par_iter()
        .map(|flat| {
            let (j1, j2, j3) = (flat / (n * n), (flat / n) % n, flat % n);
            m(grid.xi(j1), grid.xi(j2), grid.xi(j3))
        })
        .collect())
}

/// Direct lattice evaluation of `T_m(f₁, f₂, f₃)`; input frequencies whose sum leaves the
/// lattice are dropped (no wraparound).
pub fn apply_trilinear(
    m: Trilinear<'_>,
    f1: &SpectralField,
    f2: &SpectralField,
    f3: &SpectralField,
) -> Result<SpectralField> {
    f1.same_grid(f2)?;
    f1.same_grid(f3)?;
    let grid = *f1.grid();
    let n = grid.n();
    if let Trilinear::Dense(t) = &m {
        if n > DENSE_MAX_N || t.len() != n * n * n {
            return Err(Error::MemoryBudget {
                required: n.pow(3) * std::mem::size_of::<Complex64>(),
                budget: DENSE_MAX_N.pow(3) * std::mem::size_of::<Complex64>(),
            });
        }
    }
    let (a, b, c) = (f1.coefficients(), f2.coefficients(), f3.coefficients());
    let dxi2 = grid.dxi() * grid.dxi();
    let out: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|jo| {
            let ko = signed_index(jo, n);
            let mut acc = Complex64::default();
            for j1 in 0..n {
                if a[j1].norm_sqr() == 0.0 {
                    continue;
                }
                let k1 = signed_index(j1, n);
                for j2 in 0..n {
                    let Some(j3) = slot_of(ko - k1 - signed_index(j2, n), n) else {
                        continue;
                    };
                    let prod = a[j1] * b[j2] * c[j3];
                    if prod.norm_sqr() == 0.0 {
                        continue;
                    }
                    let w = match &m {
                        Trilinear::Evaluator(f) => f(grid.xi(j1), grid.xi(j2), grid.xi(j3)),
                        Trilinear::Dense(t) => t[(j1 * n + j2) * n + j3],
                    };
                    acc += w * prod;
                }
            }
            acc * dxi2
        })
        .collect();
    SpectralField::from_coefficients(grid, out)
}

/// One random instance of `‖T_m(f₁,f₂,f₃)‖₂ ≤ (2π)^{-3} ‖m‖_S ‖f₁‖₂ ‖f₂‖_∞ ‖f₃‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderTrial {
    pub seed: u64,
    pub lhs: f64,
    pub s_norm: f64,
    /// `(2π)^{-3} ‖m‖_S ‖f₁‖₂ ‖f₂‖_∞ ‖f₃‖_∞`
    pub rhs: f64,
}

impl HolderTrial {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Random real field with spectrum in `|ξ| < 4`, tapered by `φ(ξ/2.5)`.
pub fn random_band_limited(grid: GridSpec, rng: &mut impl Rng) -> SpectralField {
    let coeffs = grid
        .frequencies()
        .into_iter()
        .map(|xi| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if xi.abs() < 4.0 {
                c * lp::phi(xi / 2.5)
            } else {
                Complex64::default()
            }
        })
        .collect();
    let mut f = SpectralField::from_coefficients(grid, coeffs).expect("grid-sized");
    f.symmetrize();
    f
}

struct GaussianTerm {
    amplitude: Complex64,
    center: [f64; 3],
    width: f64,
    modulation: [f64; 3],
}

impl GaussianTerm {
    fn eval(&self, xi: [f64; 3]) -> Complex64 {
        let mut q = 0.0;
        let mut phase = 0.0;
        for i in 0..3 {
            let d = (xi[i] - self.center[i]) / self.width;
            q += d * d;
            phase += self.modulation[i] * xi[i];
        }
        self.amplitude * Complex64::from_polar((-0.5 * q).exp(), phase)
    }
}

const TRIAL_BOX: f64 = 9.0;
const TRIAL_POINTS: usize = 40;

/// Draws a non-separable multiplier (two modulated Gaussian products) and three
/// band-limited fields on `grid`, and evaluates both sides of the bound.
pub fn holder_trial(grid: GridSpec, seed: u64) -> Result<HolderTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<GaussianTerm> = (0..2)
        .map(|_| GaussianTerm {
            amplitude: Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU)),
            center: [(); 3].map(|_| rng.gen_range(-0.75..0.75)),
            width: rng.gen_range(0.8..1.2),
            modulation: [(); 3].map(|_| rng.gen_range(-0.5..0.5)),
        })
        .collect();
    let m = |xi: [f64; 3]| terms.iter().map(|t| t.eval(xi)).sum::<Complex64>();
    let (f1, f2, f3) = (
        random_band_limited(grid, &mut rng),
        random_band_limited(grid, &mut rng),
        random_band_limited(grid, &mut rng),
    );
    let sampled = SampledMultiplier::sample(3, -TRIAL_BOX, TRIAL_BOX, TRIAL_POINTS, |xi| {
        m([xi[0], xi[1], xi[2]])
    })?;
    let s = s_norm(&sampled, 4)?;
    let eval = |a: f64, b: f64, c: f64| m([a, b, c]);
    let lhs = apply_trilinear(Trilinear::Evaluator(&eval), &f1, &f2, &f3)?.l2_norm();
    let rhs = s * (2.0 * std::f64::consts::PI).powi(-3) * f1.l2_norm() * f2.sup_norm() * f3.sup_norm();
    Ok(HolderTrial {
        seed,
        lhs,
        s_norm: s,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn bump(xi: &[f64]) -> Complex64 {
        Complex64::new(xi.iter().map(|&x| lp::phi(x)).product(), 0.0)
    }

    #[test]
    fn tensor_bump_factorises() {
        let one = SampledMultiplier::sample(1, -2.0, 2.0, 32, bump).unwrap();
        let three = SampledMultiplier::sample(3, -2.0, 2.0, 32, bump).unwrap();
        let s1 = s_norm(&one, 4).unwrap();
        let s3 = s_norm(&three, 4).unwrap();
        assert!((s3 - s1.powi(3)).abs() < 1e-10 * s3, "{s3} vs {}", s1.powi(3));
        // sup|m| ≤ (2π)^{-1} ‖m̌‖₁ and sup φ = 1
        assert!(s1 >= 2.0 * std::f64::consts::PI * (1.0 - 1e-9));
    }

    #[test]
    fn refinement_and_dilation() {
        let coarse = s_norm(&SampledMultiplier::sample(1, -2.0, 2.0, 256, bump).unwrap(), 16).unwrap();
        let fine = s_norm(&SampledMultiplier::sample(1, -2.0, 2.0, 512, bump).unwrap(), 32).unwrap();
        assert!((coarse / fine - 1.0).abs() < 1e-2);
        let h = 4.0 / 512.0;
        let wide = SampledMultiplier::sample(1, -8.0, 8.0, 2048, |x| bump(&[x[0] / 4.0])).unwrap();
        assert!((wide.spacing() - h).abs() < 1e-15);
        let dil = s_norm(&wide, 8).unwrap();
        assert!((dil / fine - 1.0).abs() < 1e-2, "{dil} vs {fine}");
    }

    #[test]
    fn edge_check() {
        let flat = SampledMultiplier::sample(1, -1.0, 1.0, 16, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(s_norm(&flat, 4), Err(Error::NonDecayedEdge { .. })));
        let ok = SampledMultiplier::sample(1, -2.0, 2.0, 16, bump).unwrap();
        assert!(s_norm(&ok, 2).is_err());
    }

    fn band_limited(grid: GridSpec, seed: u64) -> SpectralField {
        random_band_limited(grid, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn constant_multiplier_is_pointwise_product() {
        let g = GridSpec::new(64, 16.0).unwrap();
        let (a, b, c) = (band_limited(g, 1), band_limited(g, 2), band_limited(g, 3));
        let one = |_: f64, _: f64, _: f64| Complex64::new(1.0, 0.0);
        let t = apply_trilinear(Trilinear::Evaluator(&one), &a, &b, &c).unwrap();
        let (va, vb, vc) = (a.to_real(), b.to_real(), c.to_real());
        let prod: Vec<f64> = (0..64).map(|i| va[i] * vb[i] * vc[i]).collect();
        let p = SpectralField::from_real(g, &prod).unwrap();
        assert!(t.sub(&p).unwrap().l2_norm() < 1e-12 * p.l2_norm());
        let dx = |x1: f64, x2: f64, x3: f64| Complex64::new(0.0, x1 + x2 + x3);
        let td = apply_trilinear(Trilinear::Evaluator(&dx), &a, &b, &c).unwrap();
        assert!(td.sub(&p.derivative()).unwrap().l2_norm() < 1e-12 * p.derivative().l2_norm());
        let table = dense_table(&g, one).unwrap();
        let t2 = apply_trilinear(Trilinear::Dense(&table), &a, &b, &c).unwrap();
        assert!(t2.sub(&t).unwrap().l2_norm() < 1e-14 * t.l2_norm());
        let big = GridSpec::new(512, 16.0).unwrap();
        assert!(matches!(dense_table(&big, one), Err(Error::MemoryBudget { .. })));
    }

    #[test]
    fn holder_bound_on_random_instances() {
        let g = GridSpec::new(64, 16.0).unwrap();
        for seed in 0..3 {
            let trial = holder_trial(g, seed).unwrap();
            assert!(trial.lhs > 0.0);
            assert!(trial.ratio() <= 1.0 + 1e-9, "{trial:?}");
        }
    }
}
