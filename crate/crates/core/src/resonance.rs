//! The four-wave resonance function
//! `Φ(ξ,η,σ) = Λ(ξ) - Λ(ξ-η-σ) - Λ(η) - Λ(σ)`, lower-bound scans for the two-, three- and
//! four-wave resonance inequalities, and the `Φ_ξ = m₁Φ + m₂Φ_η + m₃Φ_σ` decomposition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::Symbol;
use crate::error::{Error, Result};

/// Guard on the quotient denominators of the decomposition.
pub const DEFAULT_DENOMINATOR_GUARD: f64 = 1e-8;

/// `k` at which the four-wave lower bound switches from `2^{3k}` to `2^{k/2}`.
pub const DEFAULT_REGIME_SPLIT: i32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonancePoint {
    pub xi: f64,
    pub eta: f64,
    pub sigma: f64,
    /// `(ι₁, ι₂, ι₃)`: channels of the inputs at `ξ-η-σ`, `η`, `σ`.
    pub signs: [Sign; 3],
}

impl ResonancePoint {
    pub fn new(xi: f64, eta: f64, sigma: f64) -> Self {
        ResonancePoint {
            xi,
            eta,
            sigma,
            signs: [Sign::Plus; 3],
        }
    }

    pub fn with_signs(mut self, signs: [Sign; 3]) -> Self {
        self.signs = signs;
        self
    }

    /// `ξ - η - σ`.
    pub fn zeta(&self) -> f64 {
        self.xi - self.eta - self.sigma
    }

    pub fn negated(&self) -> Self {
        ResonancePoint {
            xi: -self.xi,
            eta: -self.eta,
            sigma: -self.sigma,
            signs: self.signs,
        }
    }
}

/// `Φ` at `p`.
pub fn phi(sym: &Symbol, p: &ResonancePoint) -> f64 {
    sym.value(p.xi) - sym.value(p.zeta()) - sym.value(p.eta) - sym.value(p.sigma)
}

/// `(Φ_ξ, Φ_η, Φ_σ)`.
pub fn gradient(sym: &Symbol, p: &ResonancePoint) -> [f64; 3] {
    let d = |x: f64| sym.eval(x, 1).expect("finite frequency");
    let dz = d(p.zeta());
    [d(p.xi) - dz, dz - d(p.eta), dz - d(p.sigma)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhixiDecomposition {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `|Φ_ξ - (m₁Φ + m₂Φ_η + m₃Φ_σ)|`
    pub residual: f64,
    pub phi_xi: f64,
}

impl PhixiDecomposition {
    pub fn relative_residual(&self) -> f64 {
        self.residual / (1.0 + self.phi_xi.abs())
    }
}

/// Evaluates the three quotient multipliers literally and the identity's residual.
///
/// The identity requires `ξ ≥ 0` (the first denominator uses `Λ(|ξ|)`) and exactly one
/// minus sign among `ι₁, ι₂, ι₃`.
pub fn phixi_decomposition(sym: &Symbol, p: &ResonancePoint) -> Result<PhixiDecomposition> {
    phixi_decomposition_guarded(sym, p, DEFAULT_DENOMINATOR_GUARD)
}

pub fn phixi_decomposition_guarded(
    sym: &Symbol,
    p: &ResonancePoint,
    guard: f64,
) -> Result<PhixiDecomposition> {
    let [i1, i2, i3] = p.signs.map(Sign::value);
    if i1 + i2 + i3 != 1.0 {
        return Err(Error::Domain(format!(
            "decomposition needs ι₁+ι₂+ι₃ = 1, got {:?}",
            p.signs
        )));
    }
    if !(p.xi >= 0.0) {
        return Err(Error::Domain(format!(
            "decomposition needs ξ ≥ 0, got {}",
            p.xi
        )));
    }
    let zeta = p.zeta();
    if ![p.xi, p.eta, p.sigma, zeta].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("non-finite frequency".into()));
    }
    let lam = |x: f64| sym.value(x);
    let d1 = |x: f64| sym.eval(x, 1).expect("finite frequency");

    let check = |which: &'static str, value: f64| {
        if value.abs() < guard {
            Err(Error::NearSingular {
                which,
                value,
                tol: guard,
            })
        } else {
            Ok(value)
        }
    };
    let den1 = check("Λ(|ξ|) - ι₁Λ(ξ-η-σ)", lam(p.xi.abs()) - i1 * lam(zeta))?;
    let den2 = check("Λ'(η) - Λ'(ξ-η-σ)", d1(p.eta) - d1(zeta))?;
    let den3 = check("Λ'(σ) - Λ'(ξ-η-σ)", d1(p.sigma) - d1(zeta))?;

    let [phi_xi, phi_eta, phi_sigma] = gradient(sym, p);
    let m1 = phi_xi / den1;
    let m2 = -i2 * m1 * (i2 * lam(p.eta) - i1 * lam(zeta)) / den2;
    let m3 = -i3 * m1 * (i3 * lam(p.sigma) - i1 * lam(zeta)) / den3;
    let residual = (phi_xi - (m1 * phi(sym, p) + m2 * phi_eta + m3 * phi_sigma)).abs();
    Ok(PhixiDecomposition {
        m1,
        m2,
        m3,
        residual,
        phi_xi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples: usize,
    pub min_ratio: f64,
    pub argmin: Vec<f64>,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
    /// Samples that fell outside the admissible region and were redrawn or skipped.
    pub rejected: usize,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.min_ratio > 0.0 && self.max_ratio.is_finite()
    }

    fn empty() -> Self {
        BoundReport {
            samples: 0,
            min_ratio: f64::INFINITY,
            argmin: vec![],
            max_ratio: f64::NEG_INFINITY,
            argmax: vec![],
            rejected: 0,
        }
    }

    fn push(&mut self, ratio: f64, point: &[f64]) {
        self.samples += 1;
        if ratio < self.min_ratio {
            self.min_ratio = ratio;
            self.argmin = point.to_vec();
        }
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.argmax = point.to_vec();
        }
    }

    /// Merges shard reports in order; ties keep the earlier shard's witness.
    fn merge(mut self, other: BoundReport) -> Self {
        self.samples += other.samples;
        self.rejected += other.rejected;
        if other.min_ratio < self.min_ratio {
            self.min_ratio = other.min_ratio;
            self.argmin = other.argmin;
        }
        if other.max_ratio > self.max_ratio {
            self.max_ratio = other.max_ratio;
            self.argmax = other.argmax;
        }
        self
    }
}

/// Comparand `a^{1/2} (a∧1)^{1/2} (b∧1)²` shared by the two- and three-wave bounds.
pub fn wave_comparand(a: f64, b: f64) -> f64 {
    a.sqrt() * a.min(1.0).sqrt() * b.min(1.0).powi(2)
}

/// `Λ(a) + Λ(b) + Λ(c) - Λ(a+b+c)` for non-negative inputs, without cancellation.
pub fn three_wave_defect(sym: &Symbol, a: f64, b: f64, c: f64) -> f64 {
    sym.two_wave_defect(a, b) + sym.two_wave_defect(c, a + b)
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64 + 1);
    rng
}

fn check_box(bound: f64, samples: usize) -> Result<()> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::DegenerateBox(format!("box edge must be positive, got {bound}")));
    }
    if samples == 0 {
        return Err(Error::DegenerateBox("at least one sample is required".into()));
    }
    Ok(())
}

/// Scans `[Λ(a)+Λ(b)-Λ(a+b)] / [a^{1/2}(a∧1)^{1/2}(b∧1)²]` over `0 < a ≤ b ≤ B` with
/// jittered stratified samples (one per cell of a square grid over `[0,B]²`, folded onto
/// the triangle).
pub fn check_two_wave_bound(sym: &Symbol, bound: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    check_box(bound, samples)?;
    let m = (samples as f64).sqrt().ceil() as usize;
    let h = bound / m as f64;
    let report = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i);
            let mut r = BoundReport::empty();
            for j in 0..m {
                if i * m + j >= samples {
                    break;
                }
                let x = h * (i as f64 + rng.gen::<f64>());
                let y = h * (j as f64 + rng.gen::<f64>());
                let (a, b) = if x <= y { (x, y) } else { (y, x) };
                if a <= 0.0 {
                    r.rejected += 1;
                    continue;
                }
                let ratio = sym.two_wave_defect(a, b) / wave_comparand(a, b);
                r.push(ratio, &[a, b]);
            }
            r
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(BoundReport::empty(), BoundReport::merge);
    Ok(report)
}

/// As [`check_two_wave_bound`] for `[Λ(a)+Λ(b)+Λ(c)-Λ(a+b+c)]` over `0 ≤ c ≤ a ≤ b ≤ B`,
/// with the same comparand.
pub fn check_three_wave_bound(sym: &Symbol, bound: f64, samples: usize, seed: u64) -> Result<BoundReport> {
    check_box(bound, samples)?;
    let m = (samples as f64).cbrt().ceil() as usize;
    let h = bound / m as f64;
    let report = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i);
            let mut r = BoundReport::empty();
            for j in 0..m {
                for l in 0..m {
                    if (i * m + j) * m + l >= samples {
                        break;
                    }
                    let mut v = [
                        h * (i as f64 + rng.gen::<f64>()),
                        h * (j as f64 + rng.gen::<f64>()),
                        h * (l as f64 + rng.gen::<f64>()),
                    ];
                    v.sort_by(f64::total_cmp);
                    let [c, a, b] = v;
                    if a <= 0.0 {
                        r.rejected += 1;
                        continue;
                    }
                    let ratio = three_wave_defect(sym, a, b, c) / wave_comparand(a, b);
                    r.push(ratio, &[c, a, b]);
                }
            }
            r
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(BoundReport::empty(), BoundReport::merge);
    Ok(report)
}

/// `Σ Λ(ξᵢ)` for a zero-sum quadruple in which `ξ₄` is the small frequency, evaluated
/// through the two-/three-wave defects of the sign channel.
pub fn four_wave_sum(sym: &Symbol, xis: [f64; 4]) -> f64 {
    let [x1, x2, x3, x4] = xis;
    // Orient so that two of the three large frequencies are positive.
    let positives = [x1, x2, x3].iter().filter(|v| **v > 0.0).count();
    let (s, [y1, y2, y3, y4]) = if positives >= 2 {
        (1.0, xis)
    } else {
        (-1.0, [-x1, -x2, -x3, -x4])
    };
    let mut big = [y1, y2, y3];
    big.sort_by(f64::total_cmp);
    let [neg, a, b] = big;
    if neg >= 0.0 || a <= 0.0 {
        // not a (+,+,-) configuration: fall back to the direct sum
        return xis.iter().map(|&x| sym.value(x)).sum();
    }
    let value = if y4 >= 0.0 {
        three_wave_defect(sym, a, b, y4)
    } else {
        sym.two_wave_defect(a, b) - sym.two_wave_defect(-neg, -y4)
    };
    s * value
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparand {
    /// `2^{3k}`
    Low,
    /// `2^{k/2}`
    High,
}

impl Comparand {
    pub fn for_k(k: i32, split: i32) -> Self {
        if k >= split {
            Comparand::High
        } else {
            Comparand::Low
        }
    }

    pub fn value(self, k: i32) -> f64 {
        match self {
            Comparand::Low => (3.0 * k as f64).exp2(),
            Comparand::High => (0.5 * k as f64).exp2(),
        }
    }
}

/// Lower-bound scan of `|Σ Λ(ξᵢ)|` over quadruples with `|ξ₁|,|ξ₂|,|ξ₃| ∈ [2^{k-1}, 2^{k+1}]`,
/// `|ξ₄| ≤ 2^{k-5}` and `Σ ξᵢ = 0`, using the comparand of the regime of `k`.
pub fn check_four_wave_bound(sym: &Symbol, k: i32, samples: usize, seed: u64) -> Result<BoundReport> {
    check_four_wave_bound_against(sym, k, samples, seed, Comparand::for_k(k, DEFAULT_REGIME_SPLIT))
}

pub fn check_four_wave_bound_against(
    sym: &Symbol,
    k: i32,
    samples: usize,
    seed: u64,
    comparand: Comparand,
) -> Result<BoundReport> {
    if samples == 0 {
        return Err(Error::DegenerateBox("at least one sample is required".into()));
    }
    let scale = (k as f64).exp2();
    let lo = 0.5 * scale;
    let hi = 2.0 * scale;
    let small = scale / 32.0;
    let norm = comparand.value(k);
    const SHARDS: usize = 64;
    let per = samples.div_ceil(SHARDS);
    let report = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_rng(seed, shard);
            let mut r = BoundReport::empty();
            let want = per.min(samples.saturating_sub(shard * per));
            let mut attempts = 0usize;
            while r.samples < want && attempts < 50 * want.max(1) {
                attempts += 1;
                // (+,+,-) channel up to a global sign; ξ₃ is solved from the constraint
                let x1 = rng.gen_range(lo..=hi);
                let x2 = rng.gen_range(lo..=hi);
                let x4 = rng.gen_range(-small..=small);
                let x3 = -(x1 + x2 + x4);
                if !(lo..=hi).contains(&x3.abs()) {
                    r.rejected += 1;
                    continue;
                }
                let mut q = [x1, x2, x3, x4];
                if rng.gen::<bool>() {
                    q = q.map(|v| -v);
                }
                let ratio = four_wave_sum(sym, q).abs() / norm;
                r.push(ratio, &q);
            }
            r
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(BoundReport::empty(), BoundReport::merge);
    if report.samples == 0 {
        return Err(Error::InfeasibleSample(format!(
            "no zero-sum quadruple found in the band k = {k}"
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhixiScan {
    pub accepted: usize,
    pub rejected: usize,
    pub max_relative_residual: f64,
    /// Largest sampled `2^k |m₁|`.
    pub m1_scaled: f64,
    pub m2: f64,
    pub m3: f64,
}

/// Samples the decomposition at random points with `ξ ∈ [0, B]`, `η, σ ∈ [-B, B]` and a
/// random admissible sign channel; points failing the guard are rejected.
pub fn phixi_residual_scan(sym: &Symbol, bound: f64, points: usize, seed: u64) -> Result<PhixiScan> {
    check_box(bound, points)?;
    let channels = [
        [Sign::Minus, Sign::Plus, Sign::Plus],
        [Sign::Plus, Sign::Minus, Sign::Plus],
        [Sign::Plus, Sign::Plus, Sign::Minus],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = PhixiScan {
        accepted: 0,
        rejected: 0,
        max_relative_residual: 0.0,
        m1_scaled: 0.0,
        m2: 0.0,
        m3: 0.0,
    };
    while scan.accepted < points {
        let p = ResonancePoint::new(
            rng.gen_range(0.0..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        )
        .with_signs(channels[rng.gen_range(0..3)]);
        match phixi_decomposition(sym, &p) {
            Ok(d) => {
                scan.accepted += 1;
                scan.max_relative_residual = scan.max_relative_residual.max(d.relative_residual());
            }
            Err(Error::NearSingular { .. }) => scan.rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(scan)
}

/// Sampled sizes of `m₁, m₂, m₃` in the comparable-frequency region
/// `|ξ| ≃ |ξ-η-σ| ≃ |η| ≃ |σ| ≃ 2^k` (all four in `[2^{k-1}, 2^{k+1}]`), channel `(-,+,+)`.
pub fn phixi_multiplier_scan(sym: &Symbol, k: i32, points: usize, seed: u64) -> Result<PhixiScan> {
    let scale = (k as f64).exp2();
    let (lo, hi) = (0.5 * scale, 2.0 * scale);
    let signs = [Sign::Minus, Sign::Plus, Sign::Plus];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = PhixiScan {
        accepted: 0,
        rejected: 0,
        max_relative_residual: 0.0,
        m1_scaled: 0.0,
        m2: 0.0,
        m3: 0.0,
    };
    let mut attempts = 0usize;
    while scan.accepted < points {
        attempts += 1;
        if attempts > 1000 * points.max(1) {
            return Err(Error::InfeasibleSample(format!("comparable region at k = {k}")));
        }
        let mag = |r: &mut ChaCha8Rng| {
            let v = r.gen_range(lo..=hi);
            if r.gen::<bool>() {
                v
            } else {
                -v
            }
        };
        let xi = rng.gen_range(lo..=hi);
        let eta = mag(&mut rng);
        let sigma = mag(&mut rng);
        let p = ResonancePoint::new(xi, eta, sigma).with_signs(signs);
        if !(lo..=hi).contains(&p.zeta().abs()) {
            scan.rejected += 1;
            continue;
        }
        match phixi_decomposition(sym, &p) {
            Ok(d) => {
                scan.accepted += 1;
                scan.max_relative_residual = scan.max_relative_residual.max(d.relative_residual());
                scan.m1_scaled = scan.m1_scaled.max(d.m1.abs() * scale);
                scan.m2 = scan.m2.max(d.m2.abs());
                scan.m3 = scan.m3.max(d.m3.abs());
            }
            Err(Error::NearSingular { .. }) => scan.rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Symbol {
        Symbol::whitham()
    }

    #[test]
    fn phi_values() {
        let s = w();
        assert_eq!(phi(&s, &ResonancePoint::new(0.0, 0.0, 0.0)), 0.0);
        // ξ = 2, η = σ = 1: Λ(2) - 2Λ(1) with ξ-η-σ = 0
        let v = phi(&s, &ResonancePoint::new(2.0, 1.0, 1.0));
        assert!((v + 0.3568429824536556).abs() < 1e-14);
        let p = ResonancePoint::new(0.7, -1.3, 2.2);
        assert!((phi(&s, &p) + phi(&s, &p.negated())).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = w();
        let p = ResonancePoint::new(0.9, -0.4, 1.7);
        let g = gradient(&s, &p);
        let h = 1e-6;
        let f = |dx: f64, de: f64, ds: f64| {
            phi(&s, &ResonancePoint::new(p.xi + dx, p.eta + de, p.sigma + ds))
        };
        let fd = [
            (f(h, 0.0, 0.0) - f(-h, 0.0, 0.0)) / (2.0 * h),
            (f(0.0, h, 0.0) - f(0.0, -h, 0.0)) / (2.0 * h),
            (f(0.0, 0.0, h) - f(0.0, 0.0, -h)) / (2.0 * h),
        ];
        for i in 0..3 {
            assert!((g[i] - fd[i]).abs() < 1e-8, "{i}: {} vs {}", g[i], fd[i]);
        }
    }

    #[test]
    fn two_and_three_wave_reference_values() {
        let s = w();
        assert!((s.two_wave_defect(1.0, 1.0) - 0.3568429824536556).abs() < 1e-14);
        assert!((three_wave_defect(&s, 1.0, 1.0, 1.0) - 0.8903180719550754).abs() < 1e-14);
        assert_eq!(three_wave_defect(&s, 0.7, 2.0, 0.0), s.two_wave_defect(0.7, 2.0));
        // a → 0 with b = 1: the ratio tends to 1 - Λ'(1)
        let lim = 1.0 - s.eval(1.0, 1).unwrap();
        let r = s.two_wave_defect(1e-9, 1.0) / wave_comparand(1e-9, 1.0);
        assert!((r - lim).abs() < 1e-8);
    }

    #[test]
    fn four_wave_reference_value() {
        let s = w();
        let v = four_wave_sum(&s, [1.0, 1.1, -1.05, -1.05]);
        assert!((v + 0.0009976648088115053).abs() < 1e-15, "{v}");
        let direct: f64 = [1.0, 1.1, -1.05, -1.05].iter().map(|&x| s.value(x)).sum();
        assert!((v - direct).abs() < 1e-14);
        let q = [1.3, 0.9, -2.25, 0.05];
        let direct: f64 = q.iter().map(|&x| s.value(x)).sum();
        assert!((four_wave_sum(&s, q) - direct).abs() < 1e-14);
        assert!((four_wave_sum(&s, q.map(|x| -x)) + direct).abs() < 1e-14);
    }

    #[test]
    fn small_scans_hold() {
        let s = w();
        let r2 = check_two_wave_bound(&s, 10.0, 10_000, 1).unwrap();
        assert!(r2.holds());
        assert_eq!(r2.samples + r2.rejected, 10_000);
        let r3 = check_three_wave_bound(&s, 10.0, 8_000, 1).unwrap();
        assert!(r3.holds());
        for k in [-10, 0, 5, 12] {
            let r4 = check_four_wave_bound(&s, k, 2_000, 7).unwrap();
            assert!(r4.holds(), "k={k}");
        }
        assert!(matches!(
            check_two_wave_bound(&s, 0.0, 10, 1),
            Err(Error::DegenerateBox(_))
        ));
    }

    #[test]
    fn scans_are_deterministic() {
        let s = w();
        let a = check_two_wave_bound(&s, 10.0, 4_096, 3).unwrap();
        let b = check_two_wave_bound(&s, 10.0, 4_096, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decomposition_identity() {
        let s = w();
        let p = ResonancePoint::new(1.3, 0.4, -0.8).with_signs([Sign::Plus, Sign::Minus, Sign::Plus]);
        let d = phixi_decomposition(&s, &p).unwrap();
        assert!(d.relative_residual() < 1e-12, "{d:?}");
        let sym_pt = ResonancePoint::new(1.3, 0.4, 0.4).with_signs([Sign::Minus, Sign::Plus, Sign::Plus]);
        let d = phixi_decomposition(&s, &sym_pt).unwrap();
        assert_eq!(d.m2, d.m3);
        let bad = p.with_signs([Sign::Minus, Sign::Minus, Sign::Plus]);
        assert!(matches!(phixi_decomposition(&s, &bad), Err(Error::Domain(_))));
        // η = ξ - η - σ makes Λ'(η) - Λ'(ξ-η-σ) vanish
        let sing = ResonancePoint::new(1.0, 0.25, 0.5).with_signs([Sign::Plus, Sign::Plus, Sign::Minus]);
        assert!(matches!(
            phixi_decomposition(&s, &sing),
            Err(Error::NearSingular { which, .. }) if which.starts_with("Λ'(η)")
        ));
    }

    #[test]
    fn residual_scan() {
        let scan = phixi_residual_scan(&w(), 10.0, 2_000, 11).unwrap();
        assert_eq!(scan.accepted, 2_000);
        assert!(scan.max_relative_residual < 1e-10);
        let m = phixi_multiplier_scan(&w(), 2, 500, 5).unwrap();
        assert!(m.m1_scaled.is_finite() && m.m2.is_finite());
    }
}
