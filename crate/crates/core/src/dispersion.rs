//! Dispersion symbols.
//!
//! The Whitham symbol is `Λ(ξ) = sign(ξ) sqrt(ξ tanh ξ)`, the full water-wave
//! dispersion at finite depth. It behaves like `ξ - ξ³/6` near the origin and like
//! `sign(ξ)|ξ|^{1/2}` at high frequency. Evaluation below `zero_threshold` switches to
//! the Maclaurin series so that derivatives stay accurate where the closed forms cancel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd Maclaurin coefficients of `ξ sqrt(tanh ξ / ξ)`, indexed by power `1, 3, ..., 15`.
const WHITHAM_SERIES: [(i32, f64); 8] = [
    (1, 1.0),
    (3, -1.0 / 6.0),
    (5, 19.0 / 360.0),
    (7, -55.0 / 3024.0),
    (9, 11813.0 / 1814400.0),
    (11, -2117.0 / 887040.0),
    (13, 64604977.0 / 72648576000.0),
    (15, -263101079.0 / 784604620800.0),
];

pub const DEFAULT_ZERO_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SymbolKind {
    Whitham,
    /// `ξ - ξ³/6`, the long-wave limit of the Whitham symbol.
    KdV,
    /// `sign(ξ)|ξ|^{1+α}`, i.e. `L = |D|^α`.
    FractionalKdV { alpha: f64 },
    /// Deep-water limit `sign(ξ)|ξ|^{1/2}` of the Whitham symbol.
    HalfWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    kind: SymbolKind,
    zero_threshold: f64,
}

impl Default for Symbol {
    fn default() -> Self {
        Symbol::whitham()
    }
}

impl Symbol {
    pub fn whitham() -> Self {
        Symbol {
            kind: SymbolKind::Whitham,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }

    pub fn kdv() -> Self {
        Symbol {
            kind: SymbolKind::KdV,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }

    pub fn half_wave() -> Self {
        Symbol {
            kind: SymbolKind::HalfWave,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }

    /// Fractional KdV comparison symbol; `alpha` must lie in `(-1, 2]`.
    pub fn fractional_kdv(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!(
                "fractional KdV exponent {alpha} outside (-1, 2]"
            )));
        }
        Ok(Symbol {
            kind: SymbolKind::FractionalKdV { alpha },
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        })
    }

    pub fn new(kind: SymbolKind) -> Result<Self> {
        match kind {
            SymbolKind::FractionalKdV { alpha } => Self::fractional_kdv(alpha),
            _ => Ok(Symbol {
                kind,
                zero_threshold: DEFAULT_ZERO_THRESHOLD,
            }),
        }
    }

    pub fn with_zero_threshold(mut self, zero_threshold: f64) -> Result<Self> {
        if !(zero_threshold > 0.0 && zero_threshold <= 0.5) {
            return Err(Error::Domain(format!(
                "zero threshold {zero_threshold} outside (0, 0.5]"
            )));
        }
        self.zero_threshold = zero_threshold;
        Ok(self)
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    /// `Λ^{(order)}(ξ)` for `order` in `0..=3`.
    pub fn eval(&self, xi: f64, order: u32) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!("non-finite frequency {xi}")));
        }
        if order > 3 {
            return Err(Error::UnsupportedOrder(order));
        }
        match self.kind {
            SymbolKind::Whitham => Ok(self.eval_whitham(xi, order)),
            SymbolKind::KdV => Ok(kdv(xi, order)),
            SymbolKind::FractionalKdV { alpha } => power_law(1.0 + alpha, xi, order),
            SymbolKind::HalfWave => power_law(0.5, xi, order),
        }
    }

    /// `Λ(ξ)`; panics only on non-finite input.
    pub fn value(&self, xi: f64) -> f64 {
        self.eval(xi, 0).expect("finite frequency")
    }

    /// The multiplier of `L = Λ(D)/D`, with its limit at `ξ = 0`.
    pub fn operator_symbol(&self, xi: f64) -> Result<f64> {
        if xi == 0.0 {
            return match self.kind {
                SymbolKind::Whitham | SymbolKind::KdV => Ok(1.0),
                SymbolKind::FractionalKdV { alpha } if alpha > 0.0 => Ok(0.0),
                SymbolKind::FractionalKdV { alpha } if alpha == 0.0 => Ok(1.0),
                _ => Err(Error::Domain("L is singular at ξ = 0".into())),
            };
        }
        Ok(self.eval(xi, 0)? / xi)
    }

    /// `ξ / |Λ''(ξ)|`. Odd, tends to `±1` as `ξ → 0±` where `Λ''(ξ) ≃ -ξ`; set to 0 at the origin.
    pub fn xi_over_abs_second(&self, xi: f64) -> Result<f64> {
        match self.kind {
            _ if xi == 0.0 => Ok(0.0),
            SymbolKind::KdV => Ok(xi.signum()),
            SymbolKind::Whitham if xi.abs() < self.zero_threshold => {
                // Λ''(ξ)/ξ = Σ c_m m(m-1) ξ^{m-3}, m ≥ 3
                let x2 = xi * xi;
                let mut acc = 0.0;
                for &(m, c) in WHITHAM_SERIES.iter().skip(1).rev() {
                    acc = acc * x2 + c * (m * (m - 1)) as f64;
                }
                Ok(xi.signum() / acc.abs())
            }
            _ => {
                let second = self.eval(xi, 2)?;
                if second.abs() < 1e-14 {
                    return Err(Error::NearSingular {
                        which: "Λ''(ξ)",
                        value: second,
                        tol: 1e-14,
                    });
                }
                Ok(xi / second.abs())
            }
        }
    }

    /// `Λ(a) + Λ(b) - Λ(a + b)` for `a, b ≥ 0`, evaluated without catastrophic
    /// cancellation (binomial series near the origin, tanh addition formula elsewhere).
    pub fn two_wave_defect(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            SymbolKind::Whitham => {
                if a + b < self.zero_threshold {
                    whitham_defect_series(a, b)
                } else {
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    self.eval_whitham(a, 0) - whitham_increment(a, b)
                }
            }
            SymbolKind::KdV => 0.5 * a * b * (a + b),
            _ => self.value(a) + self.value(b) - self.value(a + b),
        }
    }

    /// The unique `ξ₀ > 0` with `Λ'(ξ₀) = c`.
    pub fn invert_group_velocity(&self, c: f64) -> Result<f64> {
        if !c.is_finite() {
            return Err(Error::Domain(format!("non-finite group velocity {c}")));
        }
        match self.kind {
            SymbolKind::Whitham => self.invert_whitham(c),
            SymbolKind::KdV => {
                if c >= 1.0 {
                    return Err(Error::OutOfRange {
                        c,
                        range: "(-inf, 1)".into(),
                    });
                }
                Ok((2.0 * (1.0 - c)).sqrt())
            }
            SymbolKind::FractionalKdV { alpha } => invert_power_law(1.0 + alpha, c),
            SymbolKind::HalfWave => invert_power_law(0.5, c),
        }
    }

    fn invert_whitham(&self, c: f64) -> Result<f64> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::OutOfRange {
                c,
                range: "(0, 1)".into(),
            });
        }
        let dlam = |x: f64| self.eval_whitham(x, 1);
        let mut lo = 0.0;
        let mut hi = 1.0;
        while dlam(hi) > c {
            lo = hi;
            hi *= 2.0;
        }
        // Safeguarded Newton on g(ξ) = Λ'(ξ) - c, which is decreasing on (0, ∞).
        let mut x = 0.5 * (lo + hi);
        for _ in 0..300 {
            let g = dlam(x) - c;
            if g == 0.0 {
                return Ok(x);
            }
            if g > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.eval_whitham(x, 2);
            let newton = x - g / slope;
            let next = if slope < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE)
                || hi - lo <= 4.0 * f64::EPSILON * hi
            {
                x = next;
                break;
            }
            x = next;
        }
        Ok(x)
    }

    fn eval_whitham(&self, xi: f64, order: u32) -> f64 {
        if xi.abs() < self.zero_threshold {
            return whitham_series(xi, order);
        }
        let x = xi.abs();
        let v = whitham_direct(x, order);
        // Λ^{(k)}(-ξ) = (-1)^{k+1} Λ^{(k)}(ξ)
        if xi < 0.0 && order % 2 == 0 {
            -v
        } else {
            v
        }
    }
}

fn whitham_series(xi: f64, order: u32) -> f64 {
    let k = order as i32;
    let mut acc = 0.0;
    for &(m, c) in WHITHAM_SERIES.iter().rev() {
        if m < k {
            continue;
        }
        let mut falling = 1.0;
        for j in 0..k {
            falling *= (m - j) as f64;
        }
        acc += c * falling * xi.powi(m - k);
    }
    acc
}

/// Closed-form derivatives of `sqrt(s)`, `s = ξ tanh ξ`, for `ξ > 0`.
fn whitham_direct(x: f64, order: u32) -> f64 {
    let t = x.tanh();
    let sech = 1.0 / x.cosh();
    let sech2 = sech * sech;
    let s = x * t;
    let root = s.sqrt();
    if order == 0 {
        return root;
    }
    let s1 = t + x * sech2;
    if order == 1 {
        return s1 / (2.0 * root);
    }
    let s2 = 2.0 * sech2 - 2.0 * x * t * sech2;
    if order == 2 {
        return s2 / (2.0 * root) - s1 * s1 / (4.0 * s * root);
    }
    let s3 = -6.0 * t * sech2 - 2.0 * x * sech2 * sech2 + 4.0 * x * t * t * sech2;
    s3 / (2.0 * root) - 3.0 * s1 * s2 / (4.0 * s * root) + 3.0 * s1 * s1 * s1 / (8.0 * s * s * root)
}

fn whitham_defect_series(a: f64, b: f64) -> f64 {
    // a^m + b^m - (a+b)^m = -Σ_{j=1}^{m-1} C(m,j) a^j b^{m-j}: no cancellation.
    let mut acc = 0.0;
    for &(m, c) in WHITHAM_SERIES.iter().skip(1).rev() {
        let mut binom = 1.0;
        let mut cross = 0.0;
        for j in 1..m {
            binom = binom * (m - j + 1) as f64 / j as f64;
            cross += binom * a.powi(j) * b.powi(m - j);
        }
        acc -= c * cross;
    }
    acc
}

/// `Λ(a+b) - Λ(b)` for `0 ≤ a ≤ b`, via `tanh(a+b) - tanh b = tanh a (1 - tanh(a+b) tanh b)`.
fn whitham_increment(a: f64, b: f64) -> f64 {
    let tab = (a + b).tanh();
    let e_b = (-2.0 * b).exp();
    let e_ab = (-2.0 * (a + b)).exp();
    // 1 - tanh(a+b) tanh(b) = cosh(a) / (cosh(a+b) cosh(b))
    let k = 2.0 * (e_b + e_ab) / ((1.0 + e_ab) * (1.0 + e_b));
    let num = a * tab + b * a.tanh() * k;
    num / (whitham_direct(a + b, 0) + if b > 0.0 { whitham_direct(b, 0) } else { 0.0 })
}

fn kdv(xi: f64, order: u32) -> f64 {
    match order {
        0 => xi - xi * xi * xi / 6.0,
        1 => 1.0 - 0.5 * xi * xi,
        2 => -xi,
        _ => -1.0,
    }
}

fn power_law(p: f64, xi: f64, order: u32) -> Result<f64> {
    let k = order as i32;
    let mut coeff = 1.0;
    for j in 0..k {
        coeff *= p - j as f64;
    }
    let expo = p - k as f64;
    if xi == 0.0 {
        if coeff == 0.0 || expo > 0.0 {
            return Ok(0.0);
        }
        if expo == 0.0 && order % 2 == 1 {
            return Ok(coeff);
        }
        return Err(Error::Domain(format!(
            "derivative of order {order} of sign(ξ)|ξ|^{p} is singular at ξ = 0"
        )));
    }
    let mag = coeff * xi.abs().powf(expo);
    Ok(if xi < 0.0 && order % 2 == 0 { -mag } else { mag })
}

fn invert_power_law(p: f64, c: f64) -> Result<f64> {
    let alpha = p - 1.0;
    if alpha == 0.0 || c <= 0.0 {
        return Err(Error::OutOfRange {
            c,
            range: if alpha == 0.0 {
                "{1} (constant group velocity)".into()
            } else {
                "(0, inf)".into()
            },
        });
    }
    Ok((c / p).powf(1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from 40-digit evaluations of sqrt(ξ tanh ξ) and its derivatives.
    const LAMBDA_1: f64 = 0.872_693_620_897_829_7;
    const DLAMBDA_1: f64 = 0.676_966_388_475_596_9;
    const LAMBDA_0P01: f64 = 0.009_999_833_338_610_929;

    #[test]
    fn reference_values() {
        let s = Symbol::whitham();
        assert!((s.eval(0.01, 0).unwrap() - LAMBDA_0P01).abs() < 1e-17);
        assert!((s.eval(0.01, 0).unwrap() - (0.01 - 1e-6 / 6.0)).abs() < 1e-10);
        assert_eq!(s.eval(0.0, 1).unwrap(), 1.0);
        assert!((s.eval(1.0, 0).unwrap() - LAMBDA_1).abs() < 1e-15);
        assert!((s.eval(1.0, 1).unwrap() - DLAMBDA_1).abs() < 1e-15);
    }

    #[test]
    fn high_precision_table() {
        // (ξ, [Λ, Λ', Λ'', Λ''']) at 40 digits, rounded.
        let table: [(f64, [f64; 4]); 4] = [
            (
                0.05,
                [
                    0.049_979_183_145_525_684,
                    0.998_751_647_318_547_9,
                    -0.049_868_293_905_118_96,
                    -0.992_107_153_681_554_8,
                ],
            ),
            (
                0.5,
                [
                    0.480_685_529_873_746_96,
                    0.889_709_561_225_642_2,
                    -0.388_717_475_571_546_6,
                    -0.403_711_612_240_113_05,
                ],
            ),
            (
                3.0,
                [
                    1.727_762_790_738_413_6,
                    0.296_525_909_307_588_9,
                    -0.062_226_898_186_565_7,
                    0.048_747_488_023_179_1,
                ],
            ),
            (
                40.0,
                [
                    6.324_555_320_336_759,
                    0.079_056_941_504_209_48,
                    -0.000_988_211_768_802_618_5,
                    0.000_037_057_941_330_098_2,
                ],
            ),
        ];
        let s = Symbol::whitham();
        for (xi, vals) in table {
            for (k, v) in vals.iter().enumerate() {
                let got = s.eval(xi, k as u32).unwrap();
                assert!(
                    (got - v).abs() <= 1e-12 * (1.0 + v.abs()),
                    "ξ={xi} order={k}: {got} vs {v}"
                );
            }
        }
    }

    #[test]
    fn errors() {
        let s = Symbol::whitham();
        assert!(matches!(s.eval(f64::NAN, 0), Err(Error::Domain(_))));
        assert!(matches!(s.eval(f64::INFINITY, 1), Err(Error::Domain(_))));
        assert!(matches!(s.eval(1.0, 4), Err(Error::UnsupportedOrder(4))));
        assert!(Symbol::fractional_kdv(-1.0).is_err());
        assert!(Symbol::fractional_kdv(2.5).is_err());
        let f = Symbol::fractional_kdv(-0.5).unwrap();
        assert!(f.eval(0.0, 1).is_err());
        assert_eq!(f.eval(0.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn crossover_is_continuous() {
        let s = Symbol::whitham();
        let th = s.zero_threshold();
        for order in 0..4 {
            let series = whitham_series(th, order);
            let direct = whitham_direct(th, order);
            assert!(
                (series - direct).abs() < 1e-12,
                "order {order}: {series} vs {direct}"
            );
        }
    }

    #[test]
    fn inversion() {
        let s = Symbol::whitham();
        let x = s.invert_group_velocity(DLAMBDA_1).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
        // 40-digit root of Λ'(ξ) = 1/2
        let x = s.invert_group_velocity(0.5).unwrap();
        assert!((x - 1.517_362_812_181_836_9).abs() < 1e-12);
        let x = s.invert_group_velocity(1.0 - 1e-8).unwrap();
        assert!(x > 0.0 && x < 1e-3);
        assert!((s.eval(x, 1).unwrap() - (1.0 - 1e-8)).abs() < 1e-12);
        assert!(s.invert_group_velocity(1.0).is_err());
        assert!(s.invert_group_velocity(0.0).is_err());
        assert!(s.invert_group_velocity(-0.3).is_err());
    }

    #[test]
    fn comparison_symbols() {
        let k = Symbol::kdv();
        assert_eq!(k.eval(2.0, 0).unwrap(), 2.0 - 8.0 / 6.0);
        assert!((k.invert_group_velocity(0.5).unwrap() - 1.0).abs() < 1e-15);
        let h = Symbol::half_wave();
        assert!((h.eval(4.0, 0).unwrap() - 2.0).abs() < 1e-15);
        assert!((h.eval(-4.0, 0).unwrap() + 2.0).abs() < 1e-15);
        assert!((h.eval(4.0, 1).unwrap() - 0.25).abs() < 1e-15);
        let x = h.invert_group_velocity(0.25).unwrap();
        assert!((x - 4.0).abs() < 1e-12);
    }

    #[test]
    fn defect_matches_direct_away_from_cancellation() {
        let s = Symbol::whitham();
        for &(a, b) in &[(1.0, 1.0), (0.3, 2.0), (5.0, 7.0), (0.01, 0.02), (0.2, 0.2)] {
            let direct = s.value(a) + s.value(b) - s.value(a + b);
            let stable = s.two_wave_defect(a, b);
            assert!((direct - stable).abs() < 1e-13 * (1.0 + direct.abs()));
        }
        let two = s.two_wave_defect(1.0, 1.0);
        assert!((two - 0.356_842_982_453_655_6).abs() < 1e-14);
    }

    #[test]
    fn xi_over_second_limit() {
        let s = Symbol::whitham();
        assert!((s.xi_over_abs_second(1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.xi_over_abs_second(-1e-9).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(s.xi_over_abs_second(0.0).unwrap(), 0.0);
        let inside = s.xi_over_abs_second(0.0499999).unwrap();
        let outside = s.xi_over_abs_second(0.0500001).unwrap();
        assert!((inside - outside).abs() < 1e-6);
    }
}
