//! Pseudospectral integrator for `u_t - L u_x = ±(u³)_x`, `L = Λ(D)/D`.
//!
//! In Fourier variables `û_t = iΛ(ξ)û + s·iξ F[u³]` with `s = +1` (defocusing, the default),
//! `s = -1` (focusing) or `s = 0` (linear). The linear part is integrated exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use log::{debug, warn};
use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::dispersion::Symbol;
use crate::error::{Error, Result};
use crate::grid::{forward_plan, inverse_plan, signed_index, slot_of, GridSpec, SpectralField};
use crate::lp::{project, Band};
use crate::norms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Integrating-factor (Lawson) RK4.
    Ifrk4,
    /// Cox–Matthews exponential time differencing RK4.
    Etdrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dealias {
    /// Keep `|j| < n/3` in the input and output of the cubic term.
    TwoThirds,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nonlinearity {
    Defocusing,
    Focusing,
    Off,
}

impl Nonlinearity {
    pub fn sign(self) -> f64 {
        match self {
            Nonlinearity::Defocusing => 1.0,
            Nonlinearity::Focusing => -1.0,
            Nonlinearity::Off => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    /// `u₀(x) = ε exp(-(x - center)² / (2 width²))`
    Gaussian { width: f64, center: f64 },
    /// `û₀ = ε·c` for the given coefficients (FFT order, continuous normalisation).
    Spectral(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    pub epsilon: f64,
    pub ic: InitialCondition,
    pub nonlinearity: Nonlinearity,
    pub symbol: Symbol,
    /// Blowup ceiling as a multiple of `ε`.
    pub blowup_factor: f64,
    pub sobolev_index: f64,
    pub z_weight: f64,
    /// Dyadic bands `k` at which `‖P_k ∂_t f̂‖₂` is recorded.
    pub dtf_bands: Vec<i32>,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            grid,
            dt,
            t_end,
            scheme: Scheme::Ifrk4,
            dealias: Dealias::TwoThirds,
            epsilon: 0.01,
            ic: InitialCondition::Gaussian {
                width: 1.0,
                center: 0.0,
            },
            nonlinearity: Nonlinearity::Defocusing,
            symbol: Symbol::whitham(),
            blowup_factor: 100.0,
            sobolev_index: norms::DEFAULT_SOBOLEV_INDEX,
            z_weight: norms::DEFAULT_Z_WEIGHT,
            dtf_bands: vec![-2, -1, 0, 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be ≥ 0, got {}", self.t_end)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be ≥ 0, got {}", self.epsilon)));
        }
        if !(self.blowup_factor > 0.0) {
            return Err(Error::InvalidConfig("blowup factor must be positive".into()));
        }
        match &self.ic {
            InitialCondition::Gaussian { width, center } => {
                if !(*width > 0.0 && center.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian needs width > 0, got width {width}, center {center}"
                    )));
                }
            }
            InitialCondition::Spectral(c) => {
                if c.len() != self.grid.n() {
                    return Err(Error::GridMismatch);
                }
            }
        }
        self.grid.check_time(self.t_end)
    }

    pub fn initial_state(&self) -> Result<SpectralField> {
        let mut u = match &self.ic {
            InitialCondition::Gaussian { width, center } => {
                let (w, c, e) = (*width, *center, self.epsilon);
                SpectralField::from_fn(self.grid, |x| e * (-(x - c).powi(2) / (2.0 * w * w)).exp())
            }
            InitialCondition::Spectral(c) => {
                SpectralField::from_coefficients(self.grid, c.clone())?.scale(self.epsilon)
            }
        };
        u.symmetrize();
        Ok(u)
    }

    pub fn ceiling(&self) -> f64 {
        self.blowup_factor * self.epsilon
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandNorm {
    pub k: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_norm: f64,
    pub hamiltonian: f64,
    pub sup_norm: f64,
    pub sobolev_norm: f64,
    pub z_norm: f64,
    /// `‖xf‖₂`
    pub weight1: f64,
    /// `‖∂_x(xf)‖₂`
    pub weight2: f64,
    /// `‖P_k ∂_t f̂‖₂` evaluated from the nonlinear term.
    pub dtf_band_norms: Vec<BandNorm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u_hat: SpectralField,
    /// Profile `f̂ = e^{-itΛ} û`.
    pub f_hat: SpectralField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

struct StepCoeffs {
    h: f64,
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    etd: Option<EtdCoeffs>,
}

struct EtdCoeffs {
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

const CONTOUR_POINTS: usize = 64;

impl EtdCoeffs {
    /// Kassam–Trefethen contour averages of the ETDRK4 `φ`-functions.
    fn new(lin: &[f64], h: f64) -> Self {
        let roots: Vec<Complex64> = (1..=CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, PI * (j as f64 - 0.5) / (CONTOUR_POINTS as f64 / 2.0)))
            .collect();
        let m = CONTOUR_POINTS as f64;
        let n = lin.len();
        let mut c = EtdCoeffs {
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &l in lin {
            let z0 = Complex64::new(0.0, l * h);
            let (mut q, mut f1, mut f2, mut f3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for r in &roots {
                let z = z0 + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z / 2.0).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            c.q.push(h * q / m);
            c.f1.push(h * f1 / m);
            c.f2.push(h * f2 / m);
            c.f3.push(h * f3 / m);
        }
        c
    }
}

/// A configured integrator: caches the linear propagators, dealiasing mask and FFT plans.
pub struct Stepper {
    cfg: SolverConfig,
    lin: Vec<f64>,
    cubic: Cubic,
    main: StepCoeffs,
    partial: Option<StepCoeffs>,
}

/// Masked evaluation of `s·iξ F[(Pu)³]` with cached plans and scratch space.
struct Cubic {
    sign: f64,
    pre: Vec<f64>,
    post: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl Cubic {
    /// Writes the term into `out`; returns `max |Pu|` on the grid.
    fn eval(&mut self, u: &[Complex64], out: &mut [Complex64]) -> f64 {
        if self.sign == 0.0 {
            out.iter_mut().for_each(|c| *c = Complex64::default());
            return 0.0;
        }
        for ((b, c), p) in self.buf.iter_mut().zip(u).zip(&self.pre) {
            *b = c * p;
        }
        self.inv.process(&mut self.buf);
        let mut sup: f64 = 0.0;
        for b in self.buf.iter_mut() {
            let v = b.re;
            sup = sup.max(v.abs());
            *b = Complex64::new(v * v * v, 0.0);
        }
        self.fwd.process(&mut self.buf);
        for ((o, b), p) in out.iter_mut().zip(&self.buf).zip(&self.post) {
            *o = b * p;
        }
        sup
    }
}

impl Stepper {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = cfg.grid;
        let n = g.n();
        let sym = cfg.symbol;
        let nyq_slot = n / 2;
        let lin: Vec<f64> = (0..n)
            .map(|j| {
                // the unpaired Nyquist mode is kept real
                if j == nyq_slot {
                    0.0
                } else {
                    sym.value(g.xi(j))
                }
            })
            .collect();
        let keep = |j: usize| match cfg.dealias {
            Dealias::TwoThirds => 3 * signed_index(j, n).unsigned_abs() < n as u64,
            Dealias::None => j != nyq_slot,
        };
        let parity = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let s = cfg.nonlinearity.sign();
        let pre = (0..n)
            .map(|j| if keep(j) { g.dxi() * parity(j) } else { 0.0 })
            .collect();
        let post = (0..n)
            .map(|j| {
                if keep(j) {
                    Complex64::new(0.0, s * g.xi(j) * g.dx() / (2.0 * PI) * parity(j))
                } else {
                    Complex64::default()
                }
            })
            .collect();
        let main = Self::coeffs(&lin, cfg.dt, cfg.scheme);
        let st = Stepper {
            cubic: Cubic {
                sign: s,
                pre,
                post,
                fwd: forward_plan(n),
                inv: inverse_plan(n),
                buf: vec![Complex64::default(); n],
            },
            lin,
            main,
            partial: None,
            cfg,
        };
        debug!("stability number {:.3e}", st.stability_number());
        if st.stability_number() > 1.0 {
            warn!(
                "dt = {} is large for the cubic term (stability number {:.3})",
                st.cfg.dt,
                st.stability_number()
            );
        }
        Ok(st)
    }

    fn coeffs(lin: &[f64], h: f64, scheme: Scheme) -> StepCoeffs {
        StepCoeffs {
            h,
            e_half: lin.iter().map(|&l| Complex64::from_polar(1.0, 0.5 * h * l)).collect(),
            e_full: lin.iter().map(|&l| Complex64::from_polar(1.0, h * l)).collect(),
            etd: (scheme == Scheme::Etdrk4).then(|| EtdCoeffs::new(lin, h)),
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// `dt · ξ_max · 3 sup|u₀|²`: the step measured against the fastest linearised cubic
    /// frequency. Values well below 1 are comfortable for both schemes.
    pub fn stability_number(&self) -> f64 {
        let g = self.cfg.grid;
        let xi_max = match self.cfg.dealias {
            Dealias::TwoThirds => g.nyquist() * 2.0 / 3.0,
            Dealias::None => g.nyquist(),
        };
        let amp = match &self.cfg.ic {
            InitialCondition::Gaussian { .. } => self.cfg.epsilon,
            InitialCondition::Spectral(_) => self.cfg.initial_state().map_or(0.0, |u| u.sup_norm()),
        };
        self.cfg.dt * xi_max * 3.0 * amp * amp * self.cfg.nonlinearity.sign().abs()
    }

    /// The nonlinear term `s·iξ F[(Pu)³]` of the configured right-hand side.
    pub fn nonlinear_term(&mut self, u: &SpectralField) -> SpectralField {
        let mut out = vec![Complex64::default(); u.grid().n()];
        self.cubic.eval(u.coefficients(), &mut out);
        SpectralField::from_coefficients(*u.grid(), out).expect("same grid")
    }

    fn ensure_partial(&mut self, h: f64) {
        if self.partial.as_ref().is_none_or(|p| p.h != h) {
            self.partial = Some(Self::coeffs(&self.lin, h, self.cfg.scheme));
        }
    }

    /// Advances `û` by one configured step.
    pub fn step(&mut self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        self.step_by(u, t, self.cfg.dt)
    }

    /// Advances `û` from time `t` by `h` (`0 < h ≤ dt`).
    pub fn step_by(&mut self, u: &SpectralField, t: f64, h: f64) -> Result<SpectralField> {
        if u.grid() != &self.cfg.grid {
            return Err(Error::GridMismatch);
        }
        let (next, sup) = if h == self.cfg.dt {
            advance(&mut self.cubic, u.coefficients(), &self.main)
        } else {
            self.ensure_partial(h);
            let c = self.partial.as_ref().expect("just built");
            advance(&mut self.cubic, u.coefficients(), c)
        };
        let t_new = t + h;
        if next.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) || !sup.is_finite() {
            return Err(Error::NonFinite { t: t_new });
        }
        let ceiling = self.cfg.ceiling();
        if self.cfg.epsilon > 0.0 && sup > ceiling {
            return Err(Error::Blowup {
                t: t_new,
                sup,
                ceiling,
            });
        }
        SpectralField::from_coefficients(self.cfg.grid, next)
    }

    /// Profile `f̂ = e^{-itΛ} û` with the stepper's linear symbol.
    pub fn profile(&self, u: &SpectralField, t: f64) -> SpectralField {
        let coeffs = u
            .coefficients()
            .iter()
            .zip(&self.lin)
            .map(|(c, l)| c * Complex64::from_polar(1.0, -t * l))
            .collect();
        SpectralField::from_coefficients(*u.grid(), coeffs).expect("same grid")
    }

    /// `∫ ½ u L u + (s/4) (Pu)⁴`, conserved by the semi-discrete flow.
    pub fn hamiltonian(&self, u: &SpectralField) -> f64 {
        let g = u.grid();
        let sym = self.cfg.symbol;
        let quad: f64 = u
            .coefficients()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let xi = g.xi(j);
                let m = if xi == 0.0 {
                    sym.operator_symbol(0.0).unwrap_or(0.0)
                } else if j == g.n() / 2 {
                    0.0
                } else {
                    self.lin[j] / xi
                };
                m * c.norm_sqr()
            })
            .sum::<f64>()
            * PI
            * g.dxi();
        let s = self.cfg.nonlinearity.sign();
        if s == 0.0 {
            return quad;
        }
        let masked: Vec<Complex64> = u
            .coefficients()
            .iter()
            .zip(&self.cubic.pre)
            .map(|(c, p)| if *p == 0.0 { Complex64::default() } else { *c })
            .collect();
        let v = SpectralField::from_coefficients(*g, masked).expect("same grid").to_real();
        let quart: f64 = v.iter().map(|x| x.powi(4)).sum::<f64>() * g.dx();
        quad + 0.25 * s * quart
    }

    /// `‖P_k ∂_t f̂‖₂ = ‖P_k N(u)‖₂` from the exact nonlinear expression.
    pub fn dtf_band_norm(&mut self, u: &SpectralField, k: i32) -> Result<f64> {
        let nl = self.nonlinear_term(u);
        Ok(project(&nl, Band::Dyadic(k))?.l2_norm())
    }

    pub fn diagnostics(&mut self, u: &SpectralField, t: f64) -> Result<DiagnosticsRecord> {
        let f = self.profile(u, t);
        let nl = self.nonlinear_term(u);
        let mut bands = Vec::with_capacity(self.cfg.dtf_bands.len());
        for &k in &self.cfg.dtf_bands {
            bands.push(BandNorm {
                k,
                value: project(&nl, Band::Dyadic(k))?.l2_norm(),
            });
        }
        Ok(DiagnosticsRecord {
            t,
            l2_norm: u.l2_norm(),
            hamiltonian: self.hamiltonian(u),
            sup_norm: u.sup_norm(),
            sobolev_norm: norms::sobolev_norm(&f, self.cfg.sobolev_index),
            z_norm: norms::z_norm(&f, self.cfg.z_weight),
            weight1: norms::weight1(&f),
            weight2: norms::weight2(&f),
            dtf_band_norms: bands,
        })
    }

    /// Integrates from `u0` at `t = 0`, calling `observe(t, û)` at each sample time.
    ///
    /// Steps are of size `dt`, shortened only to land exactly on sample times.
    pub fn integrate(
        &mut self,
        u0: &SpectralField,
        sample_times: &[f64],
        mut observe: impl FnMut(&mut Self, f64, &SpectralField) -> Result<()>,
    ) -> Result<SpectralField> {
        check_sample_times(sample_times, self.cfg.t_end)?;
        let dt = self.cfg.dt;
        let mut u = u0.clone();
        let mut t = 0.0;
        for &ts in sample_times {
            while ts - t > 1e-9 * dt {
                let h = (ts - t).min(dt);
                u = self.step_by(&u, t, h)?;
                t = if h == dt { t + dt } else { ts };
                if (ts - t).abs() <= 1e-9 * dt {
                    t = ts;
                }
            }
            observe(self, ts, &u)?;
        }
        Ok(u)
    }
}

fn advance(cubic: &mut Cubic, u: &[Complex64], c: &StepCoeffs) -> (Vec<Complex64>, f64) {
    let n = u.len();
    let h = c.h;
    let zero = Complex64::default();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let sup = cubic.eval(u, &mut k1);
    match &c.etd {
        None => {
            for j in 0..n {
                tmp[j] = c.e_half[j] * (u[j] + 0.5 * h * k1[j]);
            }
            cubic.eval(&tmp, &mut k2);
            for j in 0..n {
                tmp[j] = c.e_half[j] * u[j] + 0.5 * h * k2[j];
            }
            cubic.eval(&tmp, &mut k3);
            for j in 0..n {
                tmp[j] = c.e_full[j] * u[j] + h * c.e_half[j] * k3[j];
            }
            cubic.eval(&tmp, &mut k4);
            let out = (0..n)
                .map(|j| {
                    c.e_full[j] * u[j]
                        + h / 6.0
                            * (c.e_full[j] * k1[j] + 2.0 * c.e_half[j] * (k2[j] + k3[j]) + k4[j])
                })
                .collect();
            (out, sup)
        }
        Some(e) => {
            let mut a = vec![zero; n];
            let mut b = vec![zero; n];
            for j in 0..n {
                a[j] = c.e_half[j] * u[j] + e.q[j] * k1[j];
            }
            cubic.eval(&a, &mut k2);
            for j in 0..n {
                b[j] = c.e_half[j] * u[j] + e.q[j] * k2[j];
            }
            cubic.eval(&b, &mut k3);
            for j in 0..n {
                tmp[j] = c.e_half[j] * a[j] + e.q[j] * (2.0 * k3[j] - k1[j]);
            }
            cubic.eval(&tmp, &mut k4);
            let out = (0..n)
                .map(|j| {
                    c.e_full[j] * u[j]
                        + e.f1[j] * k1[j]
                        + 2.0 * e.f2[j] * (k2[j] + k3[j])
                        + e.f3[j] * k4[j]
                })
                .collect();
            (out, sup)
        }
    }
}

fn check_sample_times(times: &[f64], t_end: f64) -> Result<()> {
    let mut last = f64::NEG_INFINITY;
    for &t in times {
        if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
            return Err(Error::InvalidConfig(format!(
                "sample time {t} outside [0, {t_end}]"
            )));
        }
        if t <= last {
            return Err(Error::NonMonotoneTime {
                t_new: t,
                last_t: last,
            });
        }
        last = t;
    }
    Ok(())
}

/// Runs `cfg`, storing a snapshot and a diagnostics record at every sample time.
pub fn run(cfg: &SolverConfig, sample_times: &[f64]) -> Result<Trajectory> {
    let mut snapshots = Vec::with_capacity(sample_times.len());
    let mut diagnostics = Vec::with_capacity(sample_times.len());
    run_with(cfg, sample_times, |st, t, u| {
        diagnostics.push(st.diagnostics(u, t)?);
        snapshots.push(Snapshot {
            t,
            u_hat: u.clone(),
            f_hat: st.profile(u, t),
        });
        Ok(())
    })?;
    Ok(Trajectory {
        snapshots,
        diagnostics,
    })
}

/// Runs `cfg` and hands every sample to `observe` without storing anything.
pub fn run_with(
    cfg: &SolverConfig,
    sample_times: &[f64],
    observe: impl FnMut(&mut Stepper, f64, &SpectralField) -> Result<()>,
) -> Result<SpectralField> {
    let mut st = Stepper::new(cfg.clone())?;
    let u0 = cfg.initial_state()?;
    st.integrate(&u0, sample_times, observe)
}

/// `‖P_k ∂_t f̂‖₂` along stored snapshots, from the exact nonlinear expression.
pub fn dtf_band_norm(cfg: &SolverConfig, snapshots: &[Snapshot], k: i32) -> Result<Vec<(f64, f64)>> {
    let mut st = Stepper::new(cfg.clone())?;
    snapshots
        .iter()
        .map(|s| Ok((s.t, st.dtf_band_norm(&s.u_hat, k)?)))
        .collect()
}

/// Centred finite-difference estimate of `‖P_k ∂_t f̂‖₂` at the midpoints of consecutive
/// snapshots; a cross-check for [`dtf_band_norm`].
pub fn dtf_band_norm_fd(snapshots: &[Snapshot], k: i32) -> Result<Vec<(f64, f64)>> {
    snapshots
        .windows(2)
        .map(|w| {
            let d = w[1].f_hat.sub(&w[0].f_hat)?.scale(1.0 / (w[1].t - w[0].t));
            Ok((0.5 * (w[0].t + w[1].t), project(&d, Band::Dyadic(k))?.l2_norm()))
        })
        .collect()
}

/// `û(ξ) ↦ û(-ξ)`, i.e. `u(x) ↦ u(-x)`. Together with `t ↦ -t` this is a symmetry of the
/// equation, which gives a time-reversal test.
pub fn reflect(u: &SpectralField) -> SpectralField {
    let n = u.grid().n();
    let c = u.coefficients();
    let coeffs = (0..n)
        .map(|j| {
            let k = signed_index(j, n);
            slot_of(-k, n).map_or(c[j], |m| c[m])
        })
        .collect();
    SpectralField::from_coefficients(*u.grid(), coeffs).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillatory::propagate;

    fn small_cfg() -> SolverConfig {
        let g = GridSpec::new(256, 64.0).unwrap();
        let mut c = SolverConfig::new(g, 0.05, 10.0);
        c.epsilon = 0.3;
        c.dtf_bands = vec![-1, 0, 1];
        c
    }

    #[test]
    fn zero_data_stays_zero() {
        let mut cfg = small_cfg();
        cfg.epsilon = 0.0;
        let tr = run(&cfg, &[0.0, 1.0]).unwrap();
        let last = &tr.snapshots[1].u_hat;
        assert!(last.coefficients().iter().all(|c| c.norm() == 0.0));
        assert_eq!(tr.diagnostics[1].dtf_band_norms[0].value, 0.0);
    }

    #[test]
    fn linear_flow_matches_propagator() {
        let mut cfg = small_cfg();
        cfg.nonlinearity = Nonlinearity::Off;
        for scheme in [Scheme::Ifrk4, Scheme::Etdrk4] {
            cfg.scheme = scheme;
            let mut st = Stepper::new(cfg.clone()).unwrap();
            let u0 = cfg.initial_state().unwrap();
            let mut u = u0.clone();
            for i in 0..20 {
                u = st.step(&u, i as f64 * cfg.dt).unwrap();
            }
            let exact = propagate(&cfg.symbol, &u0, 20.0 * cfg.dt);
            let err = u.sub(&exact).unwrap().l2_norm() / u0.l2_norm();
            assert!(err < 1e-13, "{scheme:?}: {err}");
        }
    }

    #[test]
    fn single_mode_first_step() {
        // u₀ = ε cos(ξ* x) on a lattice with Δξ = 1; mode 3ξ* of u³ is ε³/4 · cos(3ξ* x)
        let g = GridSpec::new(64, 2.0 * PI).unwrap();
        let (eps, m) = (0.1, 3usize);
        let mut coeffs = vec![Complex64::default(); 64];
        coeffs[m] = Complex64::new(0.5, 0.0);
        coeffs[64 - m] = Complex64::new(0.5, 0.0);
        let mut cfg = SolverConfig::new(g, 1e-4, 1.0);
        cfg.epsilon = eps;
        cfg.ic = InitialCondition::Spectral(coeffs);
        let mut st = Stepper::new(cfg.clone()).unwrap();
        let u0 = cfg.initial_state().unwrap();
        let u1 = st.step(&u0, 0.0).unwrap();
        let got = u1.coefficients()[3 * m];
        let expected = Complex64::new(0.0, cfg.dt * 3.0 * m as f64 * eps.powi(3) / 8.0);
        assert!((got - expected).norm() < 1e-3 * expected.norm(), "{got} vs {expected}");
    }

    #[test]
    fn hermitian_symmetry_preserved() {
        let cfg = small_cfg();
        let tr = run(&cfg, &[5.0]).unwrap();
        assert!(tr.snapshots[0].u_hat.hermitian_defect() < 1e-15);
    }

    #[test]
    fn conservation_small_run() {
        let cfg = small_cfg();
        let times: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let tr = run(&cfg, &times).unwrap();
        let d0 = &tr.diagnostics[0];
        for d in &tr.diagnostics {
            assert!((d.l2_norm / d0.l2_norm - 1.0).abs() < 1e-8, "{d:?}");
            assert!((d.hamiltonian / d0.hamiltonian - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn schemes_agree() {
        let mut a = small_cfg();
        let mut b = small_cfg();
        a.scheme = Scheme::Ifrk4;
        b.scheme = Scheme::Etdrk4;
        let ua = run(&a, &[10.0]).unwrap().snapshots.pop().unwrap().u_hat;
        let ub = run(&b, &[10.0]).unwrap().snapshots.pop().unwrap().u_hat;
        let d = ua.sub(&ub).unwrap().l2_norm() / ua.l2_norm();
        assert!(d < 1e-7, "{d}");
    }

    #[test]
    fn time_reversal() {
        let cfg = small_cfg();
        let u0 = cfg.initial_state().unwrap();
        let mut st = Stepper::new(cfg.clone()).unwrap();
        let u = st.integrate(&u0, &[10.0], |_, _, _| Ok(())).unwrap();
        let back = st.integrate(&reflect(&u), &[10.0], |_, _, _| Ok(())).unwrap();
        let err = reflect(&back).sub(&u0).unwrap().l2_norm() / u0.l2_norm();
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn blowup_and_validation() {
        let mut cfg = small_cfg();
        cfg.blowup_factor = 0.5;
        assert!(matches!(run(&cfg, &[1.0]), Err(Error::Blowup { .. })));
        let mut cfg = small_cfg();
        cfg.dt = -1.0;
        assert!(matches!(Stepper::new(cfg), Err(Error::InvalidConfig(_))));
        let cfg = small_cfg();
        assert!(matches!(
            run(&cfg, &[2.0, 1.0]),
            Err(Error::NonMonotoneTime { .. })
        ));
        let mut cfg = small_cfg();
        cfg.t_end = 100.0;
        assert!(matches!(Stepper::new(cfg), Err(Error::WrapAround { .. })));
    }

    #[test]
    fn dtf_exact_matches_finite_difference() {
        let cfg = small_cfg();
        let h = 1e-3;
        let tr = run(&cfg, &[2.0 - h, 2.0, 2.0 + h]).unwrap();
        let exact = dtf_band_norm(&cfg, &tr.snapshots, 0).unwrap()[1].1;
        let pair = [tr.snapshots[0].clone(), tr.snapshots[2].clone()];
        let fd = dtf_band_norm_fd(&pair, 0).unwrap()[0].1;
        assert!((fd - exact).abs() < 1e-4 * exact, "{fd} vs {exact}");
    }
}
