//! Self-checks shared by `verify` and the acceptance tests. Each suite returns a list of
//! [`Check`]s; informational lines never fail a suite.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use whitham_core::fit;
use whitham_core::lp;
use whitham_core::multiplier::{holder_trial, s_norm, SampledMultiplier};
use whitham_core::oscillatory::{decay_scan, geometric_times, DecayReport};
use whitham_core::resonance::{self, BoundReport, Comparand};
use whitham_core::scattering::{dyadic_report, log_sample_times, Band, DyadicReport, ScatteringSnapshot, ScatteringState};
use whitham_core::solver::{run_with, DiagnosticsRecord, InitialCondition, Scheme, SolverConfig};
use whitham_core::{GridSpec, SpectralField, Symbol};

use crate::config::SimulationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    pub fn assert(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            detail: detail.into(),
        }
    }

    pub fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: Verdict::Info,
            detail: detail.into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn line(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    !checks.iter().any(Check::failed)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    geometric_times(lo, hi, n)
}

// ---------------------------------------------------------------------------------------
// dispersion

const LAMBDA_1: f64 = 0.8726936208978297;
const LAMBDA_PRIME_1: f64 = 0.6769663884755969;
const LAMBDA_SMALL: f64 = 0.009999833338610929;
const ROOT_HALF: f64 = 1.5173628121818369;

/// Oddness, finite-difference consistency, series crossover, asymptotic brackets,
/// monotonicity of `Λ'` and concavity for the Whitham symbol.
pub fn dispersion() -> Result<Vec<Check>> {
    let s = Symbol::whitham();
    let mut out = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut odd, mut even): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let x = rng.gen_range(-50.0..50.0);
        odd = odd.max((s.eval(x, 0)? + s.eval(-x, 0)?).abs());
        even = even.max((s.eval(x, 1)? - s.eval(-x, 1)?).abs());
    }
    out.push(Check::assert(
        "oddness",
        odd < 1e-12 && even < 1e-12,
        format!("max |Λ(ξ)+Λ(-ξ)| = {odd:.2e}, max |Λ'(ξ)-Λ'(-ξ)| = {even:.2e} over 10^4 points"),
    ));

    // error relative to max(|Λ^{(k+1)}|, |Λ^{(k)}|/(1+|ξ|)), so zeros of Λ''' stay meaningful
    let mut worst: f64 = 0.0;
    for &a in &log_grid(0.1, 50.0, 200) {
        for x in [a, -a] {
            let h = 1e-4 * (1.0 + x.abs());
            for k in 0..3u32 {
                let fd = (s.eval(x + h, k)? - s.eval(x - h, k)?) / (2.0 * h);
                let exact = s.eval(x, k + 1)?;
                let scale = exact.abs().max(s.eval(x, k)?.abs() / (1.0 + x.abs()));
                worst = worst.max((fd - exact).abs() / scale);
            }
        }
    }
    out.push(Check::assert(
        "derivative consistency",
        worst < 1e-6,
        format!("max relative central-difference error {worst:.2e} for orders 0..2, 0.1 ≤ |ξ| ≤ 50"),
    ));

    let z = s.zero_threshold();
    let series = s.with_zero_threshold(0.5)?;
    let direct = s.with_zero_threshold(0.5 * z)?;
    let mut cross: f64 = 0.0;
    for k in 0..=3 {
        cross = cross.max((series.eval(z, k)? - direct.eval(z, k)?).abs());
    }
    out.push(Check::assert(
        "series crossover",
        cross < 1e-12,
        format!("max |series - direct| = {cross:.2e} at ξ = {z}, orders 0..3"),
    ));

    let refs = [
        (s.eval(1.0, 0)?, LAMBDA_1),
        (s.eval(1.0, 1)?, LAMBDA_PRIME_1),
        (s.eval(0.01, 0)?, LAMBDA_SMALL),
        (s.eval(0.0, 1)?, 1.0),
        (s.invert_group_velocity(0.5)?, ROOT_HALF),
        (s.invert_group_velocity(LAMBDA_PRIME_1)?, 1.0),
    ];
    let ref_err = refs.iter().map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    out.push(Check::assert(
        "reference values",
        ref_err < 1e-10,
        format!("max relative deviation {ref_err:.2e} from high-precision values"),
    ));

    // Λ^{(k)}(ξ) ξ^{k-1/2} → 1, 1/2, -1/4, 3/8 as ξ → ∞
    let limits = [1.0, 0.5, 0.25, 0.375];
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 4];
    let mut lead: f64 = 0.0;
    for &x in &log_grid(1e3, 1e6, 200) {
        for k in 0..4u32 {
            let r = s.eval(x, k)?.abs() * x.powf(k as f64 - 0.5) / limits[k as usize];
            ranges[k as usize].0 = ranges[k as usize].0.min(r);
            ranges[k as usize].1 = ranges[k as usize].1.max(r);
        }
        lead = lead.max((s.eval(x, 0)? / x.sqrt() - 1.0).abs());
    }
    let bracketed = ranges.iter().all(|&(lo, hi)| lo >= 0.5 && hi <= 2.0);
    out.push(Check::assert(
        "high-frequency asymptotics",
        lead < 1e-3 && bracketed,
        format!(
            "max |Λ/√ξ - 1| = {lead:.2e}; normalized |Λ^(k)| ξ^(k-1/2) ranges {} on [1e3, 1e6]",
            ranges.iter().map(|(a, b)| format!("[{a:.4}, {b:.4}]")).collect::<Vec<_>>().join(" ")
        ),
    ));

    // Λ/ξ → 1, (1-Λ')/ξ² → 1/2, -Λ''/ξ → 1 as ξ → 0
    let mut low = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for &x in &log_grid(1e-6, 1e-2, 100) {
        let r = [
            s.eval(x, 0)? / x,
            2.0 * (1.0 - s.eval(x, 1)?) / (x * x),
            -s.eval(x, 2)? / x,
        ];
        for (i, v) in r.iter().enumerate() {
            low[i].0 = low[i].0.min(*v);
            low[i].1 = low[i].1.max(*v);
        }
    }
    out.push(Check::assert(
        "low-frequency asymptotics",
        low.iter().all(|&(lo, hi)| lo >= 0.5 && hi <= 2.0),
        format!(
            "Λ/ξ, 2(1-Λ')/ξ², -Λ''/ξ ranges {} on [1e-6, 1e-2]",
            low.iter().map(|(a, b)| format!("[{a:.6}, {b:.6}]")).collect::<Vec<_>>().join(" ")
        ),
    ));

    let grid = log_grid(1e-6, 1e6, 2000);
    let mut monotone = true;
    let mut concave = true;
    let mut prev = 1.0;
    for &x in &grid {
        let d1 = s.eval(x, 1)?;
        monotone &= d1 < prev && d1 > 0.0;
        prev = d1;
        concave &= s.eval(x, 2)? < 0.0;
    }
    out.push(Check::assert(
        "group velocity range",
        monotone,
        "Λ' strictly decreasing with values in (0,1) on [1e-6, 1e6]",
    ));
    out.push(Check::assert("concavity", concave, "Λ'' < 0 on [1e-6, 1e6]"));
    Ok(out)
}

// ---------------------------------------------------------------------------------------
// resonance

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOptions {
    pub bound: f64,
    pub samples: usize,
    pub four_samples: usize,
    pub k_min: i32,
    pub k_max: i32,
    pub seed: u64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions {
            bound: 10.0,
            samples: 1_000_000,
            four_samples: 100_000,
            k_min: -10,
            k_max: 12,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceRow {
    pub check: String,
    pub region: String,
    pub report: BoundReport,
}

/// Two- and three-wave lower bounds (with a sample-doubling stability check) and the
/// four-wave scan over dyadic `k`.
pub fn resonance(opts: &ResonanceOptions) -> Result<(Vec<Check>, Vec<ResonanceRow>)> {
    let s = Symbol::whitham();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let region = format!("[0,{}]", opts.bound);
    type Scan = fn(&Symbol, f64, usize, u64) -> whitham_core::Result<BoundReport>;
    let scans: [(&str, Scan); 2] = [
        ("two-wave", resonance::check_two_wave_bound),
        ("three-wave", resonance::check_three_wave_bound),
    ];
    for (name, scan) in scans {
        let base = scan(&s, opts.bound, opts.samples, opts.seed)?;
        let doubled = scan(&s, opts.bound, 2 * opts.samples, opts.seed + 1)?;
        let spread = |r: &BoundReport| r.max_ratio / r.min_ratio;
        let drift = (spread(&doubled) / spread(&base) - 1.0).abs();
        checks.push(Check::assert(
            format!("{name} bound"),
            base.holds() && doubled.holds(),
            format!(
                "min ratio {:.4} ({} samples), {:.4} ({} samples)",
                base.min_ratio, base.samples, doubled.min_ratio, doubled.samples
            ),
        ));
        checks.push(Check::assert(
            format!("{name} stability"),
            drift < 0.05,
            format!(
                "max/min {:.4} vs {:.4} under sample doubling (change {:.2}%)",
                spread(&base),
                spread(&doubled),
                100.0 * drift
            ),
        ));
        rows.push(ResonanceRow {
            check: name.into(),
            region: region.clone(),
            report: base,
        });
        rows.push(ResonanceRow {
            check: name.into(),
            region: region.clone(),
            report: doubled,
        });
    }

    let mut four_ok = true;
    let mut four_min = f64::INFINITY;
    for k in opts.k_min..=opts.k_max {
        let r = resonance::check_four_wave_bound(&s, k, opts.four_samples, opts.seed)?;
        four_ok &= r.holds();
        four_min = four_min.min(r.min_ratio);
        rows.push(ResonanceRow {
            check: "four-wave".into(),
            region: format!("k={k}"),
            report: r,
        });
    }
    checks.push(Check::assert(
        "four-wave bound",
        four_ok,
        format!(
            "min |ΣΛ|/2^(3k) positive for k in [{}, {}] (smallest {four_min:.3e})",
            opts.k_min, opts.k_max
        ),
    ));
    let mut high = Vec::new();
    for k in 1.max(opts.k_min)..=opts.k_max {
        let r = resonance::check_four_wave_bound_against(&s, k, opts.four_samples, opts.seed, Comparand::High)?;
        high.push(format!("{k}:{:.3}", r.min_ratio));
        rows.push(ResonanceRow {
            check: "four-wave-high".into(),
            region: format!("k={k}"),
            report: r,
        });
    }
    checks.push(Check::info(
        "four-wave against 2^(k/2)",
        format!("min ratios {}", high.join(" ")),
    ));
    Ok((checks, rows))
}

// ---------------------------------------------------------------------------------------
// Φ_ξ decomposition

pub fn identity(points: usize, seed: u64) -> Result<Vec<Check>> {
    let s = Symbol::whitham();
    let scan = resonance::phixi_residual_scan(&s, 10.0, points, seed)?;
    let mut out = vec![Check::assert(
        "phixi residual",
        scan.max_relative_residual < 1e-10,
        format!(
            "max relative residual {:.2e} over {} guarded points ({} rejected)",
            scan.max_relative_residual, scan.accepted, scan.rejected
        ),
    )];
    let sizes: Vec<String> = [-4, 0, 4, 8]
        .iter()
        .map(|&k| {
            resonance::phixi_multiplier_scan(&s, k, 2000, seed).map(|m| {
                format!("k={k}: 2^k|m1| {:.3} |m2| {:.3} |m3| {:.3}", m.m1_scaled, m.m2, m.m3)
            })
        })
        .collect::<whitham_core::Result<_>>()?;
    out.push(Check::info("phixi multiplier sizes", sizes.join("; ")));
    Ok(out)
}

// ---------------------------------------------------------------------------------------
// linear decay

/// `e^{-ξ²/2}` cut off smoothly at `|ξ| = 3`.
pub fn low_band_profile(grid: GridSpec) -> SpectralField {
    SpectralField::from_spectrum(grid, |xi| Complex64::new((-0.5 * xi * xi).exp() * lp::phi_l(xi, 1), 0.0))
}

/// Smooth indicator of `lo ≤ |ξ| ≤ hi`.
pub fn band_profile(grid: GridSpec, lo: f64, hi: f64) -> SpectralField {
    SpectralField::from_spectrum(grid, |xi| Complex64::new(lp::mollifier(xi.abs(), lo, hi), 0.0))
}

pub fn decay_grid_low() -> Result<GridSpec> {
    Ok(GridSpec::new(1 << 16, (1u64 << 14) as f64 * PI)?)
}

/// High frequencies need a finer lattice: `ξ ∈ [32, 64]` on `n = 2^19`, period `2^12 π`.
pub fn decay_grid_high() -> Result<GridSpec> {
    Ok(GridSpec::new(1 << 19, (1u64 << 12) as f64 * PI)?)
}

pub fn decay_times() -> Vec<f64> {
    geometric_times(10.0, 1000.0, 24)
}

fn decay_check(name: &str, r: &DecayReport, lo: f64, hi: f64, target: &str) -> Check {
    Check::assert(
        name,
        (lo..=hi).contains(&r.fit.slope),
        format!(
            "fitted exponent {:.4} (target {target}, window [{lo}, {hi}]); max envelope ratio {:.3}",
            r.fit.slope, r.max_envelope_ratio
        ),
    )
}

pub fn decay() -> Result<Vec<Check>> {
    let s = Symbol::whitham();
    let times = decay_times();
    let low = decay_scan(&s, &low_band_profile(decay_grid_low()?), &times, 0.0)?;
    let high = decay_scan(&s, &band_profile(decay_grid_high()?, 32.0, 64.0), &times, 0.0)?;
    Ok(vec![
        decay_check("low-band decay", &low, -0.40, -0.27, "-1/3"),
        decay_check("high-band decay", &high, -0.56, -0.44, "-1/2"),
    ])
}

// ---------------------------------------------------------------------------------------
// conservation

/// Configuration of the conservation run; its step was chosen by a dt-halving pre-run.
pub const CONSERVATION_CONFIG: &str = "\
n = 4096
period = 128pi
t_end = 100
dt = 0.2
scheme = etdrk4
epsilon = 0.01
ic = gaussian
ic_width = 1
samples = linear
sample_count = 101
snapshots = false
";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub dt: f64,
    pub l2: f64,
    pub hamiltonian: f64,
}

/// Largest relative deviation of `‖u‖₂` and `H` from their initial values over the
/// sample times.
pub fn drift(cfg: &SolverConfig, times: &[f64]) -> Result<Drift> {
    let mut first: Option<(f64, f64)> = None;
    let mut d = Drift {
        dt: cfg.dt,
        l2: 0.0,
        hamiltonian: 0.0,
    };
    run_with(cfg, times, |st, _, u| {
        let (l2, h) = (u.l2_norm(), st.hamiltonian(u));
        let (l0, h0) = *first.get_or_insert((l2, h));
        d.l2 = d.l2.max((l2 / l0 - 1.0).abs());
        d.hamiltonian = d.hamiltonian.max((h / h0 - 1.0).abs());
        Ok(())
    })?;
    Ok(d)
}

pub fn conservation() -> Result<Vec<Check>> {
    let spec = SimulationSpec::from_text(CONSERVATION_CONFIG, Path::new("."))?;
    let times = spec.sample_times();
    let cfg = spec.solver;
    let mut half = cfg.clone();
    half.dt = 0.5 * cfg.dt;
    let (a, b) = (drift(&cfg, &times)?, drift(&half, &times)?);
    let (rl, rh) = (a.l2 / b.l2, a.hamiltonian / b.hamiltonian);
    let mut out = vec![
        Check::assert(
            "L2 drift",
            a.l2 < 1e-8,
            format!("max relative drift {:.3e} at dt = {} (ETDRK4)", a.l2, a.dt),
        ),
        Check::assert(
            "Hamiltonian drift",
            a.hamiltonian < 1e-6,
            format!("max relative drift {:.3e} at dt = {} (ETDRK4)", a.hamiltonian, a.dt),
        ),
        Check::assert(
            "fourth-order drift reduction",
            (8.0..=32.0).contains(&rl) && (8.0..=32.0).contains(&rh),
            format!("halving dt to {} divides drifts by {rl:.2} (L2) and {rh:.2} (H)", b.dt),
        ),
    ];
    let mut ifrk = cfg.clone();
    ifrk.scheme = Scheme::Ifrk4;
    let mut ifrk_half = ifrk.clone();
    ifrk_half.dt = half.dt;
    let (c, d) = (drift(&ifrk, &times)?, drift(&ifrk_half, &times)?);
    out.push(Check::info(
        "IFRK4 drift",
        format!(
            "dt {}: L2 {:.2e}, H {:.2e}; dt {}: L2 {:.2e}, H {:.2e}",
            c.dt, c.l2, c.hamiltonian, d.dt, d.l2, d.hamiltonian
        ),
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------------------
// bootstrap monitors and modified scattering on one reference run

/// Bands whose `ψ_k` support lies inside `|ξ| ≥ t₀^{-1/3}` for the first monitor time
/// `t₀ = 10`, where the `t^{-1}` decay of `∂_t f̂_k` has set in.
pub const MONITORED_BANDS: [i32; 3] = [0, 1, 2];
/// Lower bands, reported but not asserted.
pub const PRE_ASYMPTOTIC_BANDS: [i32; 2] = [-2, -1];

pub struct ReferenceRun {
    pub config: SolverConfig,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub dyads: Vec<ScatteringSnapshot>,
    pub seconds: f64,
}

pub fn reference_config() -> Result<SolverConfig> {
    let grid = GridSpec::new(16384, 640.0 * PI)?;
    let mut c = SolverConfig::new(grid, 0.1, 500.0);
    c.epsilon = 0.01;
    c.ic = InitialCondition::Gaussian {
        width: 1.0,
        center: 0.0,
    };
    c.dtf_bands = PRE_ASYMPTOTIC_BANDS.iter().chain(&MONITORED_BANDS).copied().collect();
    Ok(c)
}

/// Runs the reference configuration to `t = 500`, accumulating the phase online and
/// keeping diagnostics at 12 geometric times in `[10, 500]` and states at the dyads
/// `500/2^m`, `m = 0..5`.
pub fn reference_run() -> Result<ReferenceRun> {
    let clock = Instant::now();
    let config = reference_config()?;
    let dyad_times: Vec<f64> = (0..=5).rev().map(|m| 500.0 / 2f64.powi(m)).collect();
    let monitor_times = geometric_times(10.0, 500.0, 12);
    let mut extra = dyad_times.clone();
    extra.extend(&monitor_times);
    let times = log_sample_times(1.0, 500.0, &extra);
    let mut state = ScatteringState::new(&config.symbol, config.nonlinearity.sign(), config.initial_state()?)?;
    let mut diagnostics = Vec::new();
    let mut dyads = Vec::new();
    let hit = |set: &[f64], t: f64| set.iter().any(|&d| (d - t).abs() <= 1e-9 * d);
    run_with(&config, &times, |st, t, u| {
        state.accumulate(&st.profile(u, t), t)?;
        if hit(&dyad_times, t) {
            dyads.push(state.snapshot());
        }
        if hit(&monitor_times, t) {
            diagnostics.push(st.diagnostics(u, t)?);
        }
        Ok(())
    })?;
    Ok(ReferenceRun {
        config,
        diagnostics,
        dyads,
        seconds: clock.elapsed().as_secs_f64(),
    })
}

/// Factor-3 and trend tests on a normalized series `q(t)/q(t₀)`.
fn monitor(name: &str, t: &[f64], q: &[f64], assert: bool) -> Result<Check> {
    let q0 = q[0];
    let norm: Vec<f64> = q.iter().map(|v| v / q0).collect();
    let (lo, hi) = norm.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let lq: Vec<f64> = norm.iter().map(|v| v.ln()).collect();
    let slope = fit::linear(&lt, &lq)?.slope;
    let bounded = lo >= 1.0 / 3.0 && hi <= 3.0;
    let flat = (-0.1..=0.1).contains(&slope);
    let detail = format!(
        "q(t)/q(10) in [{lo:.3}, {hi:.3}] (bounded: {bounded}), log-log slope {slope:.3} (flat: {flat})"
    );
    Ok(if assert {
        Check::assert(name, bounded && flat, detail)
    } else {
        Check::info(name, detail)
    })
}

pub fn bootstrap(run: &ReferenceRun) -> Result<Vec<Check>> {
    let d = &run.diagnostics;
    let t: Vec<f64> = d.iter().map(|r| r.t).collect();
    let eps3 = run.config.epsilon.powi(3);
    let mut out = vec![
        monitor(
            "sup norm · t^(1/3)",
            &t,
            &d.iter().map(|r| r.sup_norm * r.t.cbrt()).collect::<Vec<_>>(),
            true,
        )?,
        monitor(
            "‖xf‖ · t^(-1/6)",
            &t,
            &d.iter().map(|r| r.weight1 * r.t.powf(-1.0 / 6.0)).collect::<Vec<_>>(),
            true,
        )?,
        monitor("Z norm", &t, &d.iter().map(|r| r.z_norm).collect::<Vec<_>>(), true)?,
    ];
    for (bands, assert) in [(&MONITORED_BANDS[..], true), (&PRE_ASYMPTOTIC_BANDS[..], false)] {
        for &k in bands {
            let q: Vec<f64> = d
                .iter()
                .map(|r| {
                    let v = r.dtf_band_norms.iter().find(|b| b.k == k).map_or(f64::NAN, |b| b.value);
                    v * r.t * (-0.5 * k as f64).exp2() / eps3
                })
                .collect();
            out.push(monitor(&format!("‖∂t f_k‖ · t · 2^(-k/2), k = {k}"), &t, &q, assert)?);
        }
    }
    out.push(Check::info(
        "raw ‖xf‖",
        format!(
            "{:.6e} at t = {:.0}, {:.6e} at t = {:.0}",
            d[0].weight1,
            t[0],
            d[d.len() - 1].weight1,
            t[t.len() - 1]
        ),
    ));
    Ok(out)
}

/// Band `[0.7, 3]` sits above `t^{-1/3+α}` for every dyad `t ≥ 15.6` with `α = 0.1`.
pub const SCATTERING_BAND: Band = Band {
    xi_min: 0.7,
    xi_max: 3.0,
};
pub const SCATTERING_WEIGHT: f64 = 4.0;
pub const SCATTERING_ALPHA: f64 = 0.1;

pub fn scattering_checks(report: &DyadicReport) -> Vec<Check> {
    let rows = &report.rows;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.4}->{:.0}: {:.3e}/{:.3e}", r.t1, r.t2, r.corrected, r.uncorrected))
        .collect();
    let last = rows.last();
    let ratio = last.map_or(f64::NAN, |r| r.corrected / r.uncorrected);
    vec![
        Check::assert(
            "corrected increments nonincreasing",
            rows.len() >= 3 && report.nonincreasing(0.2),
            format!("{} dyads, corrected/uncorrected {}", rows.len(), table.join(", ")),
        ),
        Check::assert(
            "phase correction gain",
            ratio <= 0.5,
            format!("final-dyad corrected/uncorrected = {ratio:.3}"),
        ),
        Check::assert(
            "decay rate",
            report.kappa.is_some_and(|k| k > 0.0),
            format!(
                "fitted κ = {}",
                report.kappa.map_or("none".to_string(), |k| format!("{k:.3}"))
            ),
        ),
    ]
}

pub fn scattering(run: &ReferenceRun) -> Result<Vec<Check>> {
    let report = dyadic_report(&run.dyads, SCATTERING_BAND, SCATTERING_WEIGHT, SCATTERING_ALPHA)?;
    Ok(scattering_checks(&report))
}

// ---------------------------------------------------------------------------------------
// multipliers

pub fn multiplier(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let grid = GridSpec::new(64, 16.0)?;
    let mut worst: f64 = 0.0;
    let mut worst_unit: f64 = 0.0;
    for i in 0..trials as u64 {
        let t = holder_trial(grid, seed + i)?;
        worst = worst.max(t.ratio());
        worst_unit = worst_unit.max(t.lhs / (t.rhs * (2.0 * PI).powi(3)));
    }
    let mut out = vec![Check::assert(
        "Hölder bound",
        worst <= 1.0 + 1e-9,
        format!(
            "max ‖T_m‖₂ / ((2π)^-3 ‖m‖_S ‖f1‖₂‖f2‖∞‖f3‖∞) = {worst:.4} over {trials} random instances \
             (against ‖m‖_S alone: {worst_unit:.2e})"
        ),
    )];

    let bump = |x: f64| lp::phi(x);
    let h = 1.0 / 128.0;
    let base = s_norm(&SampledMultiplier::sample(1, -2.0, 2.0, 512, |x| Complex64::new(bump(x[0]), 0.0))?, 16)?;
    let mut dev: f64 = 0.0;
    for l in 1..=2 {
        let r = (l as f64).exp2();
        let pts = (4.0 * r / h) as usize;
        let m = SampledMultiplier::sample(1, -2.0 * r, 2.0 * r, pts, |x| Complex64::new(bump(x[0] / r), 0.0))?;
        dev = dev.max((s_norm(&m, 16)? / base - 1.0).abs());
    }
    let gauss = |x: &[f64], r: f64| {
        let (a, b, c) = (x[0] / r, x[1] / r, x[2] / r);
        Complex64::new((-0.5 * (a * a + b * b + c * c) - 0.3 * a * b).exp(), 0.0)
    };
    let g1 = s_norm(&SampledMultiplier::sample(3, -8.0, 8.0, 32, |x| gauss(x, 1.0))?, 4)?;
    let g2 = s_norm(&SampledMultiplier::sample(3, -16.0, 16.0, 64, |x| gauss(x, 2.0))?, 4)?;
    let dev3 = (g2 / g1 - 1.0).abs();
    out.push(Check::assert(
        "dilation invariance",
        dev < 0.01 && dev3 < 0.01,
        format!(
            "φ(ξ/2^l), l = 1,2: max deviation {:.3}%; 3-d Gaussian form at scale 2: {:.3}%",
            100.0 * dev,
            100.0 * dev3
        ),
    ));
    Ok(out)
}
