//! Subcommand implementations. Each returns whether its checks passed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use whitham_core::grid::signed_index;
use whitham_core::oscillatory::{decay_scan, geometric_times};
use whitham_core::scattering::{dyadic_report, Band, ScatteringState};
use whitham_core::solver::{run_with, Scheme};
use whitham_core::{SpectralField, Symbol};

use crate::config::{parse_number, parse_symbol, read_spectrum, SimulationSpec};
use crate::manifest::{GridInfo, RunDir, RunManifest, SnapshotEntry};
use crate::output::{sig17, text_sha256, LineWriter};
use crate::suites::{self, Check, ResonanceOptions};
use crate::{Outcome, UsageError};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.ndjson";
pub const OUT_ENV: &str = "WHITHAM_LAB_OUT";

/// `--out` if given, else `$WHITHAM_LAB_OUT/<command>-<hash>` (or `runs/…`).
pub fn resolve_out(out: Option<&Path>, command: &str, config: &str) -> PathBuf {
    if let Some(p) = out {
        return p.to_path_buf();
    }
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(format!("{command}-{}", &text_sha256(config)[..12]))
}

/// Runs `body` and writes the manifest either way, marking it partial on error.
fn with_run_dir(run: RunDir, body: impl FnOnce(&mut RunDir) -> Result<Outcome>) -> Result<Outcome> {
    let mut run = run;
    let res = body(&mut run);
    let root = run.root().to_path_buf();
    match res {
        Ok(o) => {
            run.finish(None)?;
            info!("outputs written to {}", root.display());
            Ok(o)
        }
        Err(e) => {
            run.finish(Some(&e))?;
            Err(e)
        }
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Ifrk4 => "ifrk4",
        Scheme::Etdrk4 => "etdrk4",
    }
}

fn snapshot_rows(w: &mut LineWriter, f: &SpectralField) -> Result<()> {
    w.line("xi_index,xi,re_f_hat,im_f_hat")?;
    let g = f.grid();
    let n = g.n();
    let c = f.coefficients();
    // ascending ξ: slots n/2..n hold the negative indices
    for j in (n / 2..n).chain(0..n / 2) {
        w.row(&[signed_index(j, n).to_string(), sig17(g.xi(j)), sig17(c[j].re), sig17(c[j].im)])?;
    }
    Ok(())
}

pub fn simulate(config: &Path, out: Option<&Path>) -> Result<Outcome> {
    if !config.exists() {
        return Err(UsageError(format!("config file {} does not exist", config.display())).into());
    }
    let spec = SimulationSpec::from_file(config).map_err(|e| UsageError(format!("{e:#}")))?;
    let canon = spec.canonical();
    let root = resolve_out(out, "simulate", &canon);
    let mut run = RunDir::create(&root, "simulate", canon)?;
    let times = spec.sample_times();
    {
        let m = run.manifest_mut();
        m.grid = Some(GridInfo::from(&spec.solver.grid));
        m.scheme = Some(scheme_name(spec.solver.scheme).into());
        m.sample_times = times.clone();
    }
    with_run_dir(run, |run| {
        let mut diag = run.writer(DIAGNOSTICS_FILE)?;
        let mut snaps = Vec::new();
        info!("simulate: {} samples to t = {}", times.len(), spec.solver.t_end);
        let res = run_with(&spec.solver, &times, |st, t, u| {
            let rec = st.diagnostics(u, t)?;
            let io = |e: anyhow::Error| whitham_core::Error::Io(format!("{e:#}"));
            diag.record(&rec).map_err(io)?;
            if spec.snapshots {
                let rel = format!("snapshots/f_hat_{:05}.csv", snaps.len());
                let mut w = run.writer(&rel).map_err(io)?;
                snapshot_rows(&mut w, &st.profile(u, t)).map_err(io)?;
                w.finish().map_err(io)?;
                snaps.push(SnapshotEntry { t, path: rel });
            }
            Ok(())
        });
        diag.finish()?;
        run.manifest_mut().snapshots = snaps;
        res?;
        Ok(Outcome::Passed)
    })
}

pub struct ScatteringArgs<'a> {
    pub sim: &'a Path,
    pub band: Band,
    pub weight: f64,
    pub alpha: f64,
    pub check: bool,
    pub out: Option<&'a Path>,
}

/// Replays the snapshots of a `simulate` directory through the phase accumulator.
pub fn scattering(a: &ScatteringArgs<'_>) -> Result<Outcome> {
    let sim = RunManifest::read(a.sim).map_err(|e| UsageError(format!("{e:#}")))?;
    if sim.command != "simulate" {
        return Err(UsageError(format!("{} is not a simulate output directory", a.sim.display())).into());
    }
    if sim.snapshots.len() < 2 {
        return Err(UsageError("simulation wrote fewer than two snapshots (snapshots = false?)".into()).into());
    }
    let spec = SimulationSpec::from_text(&sim.config, a.sim)?;
    let cfg = &spec.solver;
    let canon = format!(
        "alpha = {}\nband = {}:{}\nsim_config_hash = {}\nweight = {}\n",
        sig17(a.alpha),
        sig17(a.band.xi_min),
        sig17(a.band.xi_max),
        sim.config_hash,
        sig17(a.weight)
    );
    let root = resolve_out(a.out, "scattering", &canon);
    let mut run = RunDir::create(&root, "scattering", canon)?;
    run.manifest_mut().grid = Some(GridInfo::from(&cfg.grid));
    let t_end = sim.snapshots.last().map_or(0.0, |s| s.t);
    with_run_dir(run, |run| {
        let load = |e: &SnapshotEntry| -> Result<SpectralField> {
            let c = read_spectrum(&a.sim.join(&e.path), cfg.grid)?;
            Ok(SpectralField::from_coefficients(cfg.grid, c)?)
        };
        let first = &sim.snapshots[0];
        if first.t != 0.0 {
            bail!("first snapshot is at t = {}, expected 0", first.t);
        }
        let mut state = ScatteringState::new(&cfg.symbol, cfg.nonlinearity.sign(), load(first)?)?;
        let is_dyad = |t: f64| {
            let m = (t_end / t).log2();
            t > 0.0 && (m - m.round()).abs() < 1e-9 && t.powf(-1.0 / 3.0 + a.alpha) <= a.band.xi_min
        };
        let mut dyads = Vec::new();
        for e in &sim.snapshots[1..] {
            state
                .accumulate(&load(e)?, e.t)
                .with_context(|| format!("accumulating snapshot {}", e.path))?;
            if is_dyad(e.t) {
                dyads.push(state.snapshot());
            }
        }
        let report = dyadic_report(&dyads, a.band, a.weight, a.alpha)?;
        let mut w = run.writer("scattering.ndjson")?;
        for r in &report.rows {
            w.record(&serde_json::json!({
                "kind": "dyad", "t1": r.t1, "t2": r.t2,
                "corrected": r.corrected, "uncorrected": r.uncorrected,
            }))?;
        }
        let checks = suites::scattering_checks(&report);
        w.record(&serde_json::json!({
            "kind": "summary",
            "kappa": report.kappa,
            "nonincreasing": report.nonincreasing(0.2),
            "final_ratio": report.rows.last().map(|r| r.corrected / r.uncorrected),
            "w_inf_error": report.w_inf_error(),
        }))?;
        w.finish()?;
        let mut g = run.writer("g_final.csv")?;
        g.line("xi,re_g,im_g,h")?;
        let grid = cfg.grid;
        let n = grid.n();
        let gc = state.g().coefficients();
        for j in (n / 2..n).chain(0..n / 2) {
            g.row(&[sig17(grid.xi(j)), sig17(gc[j].re), sig17(gc[j].im), sig17(state.phase()[j])])?;
        }
        g.finish()?;
        Ok(report_checks(&checks, a.check))
    })
}

fn report_checks(checks: &[Check], enforce: bool) -> Outcome {
    for c in checks {
        println!("{}", c.line());
    }
    if enforce && !suites::all_pass(checks) {
        Outcome::Failed
    } else {
        Outcome::Passed
    }
}

pub struct DecayArgs<'a> {
    pub beta: f64,
    pub band: Option<(f64, f64)>,
    pub times: &'a str,
    pub n: usize,
    pub period: f64,
    pub expect: Option<(f64, f64)>,
    pub out: Option<&'a Path>,
}

/// `T0:T1:COUNT` (geometric) or a comma-separated list.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let v = if parts.len() == 3 {
        let (a, b) = (parse_number(parts[0])?, parse_number(parts[1])?);
        let c: usize = parts[2].trim().parse().context("time count")?;
        if !(a > 0.0 && b > a && c >= 2) {
            bail!("geometric times need 0 < T0 < T1 and COUNT ≥ 2, got `{s}`");
        }
        geometric_times(a, b, c)
    } else {
        s.split(',').map(parse_number).collect::<Result<Vec<_>>>()?
    };
    if v.len() < 2 {
        bail!("at least two times are needed for a fit");
    }
    Ok(v)
}

pub fn decay_fit(a: &DecayArgs<'_>) -> Result<Outcome> {
    let times = parse_times(a.times).map_err(|e| UsageError(format!("--times: {e:#}")))?;
    let grid = whitham_core::GridSpec::new(a.n, a.period).map_err(|e| UsageError(e.to_string()))?;
    let profile = match a.band {
        Some((lo, hi)) => suites::band_profile(grid, lo, hi),
        None => suites::low_band_profile(grid),
    };
    let band = a.band.map_or("gaussian".to_string(), |(lo, hi)| format!("{}:{}", sig17(lo), sig17(hi)));
    let canon = format!(
        "beta = {}\nn = {}\nperiod = {}\nprofile = {band}\ntimes = {}\n",
        sig17(a.beta),
        a.n,
        sig17(a.period),
        times.iter().map(|t| sig17(*t)).collect::<Vec<_>>().join(",")
    );
    let root = resolve_out(a.out, "decay-fit", &canon);
    let mut run = RunDir::create(&root, "decay-fit", canon)?;
    run.manifest_mut().grid = Some(GridInfo::from(&grid));
    run.manifest_mut().sample_times = times.clone();
    with_run_dir(run, |run| {
        let report = decay_scan(&Symbol::whitham(), &profile, &times, a.beta)?;
        let mut w = run.writer("decay.ndjson")?;
        for r in &report.records {
            w.record(&serde_json::json!({
                "kind": "sample", "t": r.t, "sup": r.sup, "envelope_ratio": r.envelope_ratio,
            }))?;
        }
        w.record(&serde_json::json!({
            "kind": "summary", "beta": report.beta, "slope": report.fit.slope,
            "intercept": report.fit.intercept, "points": report.fit.points,
            "max_envelope_ratio": report.max_envelope_ratio,
        }))?;
        w.finish()?;
        let check = match a.expect {
            Some((lo, hi)) => Check::assert(
                "decay exponent",
                (lo..=hi).contains(&report.fit.slope),
                format!("fitted {:.4}, window [{lo}, {hi}]", report.fit.slope),
            ),
            None => Check::info("decay exponent", format!("fitted {:.4}", report.fit.slope)),
        };
        Ok(report_checks(&[check], true))
    })
}

pub fn resonance_check(opts: &ResonanceOptions, out: Option<&Path>) -> Result<Outcome> {
    let canon = format!(
        "box = {}\nfour_samples = {}\nk_max = {}\nk_min = {}\nsamples = {}\nseed = {}\n",
        sig17(opts.bound),
        opts.four_samples,
        opts.k_max,
        opts.k_min,
        opts.samples,
        opts.seed
    );
    let root = resolve_out(out, "resonance-check", &canon);
    let run = RunDir::create(&root, "resonance-check", canon)?;
    with_run_dir(run, |run| {
        let (checks, rows) = suites::resonance(opts)?;
        let mut w = run.writer("resonance.csv")?;
        w.line("check,region,samples,rejected,min_ratio,argmin,max_ratio,argmax")?;
        let pt = |p: &[f64]| p.iter().map(|v| sig17(*v)).collect::<Vec<_>>().join(";");
        for r in &rows {
            let b = &r.report;
            w.row(&[
                r.check.clone(),
                r.region.clone(),
                b.samples.to_string(),
                b.rejected.to_string(),
                sig17(b.min_ratio),
                pt(&b.argmin),
                sig17(b.max_ratio),
                pt(&b.argmax),
            ])?;
        }
        w.finish()?;
        let positive = rows.iter().all(|r| r.report.holds());
        let outcome = report_checks(&checks, true);
        Ok(if positive { outcome } else { Outcome::Failed })
    })
}

pub struct TableArgs<'a> {
    pub range: (f64, f64),
    pub step: f64,
    pub symbol: &'a str,
    pub fkdv_alpha: Option<&'a str>,
    pub out: Option<&'a Path>,
}

pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| UsageError(format!("expected LO:HI, got `{s}`")))?;
    let (a, b) = (parse_number(a)?, parse_number(b)?);
    if !(b >= a) {
        return Err(UsageError(format!("empty range `{s}`")).into());
    }
    Ok((a, b))
}

pub fn symbol_table(a: &TableArgs<'_>) -> Result<Outcome> {
    let sym = parse_symbol(a.symbol, a.fkdv_alpha).map_err(|e| UsageError(format!("{e:#}")))?;
    if !(a.step > 0.0) {
        return Err(UsageError("--step must be positive".into()).into());
    }
    let (lo, hi) = a.range;
    let count = ((hi - lo) / a.step + 1e-9).floor() as usize + 1;
    let mut lines = vec!["xi,lambda,lambda_1,lambda_2,lambda_3".to_string()];
    for i in 0..count {
        let xi = lo + i as f64 * a.step;
        let mut row = vec![sig17(xi)];
        for k in 0..=3 {
            row.push(sym.eval(xi, k).map_or_else(|_| sig17(f64::NAN), sig17));
        }
        lines.push(row.join(","));
    }
    match a.out {
        None => {
            let mut text = lines.join("\n");
            text.push('\n');
            print!("{text}");
            Ok(Outcome::Passed)
        }
        Some(dir) => {
            let canon = format!(
                "range = {}:{}\nstep = {}\nsymbol = {}\n",
                sig17(lo),
                sig17(hi),
                sig17(a.step),
                a.symbol
            );
            let run = RunDir::create(dir, "symbol-table", canon)?;
            with_run_dir(run, |run| {
                let mut w = run.writer("symbol_table.csv")?;
                for l in &lines {
                    w.line(l)?;
                }
                w.finish()?;
                Ok(Outcome::Passed)
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Dispersion,
    Resonance,
    Identity,
    Decay,
    Conservation,
    Bootstrap,
    Scattering,
    Multiplier,
    All,
}

pub struct VerifyArgs<'a> {
    pub suite: Suite,
    pub samples: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<&'a Path>,
}

pub fn verify(a: &VerifyArgs<'_>) -> Result<Outcome> {
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut checks = Vec::new();
    if wants(Suite::Dispersion) {
        checks.extend(suites::dispersion()?);
    }
    if wants(Suite::Resonance) {
        let mut opts = ResonanceOptions {
            seed: a.seed,
            ..ResonanceOptions::default()
        };
        if let Some(n) = a.samples {
            opts.samples = n;
            opts.four_samples = (n / 10).max(1);
        }
        checks.extend(suites::resonance(&opts)?.0);
    }
    if wants(Suite::Identity) {
        checks.extend(suites::identity(a.samples.unwrap_or(10_000), a.seed)?);
    }
    if wants(Suite::Decay) {
        checks.extend(suites::decay()?);
    }
    if wants(Suite::Conservation) {
        checks.extend(suites::conservation()?);
    }
    if wants(Suite::Bootstrap) || wants(Suite::Scattering) {
        let run = suites::reference_run()?;
        if wants(Suite::Bootstrap) {
            checks.extend(suites::bootstrap(&run)?);
        }
        if wants(Suite::Scattering) {
            checks.extend(suites::scattering(&run)?);
        }
    }
    if wants(Suite::Multiplier) {
        checks.extend(suites::multiplier(a.trials, a.seed)?);
    }
    if let Some(dir) = a.out {
        let canon = format!(
            "samples = {}\nseed = {}\nsuite = {:?}\ntrials = {}\n",
            a.samples.map_or("default".to_string(), |n| n.to_string()),
            a.seed,
            a.suite,
            a.trials
        );
        let run = RunDir::create(dir, "verify", canon)?;
        with_run_dir(run, |run| {
            let mut w = run.writer("verify.ndjson")?;
            for c in &checks {
                w.record(c)?;
            }
            w.finish()?;
            Ok(Outcome::Passed)
        })?;
    }
    Ok(report_checks(&checks, true))
}

pub fn parse_band_arg(s: &str) -> Result<Band> {
    let (lo, hi) = parse_range(s)?;
    Ok(Band { xi_min: lo, xi_max: hi })
}

