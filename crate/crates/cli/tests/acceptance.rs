//! Acceptance suite: one PASS/FAIL line per criterion, with the checks behind it.
//!
//! Lines are written straight to the stdout handle so they show up in a plain
//! `cargo test` log.

use std::io::Write;
use std::time::Instant;

use whitham_cli::commands::DIAGNOSTICS_FILE;
use whitham_cli::manifest::RunManifest;
use whitham_cli::suites::{self, Check, ResonanceOptions};

/// Criteria that cannot pass as stated. Criterion 6 asks for a flat trend in
/// ‖xf‖₂·t^{-1/6}; for small data ‖xf‖₂ is essentially constant, so that series has
/// slope -1/6. The check is run unchanged and reported as FAIL.
const KNOWN_FAILURES: &[u32] = &[6];

struct Outcome {
    id: u32,
    passed: bool,
}

fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn report(id: u32, title: &str, checks: &[Check], seconds: f64, budget: f64) -> Outcome {
    for c in checks {
        say(&format!("    {}", c.line()));
    }
    let in_time = seconds < budget;
    let passed = suites::all_pass(checks) && in_time;
    say(&format!(
        "[acceptance] criterion {id} {}: {title} ({seconds:.1} s, budget {budget:.0} s)",
        if passed { "PASS" } else { "FAIL" }
    ));
    Outcome { id, passed }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let clock = Instant::now();
    let v = f();
    (v, clock.elapsed().as_secs_f64())
}

fn reproducibility() -> anyhow::Result<Vec<Check>> {
    let dir = tempfile::tempdir()?;
    let cfg = dir.path().join("conservation.cfg");
    std::fs::write(&cfg, suites::CONSERVATION_CONFIG)?;
    let mut sums = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let code = whitham_cli::dispatch([
            "whitham-lab",
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        anyhow::ensure!(code == 0, "simulate exited with {code}");
        let m = RunManifest::read(&out)?;
        let sum = m.checksum(DIAGNOSTICS_FILE).map(str::to_string);
        let bytes = std::fs::read(out.join(DIAGNOSTICS_FILE))?;
        sums.push((sum, bytes, m.config_hash));
    }
    let (a, b) = (&sums[0], &sums[1]);
    Ok(vec![
        Check::assert(
            "manifest checksums",
            a.0.is_some() && a.0 == b.0 && a.2 == b.2,
            format!("diagnostics sha256 {} / {}", a.0.as_deref().unwrap_or("-"), b.0.as_deref().unwrap_or("-")),
        ),
        Check::assert(
            "byte-identical diagnostics",
            a.1 == b.1,
            format!("{} and {} bytes", a.1.len(), b.1.len()),
        ),
    ])
}

#[test]
fn acceptance_criteria() {
    let mut outcomes = Vec::new();

    let (c, s) = timed(|| suites::dispersion().unwrap());
    outcomes.push(report(1, "symbol correctness", &c, s, 5.0));

    let (c, s) = timed(|| suites::resonance(&ResonanceOptions::default()).unwrap().0);
    outcomes.push(report(2, "resonance inequalities", &c, s, 60.0));

    let (c, s) = timed(|| suites::identity(10_000, 1).unwrap());
    outcomes.push(report(3, "Φ_ξ identity", &c, s, 5.0));

    let (c, s) = timed(|| suites::decay().unwrap());
    outcomes.push(report(4, "linear decay", &c, s, 120.0));

    let (c, s) = timed(|| suites::conservation().unwrap());
    outcomes.push(report(5, "nonlinear conservation", &c, s, 300.0));

    let (run, s_run) = timed(|| suites::reference_run().unwrap());
    let (c, s) = timed(|| suites::bootstrap(&run).unwrap());
    outcomes.push(report(6, "bootstrap monitors", &c, s_run + s, 600.0));

    let (c, s) = timed(|| suites::scattering(&run).unwrap());
    outcomes.push(report(7, "modified scattering", &c, s, 600.0));

    let (c, s) = timed(|| suites::multiplier(100, 0).unwrap());
    outcomes.push(report(8, "multiplier suite", &c, s, 120.0));

    let (c, s) = timed(|| reproducibility().unwrap());
    outcomes.push(report(9, "reproducibility", &c, s, 600.0));

    let passed = outcomes.iter().filter(|o| o.passed).count();
    say(&format!("[acceptance] {passed}/{} criteria passed", outcomes.len()));
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_FAILURES.contains(&o.id);
        if known && !o.passed {
            say(&format!("[acceptance] criterion {} is a known failure (see README)", o.id));
        } else if known {
            say(&format!("[acceptance] criterion {} passed although listed as a known failure", o.id));
        } else if !o.passed {
            unexpected.push(o.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
