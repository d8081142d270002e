//! End-to-end checks on small runs: linear limit, conservation and ε-scaling of the
//! nonlinear profile increments.

use whitham_core::oscillatory::propagate;
use whitham_core::solver::{self, Scheme, SolverConfig};
use whitham_core::{GridSpec, Symbol};

fn small(epsilon: f64, t_end: f64) -> SolverConfig {
    let grid = GridSpec::new(1024, 128.0 * std::f64::consts::PI).unwrap();
    let mut cfg = SolverConfig::new(grid, 0.1, t_end);
    cfg.epsilon = epsilon;
    cfg
}

#[test]
fn tiny_data_follows_linear_flow() {
    let cfg = small(1e-9, 20.0);
    let traj = solver::run(&cfg, &[0.0, 20.0]).unwrap();
    let u0 = &traj.snapshots[0].u_hat;
    let expected = propagate(&Symbol::whitham(), u0, 20.0);
    let err = traj.snapshots[1].u_hat.sub(&expected).unwrap().l2_norm();
    assert!(err < 1e-13 * u0.l2_norm(), "relative error {}", err / u0.l2_norm());
    // the profile is then static
    let df = traj.snapshots[1].f_hat.sub(&traj.snapshots[0].f_hat).unwrap().l2_norm();
    assert!(df < 1e-13 * u0.l2_norm());
}

#[test]
fn invariants_conserved_by_both_schemes() {
    for scheme in [Scheme::Ifrk4, Scheme::Etdrk4] {
        let mut cfg = small(0.05, 30.0);
        cfg.scheme = scheme;
        let traj = solver::run(&cfg, &[0.0, 10.0, 20.0, 30.0]).unwrap();
        let d0 = &traj.diagnostics[0];
        for d in &traj.diagnostics[1..] {
            let l2 = (d.l2_norm - d0.l2_norm).abs() / d0.l2_norm;
            let h = (d.hamiltonian - d0.hamiltonian).abs() / d0.hamiltonian.abs();
            assert!(l2 < 1e-8 && h < 1e-7, "{scheme:?} at t = {}: L2 {l2:.2e}, H {h:.2e}", d.t);
        }
    }
}

#[test]
fn profile_increments_scale_cubically() {
    // f̂ is linear in ε to leading order, so f̂(T) - f̂(T/2) is O(ε³)
    let increment = |eps: f64| {
        let traj = solver::run(&small(eps, 32.0), &[16.0, 32.0]).unwrap();
        traj.snapshots[1].f_hat.sub(&traj.snapshots[0].f_hat).unwrap().l2_norm()
    };
    let ratio = increment(0.04) / increment(0.02);
    assert!((ratio - 8.0).abs() < 0.3 * 8.0, "increment ratio {ratio}");
}

#[test]
fn trajectories_are_deterministic() {
    let cfg = small(0.05, 5.0);
    let a = solver::run(&cfg, &[0.0, 5.0]).unwrap();
    let b = solver::run(&cfg, &[0.0, 5.0]).unwrap();
    assert_eq!(a.diagnostics, b.diagnostics);
    assert_eq!(a.snapshots[1].u_hat, b.snapshots[1].u_hat);
}
