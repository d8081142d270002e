use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use whitham_core::lp::{phi_l, psi_k, smooth_step};
use whitham_core::multiplier::random_band_limited;
use whitham_core::oscillatory::propagate;
use whitham_core::resonance::{self, ResonancePoint, Sign};
use whitham_core::scattering::ScatteringState;
use whitham_core::{GridSpec, Symbol};

fn sign(b: bool) -> Sign {
    if b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

proptest! {
    #[test]
    fn symbol_is_odd_and_derivatives_alternate(xi in -60.0f64..60.0) {
        let s = Symbol::whitham();
        for order in 0..=3u32 {
            let a = s.eval(xi, order).unwrap();
            let b = s.eval(-xi, order).unwrap();
            // odd orders of an odd function are even
            let expected = if order % 2 == 0 { -a } else { a };
            prop_assert!((b - expected).abs() <= 1e-14 * (1.0 + a.abs()), "order {order}: {a} vs {b}");
        }
    }

    #[test]
    fn group_velocity_is_bounded(xi in -1e3f64..1e3) {
        let d = Symbol::whitham().eval(xi, 1).unwrap();
        prop_assert!(d > 0.0 && d <= 1.0 + 1e-15);
    }

    #[test]
    fn smooth_step_is_symmetric(s in -0.5f64..1.5) {
        prop_assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dyadic_pieces_sum_to_one(xi in -500.0f64..500.0, l in -6i32..0) {
        let total = phi_l(xi, l) + (l + 1..=12).map(|k| psi_k(xi, k)).sum::<f64>();
        prop_assert!((total - 1.0).abs() < 1e-12, "sum {total}");
        let nonzero = (l + 1..=12).filter(|&k| psi_k(xi, k) != 0.0).count();
        prop_assert!(nonzero <= 2);
    }

    #[test]
    fn phase_is_antisymmetric(
        xi in -20.0f64..20.0,
        eta in -20.0f64..20.0,
        sigma in -20.0f64..20.0,
        signs in any::<[bool; 3]>(),
    ) {
        let s = Symbol::whitham();
        let p = ResonancePoint::new(xi, eta, sigma).with_signs([sign(signs[0]), sign(signs[1]), sign(signs[2])]);
        let a = resonance::phi(&s, &p);
        let b = resonance::phi(&s, &p.negated());
        prop_assert!((a + b).abs() <= 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn propagation_is_unitary(seed in any::<u64>(), t in -500.0f64..500.0) {
        let grid = GridSpec::new(256, 32.0 * std::f64::consts::PI).unwrap();
        let f = random_band_limited(grid, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = propagate(&Symbol::whitham(), &f, t);
        prop_assert!((g.l2_norm() - f.l2_norm()).abs() <= 1e-13 * f.l2_norm());
        prop_assert!(g.hermitian_defect() <= 1e-14 * (1.0 + f.sup_norm()));
        let back = propagate(&Symbol::whitham(), &g, -t);
        let err = back.sub(&f).unwrap().l2_norm();
        prop_assert!(err <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn phase_correction_preserves_modulus(seed in any::<u64>(), t in 0.5f64..50.0) {
        let grid = GridSpec::new(128, 16.0 * std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f0 = random_band_limited(grid, &mut rng);
        let f1 = random_band_limited(grid, &mut rng);
        let mut st = ScatteringState::new(&Symbol::whitham(), 1.0, f0).unwrap();
        st.accumulate(&f1, t).unwrap();
        for (g, f) in st.g().coefficients().iter().zip(f1.coefficients()) {
            prop_assert!((g.norm() - f.norm()).abs() <= 1e-14 * (1.0 + f.norm()));
        }
        let h = st.phase();
        prop_assert!(h.iter().all(|v| v.is_finite()));
        // H is odd in ξ because ξ/|Λ''(ξ)| is odd
        let n = grid.n();
        for j in 1..n / 2 {
            prop_assert!((h[j] + h[n - j]).abs() <= 1e-12 * (1.0 + h[j].abs()));
        }
    }
}

#[test]
fn zero_field_stays_zero_under_propagation() {
    let grid = GridSpec::new(64, 8.0).unwrap();
    let z = whitham_core::SpectralField::zeros(grid);
    let p = propagate(&Symbol::whitham(), &z, 3.0);
    assert!(p.coefficients().iter().all(|c| *c == Complex64::default()));
}
