//! Numerical laboratory for the modified Whitham equation
//!
//! ```text
//! u_t - sqrt(tanh D / D) u_x = (u^3)_x
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`dispersion`]: the symbol `Λ(ξ) = ξ sqrt(tanh ξ / ξ)` and comparison symbols.
//! - [`grid`]: periodic grids standing in for the line, and spectral fields.
//! - [`lp`]: dyadic bump functions, Littlewood–Paley projections, dyadic time partitions.
//! - [`resonance`]: the four-wave resonance function, resonance inequality scans and
//!   the `Φ_ξ = m₁Φ + m₂Φ_η + m₃Φ_σ` decomposition.
//! - [`oscillatory`]: the linear propagator, dispersive decay scans, stationary points,
//!   interaction suprema.
//! - [`norms`]: the monitored norms (Sobolev, Z, weighted, Hamiltonian).
//! - [`solver`]: integrating-factor RK4 / ETDRK4 pseudospectral integrator.
//! - [`scattering`]: the logarithmic phase correction and convergence reports.
//! - [`multiplier`]: S-norms and dense trilinear operators.
//!
//! Fourier convention throughout: `f̂(ξ) = (2π)⁻¹ ∫ f(x) e^{-ixξ} dx`,
//! `f(x) = ∫ f̂(ξ) e^{ixξ} dξ`.

pub mod dispersion;
pub mod error;
pub mod fit;
pub mod grid;
pub mod lp;
pub mod multiplier;
pub mod norms;
pub mod oscillatory;
pub mod resonance;
pub mod scattering;
pub mod solver;

pub use dispersion::{Symbol, SymbolKind};
pub use error::{Error, Result};
pub use grid::{GridSpec, SpectralField};
