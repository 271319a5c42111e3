//! Numerical laboratory for Toda shock waves.
//!
//! Two independent routes to the same answer:
//!
//! * [`lattice_sim`] integrates the doubly-infinite Toda lattice
//!   `ḃ(n) = 2(a(n)² − a(n−1)²)`, `ȧ(n) = a(n)(b(n+1) − b(n))`
//!   from steplike initial data on a truncated domain, and
//! * [`spectral_map`], [`scattering`], [`gfunction`], [`elliptic`] and
//!   [`asymptotics`] assemble the modulated elliptic wave that describes the
//!   solution in the region between the two wave fronts: Whitham edge y(ξ),
//!   g-function and band period B, genus-1 periods and Abel map, theta
//!   functions, phase shift Δ, Dirichlet eigenvalue λ(n,t) and the trace
//!   formulas for (b̂, â(n)² + â(n−1)²).
//!
//! [`harness`] runs both on a (ξ, t) grid and fits the decay exponent of the
//! difference, which should be −1.

pub mod asymptotics;
pub mod elliptic;
pub mod error;
pub mod gfunction;
pub mod harness;
pub mod lattice_sim;
pub mod quad;
pub mod scattering;
pub mod spectral_map;

pub use error::{Error, Result};
pub use spectral_map::BackgroundParams;

/// Boundary side for evaluations on the real cuts.
///
/// Real contours are oriented right-to-left, so the `Plus` side is reached
/// from below (s − i0) and `Minus` from above (s + i0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}
