//! Numerical laboratory for the coupled quadratic-derivative Schrödinger system
//!
//! ```text
//! (i∂t + αΔ)u = −(∇·w)v
//! (i∂t + βΔ)v = −(∇·w̄)u
//! (i∂t + γΔ)w =  ∇(u·v̄)
//! ```
//!
//! on a periodic box, with `u`, `v`, `w` d-dimensional complex vector fields
//! and nonzero dispersion coefficients `α`, `β`, `γ`.
//!
//! The crate is organised around six concerns:
//!
//! - [`params`] / [`resonance`] — exact algebra in the dispersion coefficients:
//!   the discriminants θ and κ, the degenerate-case factors M and M±, regime
//!   classification, resonance-symbol lower bounds, and factorization checks.
//! - [`grid`] / [`field`] — periodic grids, dual physical/spectral fields,
//!   Sobolev norms, dyadic frequency projections, free propagators, the
//!   scaling transform, and band-limited random data.
//! - [`integrator`] / [`duhamel`] — integrating-factor RK4 time stepping with
//!   exact linear propagators, and the Duhamel/Picard fixed-point iteration.
//! - [`diagnostics`] — conserved quantities, a priori gradient bounds, and
//!   scattering-profile extraction via free-flow pullbacks.
//! - [`experiments`] — norm-inflation growth exponents from semi-analytic
//!   second Picard iterates, bilinear product-norm probes, and the scaling
//!   equivariance test.
//! - [`config`] / [`io`] / [`run`] — the declarative run configuration, CSV
//!   and binary snapshot formats, and orchestration behind the `qdnls` CLI.

pub mod config;
pub mod diagnostics;
pub mod duhamel;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod fit;
pub mod grid;
pub mod integrator;
pub mod io;
pub mod params;
pub mod quadrature;
pub mod resonance;
pub mod run;
pub mod verify;

pub use error::Error;
pub use field::{Repr, SpectralField, StateTriple};
pub use grid::TorusGrid;
pub use params::{SigmaTriple, SystemParams};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
