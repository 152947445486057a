//! Resonance fluorescence of a bichromatically driven V-type three-level
//! atom.
//!
//! The crate builds the Lindblad generator of the atom, solves for its
//! steady state and evaluates two-time correlations of the scattered light
//! through the quantum regression formula:
//!
//! * [`correlations`]: photon-photon correlations `g2(tau)` and the
//!   amplitude-intensity correlation `h_phi(tau)` on both sides of
//!   `tau = 0`, with its split into second- and third-order fluctuation
//!   terms;
//! * [`spectra`]: one-sided cosine spectra of `h_phi`, the normally ordered
//!   quadrature variance and the zero-delay noise functionals;
//! * [`analysis`]: closed-form zero-delay moments, classical-inequality
//!   checks, asymmetry measures and curve fitting;
//! * [`cli`]: scenario presets, sweeps, CSV output and the identity suite
//!   behind the `v3la` binary.
//!
//! Units: `gamma_s = 1`; times in `1 / gamma_s`, frequencies in `gamma_s`.

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod spectra;
pub mod superop;

pub use error::{Error, Result};
pub use liouvillian::{build_liouvillian, steady_state, Atom, Liouvillian, SteadyState};
pub use model::{AtomParams, AtomicOp, DensityOp, Level, Transition};
