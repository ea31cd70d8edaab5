//! Steady states and photon statistics of a driven two-level atom and a
//! cavity containing a degenerate parametric oscillator, both coupled
//! chirally to a one-dimensional waveguide.
//!
//! * [`fock`], [`dynamics`] — operators, superoperators, steady-state solver
//!   and adaptive time evolution.
//! * [`model`] — system parameters and the full master equation.
//! * [`collective`], [`truncated`] — the five-state collective basis and the
//!   independent five-state master equation.
//! * [`dark_state`] — analytic dark-state conditions and residuals.
//! * [`observables`], [`config`], [`sweep`], [`presets`] — observables, run
//!   configuration, sweeps and built-in figure protocols.

pub mod collective;
pub mod config;
pub mod dark_state;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod model;
pub mod observables;
pub mod presets;
pub mod sweep;
pub mod truncated;

pub use error::{Error, Result};
