//! Decoupled SGDA and friends: solvers for two-player minimax, N-player and
//! federated games in which opponents' strategies are exchanged only at
//! communication-round boundaries, together with exact regime analysis for
//! quadratic games.
//!
//! Between rounds every player takes local gradient steps against the
//! opponent's last communicated strategy. How much that costs depends on the
//! coupling degree `kappa_c = L_c / mu_bar`: games with `kappa_c <= 1/4`
//! ("weakly coupled") contract per round independently of either player's
//! conditioning, and fully decoupled games (`kappa_c = 0`) need no
//! communication at all. The [`spectra`] module computes these constants
//! exactly for quadratic games, [`closed_form`] gives the exact round map
//! the loop engine is checked against, and [`experiments`] reproduces the
//! desk-scale sweep protocols.
//!
//! Start at [`solvers::run`] for single runs, or see the `examples/`
//! directory, one runnable example per capability.

pub mod closed_form;
pub mod config;
pub mod error;
pub mod experiments;
pub mod federated;
pub mod games;
pub mod ghost;
pub mod harness;
pub mod noise;
pub mod norms;
pub mod nplayer;
pub mod point;
pub mod rng;
pub mod sample;
pub mod solvers;
pub mod spectra;

pub use error::{Error, Result};
pub use games::{operator_f, operator_f_bar, QuadraticGame, ToyGanGame, TwoPlayerGame};
pub use noise::{NoiseModel, OracleKind};
pub use norms::NormSpec;
pub use point::JointPoint;
pub use solvers::{run, Method, RunConfig, RunTrace, StopRule};
