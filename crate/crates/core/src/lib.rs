//! Simulation and asymptotic analysis of generalized two-color urn schemes.
//!
//! An urn holds amber and blue balls. At each stage a ball is drawn uniformly
//! at random and returned together with extra balls whose colors depend on the
//! drawn color: an amber draw adds `A - a_k` amber and `a_k` blue balls, a blue
//! draw adds `b_k` amber and `B - b_k` blue balls, where `a_k` and `b_k` are
//! i.i.d. integer random variables with finite support. Negative entries remove
//! balls, so one color may run out; the first stage at which that happens is
//! the exhaustion time `tau`.
//!
//! The crate provides:
//! - [`distributions`]: finite-support integer laws with exact rational means,
//! - [`urn`]: the state machine and seeded trajectory simulation,
//! - [`asymptotics`]: limit proportions and regime classification,
//! - [`survival`]: exact backward dynamic programming for `P{tau > M}`,
//! - [`montecarlo`]: batch experiments and convergence diagnostics,
//! - [`config`] and [`plot`]: JSON configuration and SVG trajectory plots.

pub mod asymptotics;
pub mod config;
pub mod distributions;
pub mod montecarlo;
pub mod plot;
pub mod survival;
pub mod urn;

pub use asymptotics::{classify, Regime, RegimeReport};
pub use distributions::IntegerDistribution;
pub use survival::SurvivalGrid;
pub use urn::{Color, TauKind, Trajectory, UrnScheme, UrnState};
