//! Equilibrium computation for adversarial team games.
//!
//! A team of players with identical payoffs minimizes a utility `U` against an
//! adversary (or a team of maximizers) that maximizes it. This crate computes
//! approximate Nash equilibria by projected gradient descent on the team side,
//! extends team strategies to full equilibria through LP duality, and tracks
//! progress with a Moreau-envelope potential.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, tracing output
//! and the command line live in the `teamsolve` crate.
//!
//! Module map:
//!
//! * [`game`]: payoff tensors, mixed profiles, expected utilities and gradients.
//! * [`lp`]: dense two-phase simplex and the zero-sum value oracle.
//! * [`extension`]: extending a team strategy to a Nash profile, NE gaps.
//! * [`dynamics`]: simplex projection and the gradient-descent-max loop.
//! * [`moreau`]: proximal points, the potential `g` and stationarity.
//! * [`two_team`]: games with several maximizers and the GDmm loop.
//! * [`generators`]: random games, congestion games, potential-game embeddings.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
mod error;
pub mod extension;
pub mod game;
pub mod generators;
mod linalg;
pub mod lp;
pub mod moreau;
mod qp;
pub mod two_team;

pub use error::{Error, Result};
pub use game::{MixedProfile, Payoff, Representation, SmoothnessBounds, TeamGame};
