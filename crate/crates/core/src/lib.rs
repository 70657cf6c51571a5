//! Two-player inventory competition with Bayesian opponent learning.
//!
//! Two newsvendor-style players stock a product each stage; a share of one
//! player's unmet demand spills over to the other, coupling their payoffs.
//! Neither observes the opponent's action: each keeps a grid belief over it,
//! best-responds to the belief's mode, observes only their own sales, and
//! updates by Bayes' rule. This crate provides the one-stage game
//! ([`payoff`], [`demand`]), equilibrium solving and interval-contraction
//! diagnostics ([`equilibrium`]), the belief machinery ([`belief`]), and the
//! repeated-game simulator ([`sim`]).

pub mod belief;
pub mod demand;
pub mod equilibrium;
mod error;
pub mod params;
pub mod payoff;
pub mod sim;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
