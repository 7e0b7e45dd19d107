//! Equilibrium computation for two-player zero-sum games.
//!
//! Sign convention used throughout: `u(x, y) = xᵀAy` is a loss for player 1
//! and a gain for player 2. Extensive-form leaves store player 1's return
//! `R = −u`.

pub mod cardgame;
pub mod efg;
pub mod league;
pub mod mcts;
pub mod error;
pub mod ngame;
pub mod numeric;
pub mod policy;
pub mod solvers;

pub use efg::Player;
pub use error::{Error, Result};
