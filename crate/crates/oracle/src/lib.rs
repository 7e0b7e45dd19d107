//! Independent reference implementations used only by tests: brute-force
//! enumeration, an LP solver, and generic numerical minimizers. Nothing here
//! shares code paths with the algorithms under test beyond the game
//! containers themselves.

pub mod enumerate;
pub mod lp;
pub mod minimax;
pub mod minimize;
