//! Extensive-form games in sequence form.
//!
//! Leaves carry the player-1 return `R = −u`; [`Player::sign`] converts it to
//! either player's own return. Reach probabilities `ρ` always include chance.

pub mod fixtures;
mod smoothing;
mod solve;
mod tree;
mod treeplex;
mod values;

pub use smoothing::{dilated_entropy, sbr_treeplex, sbr_treeplex_with_value, smoothed_objective};
pub use solve::{
    solve_efg, treeplex_payoff_vector, write_efg_trace_csv, EfgSolverState, EfgTraceRow,
};
pub use tree::{GameTree, NodeId, NodeKind, Player, TreeBuilder};
pub use treeplex::{
    behavioral_to_sequence, sequence_to_behavioral, uniform_sequence, BehavioralPolicy,
    InfosetInfo, SequencePolicy, Treeplex, TREEPLEX_TOL,
};
pub use values::{
    counterfactual_q, exact_br, expected_return, exploitability_efg, reward_vector, CfValue,
};

pub(crate) use treeplex::sequence_to_behavioral_unchecked;
