//! Monte-Carlo tree search over the searching player's own moves on the
//! true world state. Opponent turns are sampled from a policy and never get
//! tree nodes.

mod actor;
pub mod fixtures;
mod search;

pub use actor::{RolloutMixActor, RolloutMixParams};
pub use search::{
    dirichlet, playout_value, prior_mix, search, MctsNode, MctsParams, MctsTree, SearchGame,
    SearchPolicy, SearchResult,
};
