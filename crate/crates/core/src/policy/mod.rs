//! Tabular stage-split policies and the policy-gradient smooth best
//! response against a mixture of historical opponents.
//!
//! Losses are minimized with the negentropy `Σ p log p` as regularizer;
//! learners that maximize return use the matching entropy bonus `−Σ p log p`.

mod gradient;
mod mixture;
mod rollout;
mod tabular;

pub use gradient::{
    entropy_logit_gradient, logits_to_behavioral, policy_gradient, sbr_exact, sbr_objective,
    solve_sbr_pg, PgConfig,
};
pub use mixture::{sample_opponent, OpponentMixture};
pub use rollout::{
    play_episode, play_policies, reinforce_update, Actor, PolicyActor, RolloutBatch, RolloutStep,
    Trajectory,
};
pub use tabular::{tempered, TabularPolicy};
