//! A miniature two-stage strategy card game: players first draft a deck
//! (CB stage) and then fight over a few lanes (BT stage).
//!
//! Rules: mana is `min(round, max_mana)` and refills every turn; each turn
//! starts by drawing `draw_per_turn` cards (skipped when the hand is full or
//! the deck empty); creatures fight inside their lane with simultaneous
//! damage and may hit the opponent's face only when the opposing lane is
//! empty; each creature attacks at most once per turn. The game ends when a
//! hero drops to 0 hp, or after `max_turns` rounds, where higher hp wins and
//! equal hp is a draw. Rewards are `±1` or `0` for player 1.

mod actions;
mod cards;
mod config;
mod observe;
mod replay;
mod state;
mod tree;

pub use actions::{Action, ActionLayout, ActionMask, AttackTarget, PlayTarget};
pub use cards::{generate_pool, Card, CardId, CardKind, CardSet, SpellEffect};
pub use config::{CbMode, GameConfig, LANE_CAPACITY};
pub use observe::{observe, InfoFeatures, InfoState};
pub use replay::{write_trajectory, Replay, TrajectoryRecord};
pub use state::{CardGameState, Creature, Rules, Side, Stage, StepOutcome};
pub use tree::{to_game_tree, CardGameTree, InfosetMeta, DEFAULT_NODE_BUDGET};
