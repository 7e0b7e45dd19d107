//! Shared fixtures for the benchmarks.

use osfp_core::cardgame::{to_game_tree, CardGameTree, GameConfig, DEFAULT_NODE_BUDGET};

pub fn small_tree() -> CardGameTree {
    to_game_tree(&GameConfig::small(), DEFAULT_NODE_BUDGET).expect("small preset fits the default budget")
}
