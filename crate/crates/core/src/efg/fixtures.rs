//! Small reference games and a random perfect-recall tree generator.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;

use super::tree::{GameTree, NodeId, Player, TreeBuilder};

/// Player 1 picks heads/tails, player 2 answers without seeing it.
/// Player 1 (the minimizer of `u`) receives `+1` on a mismatch.
pub fn matching_pennies() -> GameTree {
    let mut b = TreeBuilder::new();
    let mut p2_nodes = Vec::new();
    for i in 0..2 {
        let kids = (0..2)
            .map(|j| b.terminal(if i == j { -1.0 } else { 1.0 }))
            .collect();
        p2_nodes.push(b.decision(Player::P2, 0, kids));
    }
    let root = b.decision(Player::P1, 0, p2_nodes);
    b.build(root).expect("valid fixture")
}

/// Three-card Kuhn poker with an ante of 1 and a single bet of 1. Game value
/// for player 1 is `−1/18`.
pub fn kuhn_poker() -> GameTree {
    let mut b = TreeBuilder::new();
    let mut deals = Vec::new();
    for c1 in 0..3u64 {
        for c2 in 0..3u64 {
            if c1 == c2 {
                continue;
            }
            let showdown = |stake: f64| if c1 > c2 { stake } else { -stake };
            // Infoset keys: card * 10 + betting history code.
            let key1 = |h: u64| c1 * 10 + h;
            let key2 = |h: u64| c2 * 10 + h;

            // P1 checks, P2 bets, P1 folds or calls.
            let cb_fold = b.terminal(-1.0);
            let cb_call = b.terminal(showdown(2.0));
            let p1_after_bet = b.decision(Player::P1, key1(2), vec![cb_fold, cb_call]);
            let cc = b.terminal(showdown(1.0));
            let p2_after_check = b.decision(Player::P2, key2(0), vec![cc, p1_after_bet]);

            // P1 bets, P2 folds or calls.
            let b_fold = b.terminal(1.0);
            let b_call = b.terminal(showdown(2.0));
            let p2_after_bet = b.decision(Player::P2, key2(1), vec![b_fold, b_call]);

            deals.push(b.decision(Player::P1, key1(0), vec![p2_after_check, p2_after_bet]));
        }
    }
    let outcomes = deals.into_iter().map(|d| (d, 1.0 / 6.0)).collect();
    let root = b.chance(outcomes);
    b.build(root).expect("valid fixture")
}

#[derive(Debug, Clone, Copy)]
pub struct RandomTreeParams {
    pub max_depth: usize,
    pub max_actions: usize,
    /// Probability that a non-root interior node is a chance node.
    pub chance_prob: f64,
    /// Probability of stopping early at a non-root node.
    pub terminal_prob: f64,
    /// Distinct observations the actor can receive at each decision; fewer
    /// means larger information sets.
    pub n_observations: u64,
}

impl Default for RandomTreeParams {
    fn default() -> Self {
        Self {
            max_depth: 4,
            max_actions: 3,
            chance_prob: 0.2,
            terminal_prob: 0.15,
            n_observations: 2,
        }
    }
}

/// Random two-player tree with perfect recall. Infoset keys hash the actor's
/// own history together with a random observation, and the action count is a
/// function of the key, so every infoset is consistent by construction.
pub fn random_tree<R: Rng>(rng: &mut R, params: &RandomTreeParams) -> GameTree {
    let mut b = TreeBuilder::new();
    let root = grow(&mut b, rng, params, 0, [Vec::new(), Vec::new()]);
    b.build(root).expect("generator produces valid trees")
}

fn grow<R: Rng>(
    b: &mut TreeBuilder,
    rng: &mut R,
    params: &RandomTreeParams,
    depth: usize,
    history: [Vec<u64>; 2],
) -> NodeId {
    if depth >= params.max_depth || (depth > 0 && rng.random::<f64>() < params.terminal_prob) {
        return b.terminal(rng.random::<f64>() * 2.0 - 1.0);
    }
    if depth > 0 && rng.random::<f64>() < params.chance_prob {
        let n = rng.random_range(2..=params.max_actions.max(2));
        let w: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
        let total: f64 = w.iter().sum();
        let outcomes = w
            .iter()
            .enumerate()
            .map(|(i, wi)| {
                let mut h = history.clone();
                // Chance outcomes are seen by a random subset of players.
                for ph in h.iter_mut() {
                    if rng.random::<bool>() {
                        ph.push(1000 + i as u64);
                    }
                }
                (grow(b, rng, params, depth + 1, h), wi / total)
            })
            .collect();
        return b.chance(outcomes);
    }
    let player = if rng.random::<bool>() { Player::P1 } else { Player::P2 };
    let obs = rng.random_range(0..params.n_observations.max(1));
    let own = &history[player.index()];
    let mut hasher = DefaultHasher::new();
    (own, obs).hash(&mut hasher);
    let key = hasher.finish();
    let n_actions = 2 + (key % (params.max_actions.max(2) as u64 - 1)) as usize;
    let children = (0..n_actions)
        .map(|a| {
            let mut h = history.clone();
            h[player.index()].extend([key, a as u64]);
            grow(b, rng, params, depth + 1, h)
        })
        .collect();
    b.decision(player, key, children)
}
