use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gradient::PgConfig;
use super::tabular::TabularPolicy;
use crate::cardgame::{CardGameState, Rules, Stage};
use crate::efg::Player;
use crate::error::Result;
use crate::numeric::sample_categorical;

/// Chooses moves for whichever player is to act in a card game.
pub trait Actor {
    /// `(flat action id, probability with which it was chosen)`.
    fn choose(&mut self, h: &CardGameState, rng: &mut ChaCha8Rng) -> Result<(usize, f64)>;
}

/// Samples from a tabular policy at temperature `tau`.
#[derive(Debug, Clone, Copy)]
pub struct PolicyActor<'a> {
    pub policy: &'a TabularPolicy,
    pub tau: f64,
}

impl Actor for PolicyActor<'_> {
    fn choose(&mut self, h: &CardGameState, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
        let player = h.to_act().expect("actor called on a decision state");
        let legal = h.legal_actions(player)?.legal();
        let p = self.policy.probs_over(h.stage(), h.info_hash(player), &legal, self.tau);
        let i = sample_categorical(&p, rng);
        Ok((legal[i], p[i]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutStep {
    pub player: Player,
    pub stage: Stage,
    /// Information-state key of the acting player.
    pub key: u64,
    pub legal: Vec<usize>,
    pub action: usize,
    pub behavior_prob: f64,
    /// Product of the acting player's behavior probabilities before this step.
    pub own_reach: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<RolloutStep>,
    /// Player-1 reward in `{−1, 0, +1}`.
    pub reward: f64,
    /// Which seats the learner controlled.
    pub learner: [bool; 2],
    /// Historical opponent index, `None` for self-play.
    pub opponent: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RolloutBatch {
    pub trajectories: Vec<Trajectory>,
}

/// Plays one game from a fresh deal; `actors[i]` moves for player `i + 1`.
pub fn play_episode(
    rules: &Arc<Rules>,
    deal_seed: u64,
    actors: [&mut dyn Actor; 2],
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<RolloutStep>, f64)> {
    let mut h = CardGameState::with_deal(rules.clone(), deal_seed)?;
    let mut steps = Vec::new();
    let mut reach = [1.0f64; 2];
    loop {
        if let Some(r) = h.outcome() {
            return Ok((steps, r));
        }
        let player = h.to_act().expect("non-terminal state has a player");
        let key = h.info_hash(player);
        let stage = h.stage();
        let legal = h.legal_actions(player)?.legal();
        let (action, prob) = actors[player.index()].choose(&h, rng)?;
        steps.push(RolloutStep {
            player,
            stage,
            key,
            legal,
            action,
            behavior_prob: prob,
            own_reach: reach[player.index()],
        });
        reach[player.index()] *= prob;
        h.apply(action)?;
    }
}

/// Convenience wrapper: plays `policies` against each other at temperature
/// `tau` with an rng seeded from `seed`.
pub fn play_policies(
    rules: &Arc<Rules>,
    policies: [&TabularPolicy; 2],
    tau: f64,
    seed: u64,
) -> Result<(Vec<RolloutStep>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = PolicyActor { policy: policies[0], tau };
    let mut b = PolicyActor { policy: policies[1], tau };
    play_episode(rules, seed, [&mut a, &mut b], &mut rng)
}

/// One policy-gradient step on the learner's decisions in `batch`.
///
/// Each decision contributes `γ^k (G − b) ∇ log π(a|s)`, where `k` counts the
/// learner's later decisions in the game and `b` is the leave-one-out mean
/// return of the same seat. The per-state entropy bonus
/// `−Σ π log π` is added with weight `entropy_weight`. Off-policy actions are
/// reweighted by `min(1, π/β)`. Rows of a `frozen` stage are left untouched.
pub fn reinforce_update(
    policy: &mut TabularPolicy,
    batch: &RolloutBatch,
    cfg: &PgConfig,
    entropy_weight: f64,
    frozen: Option<Stage>,
) {
    let n = batch.trajectories.len();
    if n == 0 {
        return;
    }
    let mut totals = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for t in &batch.trajectories {
        for p in Player::BOTH {
            if t.learner[p.index()] {
                totals[p.index()] += p.sign() * t.reward;
                counts[p.index()] += 1;
            }
        }
    }
    let mut grads: BTreeMap<(u8, u64), Vec<f64>> = BTreeMap::new();
    let size = policy.action_size();
    for t in &batch.trajectories {
        let mut left = [0u32; 2];
        for s in &t.steps {
            left[s.player.index()] += 1;
        }
        for s in &t.steps {
            let pi = s.player.index();
            left[pi] -= 1;
            if !t.learner[pi] || Some(s.stage) == frozen {
                continue;
            }
            let ret = s.player.sign() * t.reward;
            let baseline = if counts[pi] > 1 {
                (totals[pi] - ret) / (counts[pi] - 1) as f64
            } else {
                0.0
            };
            let probs = policy.probs_over(s.stage, s.key, &s.legal, 1.0);
            let idx = s.legal.iter().position(|&a| a == s.action).expect("taken action is legal");
            let ratio = (probs[idx] / s.behavior_prob).min(1.0);
            let g = ratio * cfg.discount.powi(left[pi] as i32) * (ret - baseline) / n as f64;
            let neg_ent: f64 = probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum();
            let stage_tag = match s.stage {
                Stage::Cb => 0,
                Stage::Bt => 1,
            };
            let row = grads.entry((stage_tag, s.key)).or_insert_with(|| vec![0.0; size]);
            for (j, &a) in s.legal.iter().enumerate() {
                let ind = if j == idx { 1.0 } else { 0.0 };
                let ent = if probs[j] > 0.0 {
                    -probs[j] * (probs[j].ln() - neg_ent)
                } else {
                    0.0
                };
                row[a] += g * (ind - probs[j]) + entropy_weight * ent / n as f64;
            }
        }
    }
    for ((tag, key), g) in grads {
        let stage = if tag == 0 { Stage::Cb } else { Stage::Bt };
        let row = policy.logits_mut(stage, key);
        for (l, v) in row.iter_mut().zip(g) {
            *l += cfg.lr * v;
        }
    }
}
