use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{CbMode, GameConfig};

pub type CardId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpellEffect {
    DamageFace,
    DamageCreature,
    BuffAttack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CardKind {
    Creature { attack: i32, health: i32 },
    Spell { effect: SpellEffect, magnitude: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Card {
    pub id: CardId,
    pub cost: u32,
    #[serde(flatten)]
    pub kind: CardKind,
}

const CREATURE_SHARE: f64 = 0.7;

/// Random pool: creatures cost `1..=min(max_mana, 4)` with attack and
/// health in `1..=cost + 1`; spells cost `1..=2` with magnitude `1..=2`.
pub fn generate_pool(config: &GameConfig, rng: &mut ChaCha8Rng) -> Vec<Card> {
    let max_cost = config.max_mana.clamp(1, 4);
    (0..config.pool_size)
        .map(|id| {
            if rng.random_bool(CREATURE_SHARE) {
                let cost = rng.random_range(1..=max_cost);
                let top = cost as i32 + 1;
                Card {
                    id,
                    cost,
                    kind: CardKind::Creature {
                        attack: rng.random_range(1..=top),
                        health: rng.random_range(1..=top),
                    },
                }
            } else {
                let effect = match rng.random_range(0..3) {
                    0 => SpellEffect::DamageFace,
                    1 => SpellEffect::DamageCreature,
                    _ => SpellEffect::BuffAttack,
                };
                Card {
                    id,
                    cost: rng.random_range(1..=max_cost.min(2)),
                    kind: CardKind::Spell {
                        effect,
                        magnitude: rng.random_range(1..=2),
                    },
                }
            }
        })
        .collect()
}

/// Pool and arena candidates, fixed by the config's seed and shared by both
/// players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardSet {
    pub pool: Vec<Card>,
    /// Per CB round, the offered pool ids in ascending order (arena only).
    pub candidates: Vec<Vec<CardId>>,
}

impl CardSet {
    pub fn generate(config: &GameConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let pool = generate_pool(config, &mut rng);
        let candidates = match config.cb_mode {
            CbMode::Arena => (0..config.deck_size)
                .map(|_| {
                    let mut c = sample(&mut rng, config.pool_size, config.candidates_per_round)
                        .into_vec();
                    c.sort_unstable();
                    c
                })
                .collect(),
            CbMode::Constructed => Vec::new(),
        };
        Self { pool, candidates }
    }

    /// One line per card: `id kind cost ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.pool {
            match c.kind {
                CardKind::Creature { attack, health } => {
                    s += &format!("{} creature cost={} attack={attack} health={health}\n", c.id, c.cost)
                }
                CardKind::Spell { effect, magnitude } => {
                    let e = match effect {
                        SpellEffect::DamageFace => "damage_face",
                        SpellEffect::DamageCreature => "damage_creature",
                        SpellEffect::BuffAttack => "buff_attack",
                    };
                    s += &format!("{} spell cost={} effect={e} magnitude={magnitude}\n", c.id, c.cost)
                }
            }
        }
        s
    }
}
