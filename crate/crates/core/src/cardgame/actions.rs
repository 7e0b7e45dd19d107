use serde::{Deserialize, Serialize};

use super::config::{GameConfig, LANE_CAPACITY};
use crate::error::{Error, Result};

/// Where a played card goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlayTarget {
    /// Creature placement.
    Lane(usize),
    /// Opponent hero.
    Face,
    Enemy { lane: usize, slot: usize },
    Ally { lane: usize, slot: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackTarget {
    Face,
    Slot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// CB pick: candidate index in arena mode, pool id in constructed mode.
    Pick(usize),
    Play { hand_slot: usize, target: PlayTarget },
    Attack { lane: usize, slot: usize, target: AttackTarget },
    EndTurn,
}

/// Flat action space: CB picks, then `hand_limit × targets` plays, then
/// `lanes × capacity × (1 + capacity)` attacks, then end-turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionLayout {
    pub cb_width: usize,
    pub hand_limit: usize,
    pub lanes: usize,
}

impl ActionLayout {
    pub fn new(config: &GameConfig) -> Self {
        Self {
            cb_width: config.cb_width(),
            hand_limit: config.hand_limit,
            lanes: config.lanes,
        }
    }

    fn target_width(&self) -> usize {
        self.lanes + 1 + 2 * self.lanes * LANE_CAPACITY
    }

    fn play_base(&self) -> usize {
        self.cb_width
    }

    fn attack_base(&self) -> usize {
        self.play_base() + self.hand_limit * self.target_width()
    }

    pub fn end_turn_id(&self) -> usize {
        self.attack_base() + self.lanes * LANE_CAPACITY * (1 + LANE_CAPACITY)
    }

    pub fn size(&self) -> usize {
        self.end_turn_id() + 1
    }

    pub fn encode(&self, a: Action) -> usize {
        match a {
            Action::Pick(i) => i,
            Action::Play { hand_slot, target } => {
                let t = match target {
                    PlayTarget::Lane(l) => l,
                    PlayTarget::Face => self.lanes,
                    PlayTarget::Enemy { lane, slot } => self.lanes + 1 + lane * LANE_CAPACITY + slot,
                    PlayTarget::Ally { lane, slot } => {
                        self.lanes + 1 + self.lanes * LANE_CAPACITY + lane * LANE_CAPACITY + slot
                    }
                };
                self.play_base() + hand_slot * self.target_width() + t
            }
            Action::Attack { lane, slot, target } => {
                let t = match target {
                    AttackTarget::Face => 0,
                    AttackTarget::Slot(s) => 1 + s,
                };
                self.attack_base() + (lane * LANE_CAPACITY + slot) * (1 + LANE_CAPACITY) + t
            }
            Action::EndTurn => self.end_turn_id(),
        }
    }

    pub fn decode(&self, id: usize) -> Result<Action> {
        if id < self.play_base() {
            return Ok(Action::Pick(id));
        }
        if id < self.attack_base() {
            let rel = id - self.play_base();
            let hand_slot = rel / self.target_width();
            let t = rel % self.target_width();
            let cap = self.lanes * LANE_CAPACITY;
            let target = if t < self.lanes {
                PlayTarget::Lane(t)
            } else if t == self.lanes {
                PlayTarget::Face
            } else if t < self.lanes + 1 + cap {
                let r = t - self.lanes - 1;
                PlayTarget::Enemy {
                    lane: r / LANE_CAPACITY,
                    slot: r % LANE_CAPACITY,
                }
            } else {
                let r = t - self.lanes - 1 - cap;
                PlayTarget::Ally {
                    lane: r / LANE_CAPACITY,
                    slot: r % LANE_CAPACITY,
                }
            };
            return Ok(Action::Play { hand_slot, target });
        }
        if id < self.end_turn_id() {
            let rel = id - self.attack_base();
            let unit = rel / (1 + LANE_CAPACITY);
            let t = rel % (1 + LANE_CAPACITY);
            return Ok(Action::Attack {
                lane: unit / LANE_CAPACITY,
                slot: unit % LANE_CAPACITY,
                target: if t == 0 {
                    AttackTarget::Face
                } else {
                    AttackTarget::Slot(t - 1)
                },
            });
        }
        if id == self.end_turn_id() {
            return Ok(Action::EndTurn);
        }
        Err(Error::IllegalAction {
            action: id,
            reason: format!("outside the action space of size {}", self.size()),
        })
    }
}

/// Legal-action bits over the flat action space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionMask(pub Vec<bool>);

impl ActionMask {
    pub fn none(size: usize) -> Self {
        Self(vec![false; size])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_legal(&self, id: usize) -> bool {
        self.0.get(id).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Legal ids in ascending order.
    pub fn legal(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}
