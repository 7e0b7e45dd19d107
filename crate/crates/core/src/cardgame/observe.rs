use serde::{Deserialize, Serialize};

use super::cards::CardId;
use super::state::{CardGameState, Creature, Stage};
use crate::efg::Player;

/// What one player sees. `key` hashes the player's whole observation
/// history (own picks and draws, every public battle action), so equal keys
/// imply equal histories and the partition has perfect recall.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfoState {
    pub player: Player,
    pub stage: Stage,
    pub key: u64,
    pub features: InfoFeatures,
}

/// Scalar and zone features; `[own, opponent]` order throughout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfoFeatures {
    pub hp: [i32; 2],
    pub mana: [u32; 2],
    pub own_hand: Vec<CardId>,
    pub deck_count: [usize; 2],
    pub opp_hand_count: usize,
    pub boards: [Vec<Vec<Creature>>; 2],
    pub round: u32,
    pub own_turn: bool,
    /// Arena offer while drafting.
    pub cb_candidates: Vec<CardId>,
    /// Own picks while drafting.
    pub cb_picks: Vec<CardId>,
}

/// Observation of `player`; hides the opponent's hand, picks and deck.
pub fn observe(h: &CardGameState, player: Player) -> InfoState {
    let me = h.side(player);
    let opp = h.side(player.opponent());
    let stage = h.stage();
    InfoState {
        player,
        stage,
        key: h.info_hash(player),
        features: InfoFeatures {
            hp: [me.hp, opp.hp],
            mana: [me.mana, opp.mana],
            own_hand: me.hand.clone(),
            deck_count: [me.deck.len(), opp.deck.len()],
            opp_hand_count: opp.hand.len(),
            boards: [me.board.clone(), opp.board.clone()],
            round: h.round(),
            own_turn: h.to_act() == Some(player),
            cb_candidates: h.cb_candidates(player).to_vec(),
            cb_picks: if stage == Stage::Cb {
                me.picks.clone()
            } else {
                Vec::new()
            },
        },
    }
}
