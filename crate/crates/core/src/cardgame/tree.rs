use serde::{Deserialize, Serialize};

use super::config::GameConfig;
use super::state::{CardGameState, Stage};
use crate::efg::{GameTree, NodeId, Player, TreeBuilder};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Per-infoset data linking treeplex indices back to the card game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfosetMeta {
    pub key: u64,
    pub stage: Stage,
    /// Flat action id of each treeplex action, ascending.
    pub actions: Vec<usize>,
}

/// A card game flattened to an extensive-form tree.
#[derive(Debug, Clone)]
pub struct CardGameTree {
    pub tree: GameTree,
    /// Indexed like the player's treeplex infosets.
    pub infosets: [Vec<InfosetMeta>; 2],
}

impl CardGameTree {
    pub fn meta(&self, player: Player, infoset: usize) -> &InfosetMeta {
        &self.infosets[player.index()][infoset]
    }
}

/// Enumerates the whole game from the initial state of `config`. Draws
/// become chance nodes; draws with a single possible card are applied
/// inline.
pub fn to_game_tree(config: &GameConfig, budget: usize) -> Result<CardGameTree> {
    let root_state = CardGameState::new(config.clone())?;
    let mut b = TreeBuilder::new();
    let mut metas: [Vec<(u64, InfosetMeta)>; 2] = [Vec::new(), Vec::new()];
    let root = expand(&mut b, root_state, budget, &mut metas)?;
    let tree = b.build(root)?;
    let infosets = Player::BOTH.map(|p| {
        let tp = tree.treeplex(p);
        let mut out: Vec<Option<InfosetMeta>> = vec![None; tp.n_infosets()];
        for (key, meta) in metas[p.index()].drain(..) {
            let s = tp.infoset_by_key(key).expect("every recorded key is an infoset");
            out[s].get_or_insert(meta);
        }
        out.into_iter()
            .map(|m| m.expect("every infoset was visited"))
            .collect()
    });
    Ok(CardGameTree { tree, infosets })
}

fn expand(
    b: &mut TreeBuilder,
    mut h: CardGameState,
    budget: usize,
    metas: &mut [Vec<(u64, InfosetMeta)>; 2],
) -> Result<NodeId> {
    if b.len() >= budget {
        return Err(Error::BudgetExceeded {
            count: b.len() + 1,
            budget,
        });
    }
    if let Some(r) = h.outcome() {
        return Ok(b.terminal(r));
    }
    if h.is_chance() {
        let outcomes = h.draw_outcomes();
        if outcomes.len() == 1 {
            h.apply_draw(outcomes[0].0)?;
            return expand(b, h, budget, metas);
        }
        let id = b.reserve();
        let mut kids = Vec::with_capacity(outcomes.len());
        for (card, p) in outcomes {
            let mut child = h.clone();
            child.apply_draw(card)?;
            kids.push((expand(b, child, budget, metas)?, p));
        }
        b.set(id, crate::efg::NodeKind::Chance { outcomes: kids });
        return Ok(id);
    }
    let player = h.to_act().expect("non-terminal");
    let key = h.info_hash(player);
    let actions = h.mask().legal();
    let id = b.reserve();
    let mut kids = Vec::with_capacity(actions.len());
    for &a in &actions {
        let mut child = h.clone();
        child.apply_decision(a)?;
        kids.push(expand(b, child, budget, metas)?);
    }
    metas[player.index()].push((
        key,
        InfosetMeta {
            key,
            stage: h.stage(),
            actions,
        },
    ));
    b.set(
        id,
        crate::efg::NodeKind::Decision {
            player,
            infoset: key,
            children: kids,
        },
    );
    Ok(id)
}
