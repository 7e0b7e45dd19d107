use serde::{Deserialize, Serialize};

use super::tree::{GameTree, NodeId, NodeKind, Player};
use super::treeplex::{
    behavioral_to_sequence, sequence_to_behavioral_unchecked, BehavioralPolicy, SequencePolicy,
};
use crate::error::{Error, Result};

fn check_pair(gt: &GameTree, x: &SequencePolicy, y: &SequencePolicy) -> Result<()> {
    if x.player != Player::P1 || y.player != Player::P2 {
        return Err(Error::ContractViolation(
            "expected a player-1 policy followed by a player-2 policy".into(),
        ));
    }
    x.validate(gt.treeplex(Player::P1))?;
    y.validate(gt.treeplex(Player::P2))
}

/// Full reach of a node: chance times both players' sequence masses.
#[inline]
fn full_reach(gt: &GameTree, id: NodeId, x: &SequencePolicy, y: &SequencePolicy) -> f64 {
    gt.chance_reach(id) * x.reach(gt.last_seq(id, Player::P1)) * y.reach(gt.last_seq(id, Player::P2))
}

/// Player-1 return `R = −u(x, y)` as the reach-weighted sum over leaves.
pub fn expected_return(gt: &GameTree, x: &SequencePolicy, y: &SequencePolicy) -> Result<f64> {
    check_pair(gt, x, y)?;
    Ok(gt
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(id, n)| match n {
            NodeKind::Terminal { payoff } => Some(full_reach(gt, id, x, y) * payoff),
            _ => None,
        })
        .sum())
}

/// The linear form `R_player(x) = ⟨x, r⟩ + r₀` of a player's return against
/// a fixed opponent: `r(s, a)` sums the leaves whose last own sequence is
/// `(s, a)`, and `r₀` collects leaves the player never acts before.
pub fn reward_vector(gt: &GameTree, opponent: &SequencePolicy, player: Player) -> (Vec<f64>, f64) {
    debug_assert_eq!(opponent.player, player.opponent());
    let mut r = vec![0.0; gt.treeplex(player).n_seqs()];
    let mut constant = 0.0;
    for (id, n) in gt.nodes().iter().enumerate() {
        if let NodeKind::Terminal { payoff } = n {
            let w = gt.chance_reach(id)
                * opponent.reach(gt.last_seq(id, player.opponent()))
                * payoff
                * player.sign();
            match gt.last_seq(id, player) {
                Some(seq) => r[seq] += w,
                None => constant += w,
            }
        }
    }
    (r, constant)
}

/// Expected player-1 return below every node under the given behavioral
/// policies, indexed by node id.
pub(crate) fn node_values(gt: &GameTree, pis: [&BehavioralPolicy; 2]) -> Vec<f64> {
    let mut v = vec![0.0; gt.len()];
    for &id in gt.postorder() {
        v[id] = match gt.node(id) {
            NodeKind::Terminal { payoff } => *payoff,
            NodeKind::Chance { outcomes } => outcomes.iter().map(|&(c, p)| p * v[c]).sum(),
            NodeKind::Decision {
                player, children, ..
            } => {
                let s = gt.infoset_of(id).expect("decision node has an infoset");
                let probs = &pis[player.index()].probs[s];
                children.iter().zip(probs).map(|(&c, p)| p * v[c]).sum()
            }
        };
    }
    v
}

/// Counterfactual action values of one player.
///
/// `rho[s]` is the full reach of infoset `s` (both players and chance) and
/// `q[seq]` the player's expected return after taking the sequence's action,
/// conditioned on reaching its infoset. `q` is `None` where `rho = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfValue {
    pub player: Player,
    pub rho: Vec<f64>,
    pub q: Vec<Option<f64>>,
}

impl CfValue {
    /// `V(s) = Σ_a π(a|s) Q(s, a)` for a reached infoset.
    pub fn state_value(&self, gt: &GameTree, pi: &BehavioralPolicy, s: usize) -> Option<f64> {
        let info = gt.treeplex(self.player).infoset(s);
        (0..info.n_actions)
            .map(|a| self.q[info.first_seq + a].map(|q| pi.probs[s][a] * q))
            .sum()
    }
}

/// `Q(s, a) = (1/ρ(s)) Σ_{h∈s} ρ(h) · V(child(h, a))`, which is the
/// trajectory sum over `T(s, a)` with the action's own probability factored out.
pub fn counterfactual_q(
    gt: &GameTree,
    x: &SequencePolicy,
    y: &SequencePolicy,
    player: Player,
) -> Result<CfValue> {
    check_pair(gt, x, y)?;
    let pis = [
        sequence_to_behavioral_unchecked(gt.treeplex(Player::P1), x),
        sequence_to_behavioral_unchecked(gt.treeplex(Player::P2), y),
    ];
    let values = node_values(gt, [&pis[0], &pis[1]]);
    let tp = gt.treeplex(player);
    let mut rho = vec![0.0; tp.n_infosets()];
    let mut num = vec![0.0; tp.n_seqs()];
    for (s, info) in tp.infosets().iter().enumerate() {
        for &h in gt.infoset_nodes(player, s) {
            let reach = full_reach(gt, h, x, y);
            rho[s] += reach;
            if let NodeKind::Decision { children, .. } = gt.node(h) {
                for (a, &c) in children.iter().enumerate() {
                    num[info.first_seq + a] += reach * values[c] * player.sign();
                }
            }
        }
    }
    let q = (0..tp.n_seqs())
        .map(|seq| {
            let (s, _) = tp.seq_owner(seq);
            (rho[s] > 0.0).then(|| num[seq] / rho[s])
        })
        .collect();
    Ok(CfValue { player, rho, q })
}

/// Exact best response of `player` against a fixed opponent, by backward
/// induction over the responder's infosets. Returns the pure sequence policy
/// and the responder's expected return. Ties go to the lowest action index.
pub fn exact_br(
    gt: &GameTree,
    opponent: &SequencePolicy,
    player: Player,
) -> Result<(SequencePolicy, f64)> {
    if opponent.player != player.opponent() {
        return Err(Error::ContractViolation(format!(
            "best response of {player} needs a {} policy",
            player.opponent()
        )));
    }
    opponent.validate(gt.treeplex(opponent.player))?;
    let opp_pi = sequence_to_behavioral_unchecked(gt.treeplex(opponent.player), opponent);
    let tp = gt.treeplex(player);
    let mut choice: Vec<Option<usize>> = vec![None; tp.n_infosets()];
    let mut memo: Vec<Option<f64>> = vec![None; gt.len()];

    // Reverse topological order: every infoset below `s` is decided first.
    for s in (0..tp.n_infosets()).rev() {
        let n_actions = tp.infoset(s).n_actions;
        let mut totals = vec![0.0; n_actions];
        for &h in gt.infoset_nodes(player, s) {
            let w = gt.chance_reach(h) * opponent.reach(gt.last_seq(h, player.opponent()));
            if let NodeKind::Decision { children, .. } = gt.node(h) {
                for (a, &c) in children.iter().enumerate() {
                    let v = eval_br(gt, c, player, &opp_pi, &choice, &mut memo);
                    totals[a] += w * v;
                }
            }
        }
        let mut best = 0;
        for a in 1..n_actions {
            if totals[a] > totals[best] {
                best = a;
            }
        }
        choice[s] = Some(best);
    }
    let value = eval_br(gt, gt.root(), player, &opp_pi, &choice, &mut memo);
    let pure = BehavioralPolicy {
        player,
        probs: choice
            .iter()
            .zip(tp.infosets())
            .map(|(c, info)| {
                let mut p = vec![0.0; info.n_actions];
                p[c.expect("every infoset decided")] = 1.0;
                p
            })
            .collect(),
    };
    Ok((behavioral_to_sequence(tp, &pure), value))
}

/// Responder's expected return below `id`, given decisions for every
/// responder infoset in the subtree.
fn eval_br(
    gt: &GameTree,
    id: NodeId,
    responder: Player,
    opp_pi: &BehavioralPolicy,
    choice: &[Option<usize>],
    memo: &mut [Option<f64>],
) -> f64 {
    if let Some(v) = memo[id] {
        return v;
    }
    let v = match gt.node(id) {
        NodeKind::Terminal { payoff } => payoff * responder.sign(),
        NodeKind::Chance { outcomes } => outcomes
            .iter()
            .map(|&(c, p)| p * eval_br(gt, c, responder, opp_pi, choice, memo))
            .sum(),
        NodeKind::Decision {
            player, children, ..
        } => {
            let s = gt.infoset_of(id).expect("decision node has an infoset");
            if *player == responder {
                let a = choice[s].expect("descendant infosets are decided first");
                eval_br(gt, children[a], responder, opp_pi, choice, memo)
            } else {
                children
                    .iter()
                    .zip(&opp_pi.probs[s])
                    .map(|(&c, p)| p * eval_br(gt, c, responder, opp_pi, choice, memo))
                    .sum()
            }
        }
    };
    memo[id] = Some(v);
    v
}

/// `max_x' R(x', y) − min_y' R(x, y')`: zero exactly at an equilibrium.
pub fn exploitability_efg(gt: &GameTree, x: &SequencePolicy, y: &SequencePolicy) -> Result<f64> {
    check_pair(gt, x, y)?;
    let (_, br1) = exact_br(gt, y, Player::P1)?;
    let (_, br2) = exact_br(gt, x, Player::P2)?;
    Ok((br1 + br2).max(0.0))
}
