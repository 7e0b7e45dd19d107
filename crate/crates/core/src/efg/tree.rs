use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::treeplex::{InfosetInfo, Treeplex};
use crate::error::{parse_err, Error, Result};

pub type NodeId = usize;

/// Tolerance on chance distributions.
const CHANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::P1, Player::P2];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }

    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    /// Multiplies a player-1 return into this player's return.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Player::P1 => 1.0,
            Player::P2 => -1.0,
        }
    }

    /// `1` or `2`.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Result<Player> {
        match n {
            1 => Ok(Player::P1),
            2 => Ok(Player::P2),
            _ => Err(Error::ContractViolation(format!("player must be 1 or 2, got {n}"))),
        }
    }

    pub fn from_index(i: usize) -> Player {
        if i == 0 {
            Player::P1
        } else {
            Player::P2
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}", self.number())
    }
}

/// A node of the game tree as supplied by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    /// Leaf with the player-1 return.
    Terminal { payoff: f64 },
    Chance { outcomes: Vec<(NodeId, f64)> },
    /// `infoset` is the caller's key; nodes of one player sharing a key form
    /// one information state.
    Decision {
        player: Player,
        infoset: u64,
        children: Vec<NodeId>,
    },
}

/// Derived per-node data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NodeInfo {
    pub parent: Option<NodeId>,
    /// Last sequence of each player on the path from the root (exclusive).
    pub last_seq: [Option<usize>; 2],
    /// Product of chance probabilities on the path from the root.
    pub chance_reach: f64,
    /// Per-player infoset index for decision nodes.
    pub infoset: Option<usize>,
}

/// A validated finite two-player zero-sum game tree with perfect recall.
#[derive(Debug, Clone)]
pub struct GameTree {
    nodes: Vec<NodeKind>,
    root: NodeId,
    info: Vec<NodeInfo>,
    /// Nodes in an order where every child precedes its parent.
    postorder: Vec<NodeId>,
    treeplexes: [Treeplex; 2],
    /// Decision nodes of each infoset, per player.
    infoset_nodes: [Vec<Vec<NodeId>>; 2],
}

impl GameTree {
    /// Validates the structure and builds both players' treeplexes.
    pub fn new(nodes: Vec<NodeKind>, root: NodeId) -> Result<Self> {
        let n = nodes.len();
        if root >= n {
            return Err(Error::ContractViolation(format!("root {root} out of range ({n} nodes)")));
        }
        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        for (id, node) in nodes.iter().enumerate() {
            let kids: Vec<NodeId> = match node {
                NodeKind::Terminal { payoff } => {
                    if !payoff.is_finite() {
                        return Err(Error::ContractViolation(format!("node {id}: payoff not finite")));
                    }
                    continue;
                }
                NodeKind::Chance { outcomes } => {
                    if outcomes.is_empty() {
                        return Err(Error::ContractViolation(format!("node {id}: chance node without outcomes")));
                    }
                    let total: f64 = outcomes.iter().map(|(_, p)| *p).sum();
                    if outcomes.iter().any(|(_, p)| !(*p >= 0.0 && p.is_finite()))
                        || (total - 1.0).abs() > CHANCE_TOL
                    {
                        return Err(Error::ContractViolation(format!(
                            "node {id}: chance probabilities must be nonnegative and sum to 1 (sum {total})"
                        )));
                    }
                    outcomes.iter().map(|(c, _)| *c).collect()
                }
                NodeKind::Decision { children, .. } => {
                    if children.is_empty() {
                        return Err(Error::ContractViolation(format!("node {id}: decision node without actions")));
                    }
                    children.clone()
                }
            };
            for c in kids {
                if c >= n || c == root {
                    return Err(Error::ContractViolation(format!("node {id}: bad child {c}")));
                }
                if parent[c].replace(id).is_some() {
                    return Err(Error::ContractViolation(format!("node {c} has two parents")));
                }
            }
        }

        // Preorder walk from the root: assigns infoset ids in topological
        // order and records the sequence context of each node.
        let mut info = vec![
            NodeInfo {
                parent: None,
                last_seq: [None, None],
                chance_reach: 0.0,
                infoset: None,
            };
            n
        ];
        let mut infosets: [Vec<InfosetInfo>; 2] = [Vec::new(), Vec::new()];
        let mut key_to_id: [HashMap<u64, usize>; 2] = [HashMap::new(), HashMap::new()];
        let mut infoset_nodes: [Vec<Vec<NodeId>>; 2] = [Vec::new(), Vec::new()];
        let mut next_seq = [0usize; 2];
        let mut seq_owner: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut preorder = Vec::with_capacity(n);
        let mut visited = 0usize;

        info[root].chance_reach = 1.0;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            visited += 1;
            preorder.push(id);
            let ctx = info[id];
            match &nodes[id] {
                NodeKind::Terminal { .. } => {}
                NodeKind::Chance { outcomes } => {
                    for &(c, p) in outcomes.iter().rev() {
                        info[c] = NodeInfo {
                            parent: Some(id),
                            last_seq: ctx.last_seq,
                            chance_reach: ctx.chance_reach * p,
                            infoset: None,
                        };
                        stack.push(c);
                    }
                }
                NodeKind::Decision {
                    player,
                    infoset,
                    children,
                } => {
                    let pi = player.index();
                    let parent_seq = ctx.last_seq[pi];
                    let sid = match key_to_id[pi].get(infoset) {
                        Some(&sid) => {
                            let s = &infosets[pi][sid];
                            if s.n_actions != children.len() {
                                return Err(Error::ContractViolation(format!(
                                    "infoset {infoset} of {player}: nodes disagree on action count"
                                )));
                            }
                            if s.parent_seq != parent_seq {
                                return Err(Error::ContractViolation(format!(
                                    "infoset {infoset} of {player} violates perfect recall"
                                )));
                            }
                            sid
                        }
                        None => {
                            let sid = infosets[pi].len();
                            infosets[pi].push(InfosetInfo {
                                key: *infoset,
                                n_actions: children.len(),
                                first_seq: next_seq[pi],
                                parent_seq,
                                child_infosets: vec![Vec::new(); children.len()],
                            });
                            next_seq[pi] += children.len();
                            seq_owner[pi].extend(std::iter::repeat_n(sid, children.len()));
                            key_to_id[pi].insert(*infoset, sid);
                            infoset_nodes[pi].push(Vec::new());
                            if let Some(ps) = parent_seq {
                                let owner = seq_owner[pi][ps];
                                let a = ps - infosets[pi][owner].first_seq;
                                infosets[pi][owner].child_infosets[a].push(sid);
                            }
                            sid
                        }
                    };
                    info[id].infoset = Some(sid);
                    infoset_nodes[pi][sid].push(id);
                    let first = infosets[pi][sid].first_seq;
                    for (a, &c) in children.iter().enumerate().rev() {
                        let mut last_seq = ctx.last_seq;
                        last_seq[pi] = Some(first + a);
                        info[c] = NodeInfo {
                            parent: Some(id),
                            last_seq,
                            chance_reach: ctx.chance_reach,
                            infoset: None,
                        };
                        stack.push(c);
                    }
                }
            }
        }
        if visited != n {
            return Err(Error::ContractViolation(format!(
                "{} nodes are unreachable from the root",
                n - visited
            )));
        }
        let postorder: Vec<NodeId> = preorder.into_iter().rev().collect();
        let [i1, i2] = infosets;
        let [o1, o2] = seq_owner;
        let treeplexes = [Treeplex::new(Player::P1, i1, o1), Treeplex::new(Player::P2, i2, o2)];
        Ok(Self {
            nodes,
            root,
            info,
            postorder,
            treeplexes,
            infoset_nodes,
        })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.info[id].parent
    }

    pub fn treeplex(&self, player: Player) -> &Treeplex {
        &self.treeplexes[player.index()]
    }

    /// Infoset index (within the acting player's treeplex) of a decision node.
    pub fn infoset_of(&self, id: NodeId) -> Option<usize> {
        self.info[id].infoset
    }

    pub fn infoset_nodes(&self, player: Player, infoset: usize) -> &[NodeId] {
        &self.infoset_nodes[player.index()][infoset]
    }

    pub fn chance_reach(&self, id: NodeId) -> f64 {
        self.info[id].chance_reach
    }

    /// The last sequence of `player` on the path to `id`, if any.
    pub fn last_seq(&self, id: NodeId, player: Player) -> Option<usize> {
        self.info[id].last_seq[player.index()]
    }

    pub(crate) fn postorder(&self) -> &[NodeId] {
        &self.postorder
    }

    pub fn count_chance_nodes(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, NodeKind::Chance { .. }))
            .count()
    }

    pub fn count_terminals(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, NodeKind::Terminal { .. }))
            .count()
    }

    /// Serializes to the line-oriented fixture format:
    ///
    /// ```text
    /// efg-tree v1
    /// root <id>
    /// <id> terminal <player-1 payoff>
    /// <id> chance <child>:<prob> ...
    /// <id> decision <1|2> <infoset key> <child> ...
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::from("efg-tree v1\n");
        let _ = writeln!(s, "root {}", self.root);
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                NodeKind::Terminal { payoff } => {
                    let _ = writeln!(s, "{id} terminal {payoff}");
                }
                NodeKind::Chance { outcomes } => {
                    let _ = write!(s, "{id} chance");
                    for (c, p) in outcomes {
                        let _ = write!(s, " {c}:{p}");
                    }
                    s.push('\n');
                }
                NodeKind::Decision {
                    player,
                    infoset,
                    children,
                } => {
                    let _ = write!(s, "{id} decision {} {infoset}", player.number());
                    for c in children {
                        let _ = write!(s, " {c}");
                    }
                    s.push('\n');
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "efg-tree v1")) => {}
            Some((ln, other)) => return Err(parse_err(ln, format!("unknown header {other:?}"))),
            None => return Err(parse_err(1, "empty input")),
        }
        let (ln, root_line) = lines.next().ok_or_else(|| parse_err(2, "missing root line"))?;
        let root: NodeId = root_line
            .strip_prefix("root ")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| parse_err(ln, "expected `root <id>`"))?;

        let mut slots: Vec<Option<NodeKind>> = Vec::new();
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(parse_err(ln, "truncated node line"));
            }
            let id: NodeId = toks[0]
                .parse()
                .map_err(|_| parse_err(ln, format!("bad node id {:?}", toks[0])))?;
            let num = |t: &str| -> Result<usize> {
                t.parse().map_err(|_| parse_err(ln, format!("bad integer {t:?}")))
            };
            let kind = match toks[1] {
                "terminal" => {
                    let payoff = toks
                        .get(2)
                        .and_then(|t| t.parse::<f64>().ok())
                        .ok_or_else(|| parse_err(ln, "terminal needs a payoff"))?;
                    NodeKind::Terminal { payoff }
                }
                "chance" => {
                    let mut outcomes = Vec::new();
                    for t in &toks[2..] {
                        let (c, p) = t
                            .split_once(':')
                            .ok_or_else(|| parse_err(ln, format!("expected child:prob, got {t:?}")))?;
                        let p: f64 = p.parse().map_err(|_| parse_err(ln, format!("bad probability {p:?}")))?;
                        outcomes.push((num(c)?, p));
                    }
                    NodeKind::Chance { outcomes }
                }
                "decision" => {
                    if toks.len() < 4 {
                        return Err(parse_err(ln, "decision needs player, infoset and children"));
                    }
                    let player = Player::from_number(
                        toks[2].parse().map_err(|_| parse_err(ln, "bad player"))?,
                    )
                    .map_err(|e| parse_err(ln, e.to_string()))?;
                    let infoset: u64 = toks[3]
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad infoset key {:?}", toks[3])))?;
                    let children = toks[4..].iter().map(|t| num(t)).collect::<Result<_>>()?;
                    NodeKind::Decision {
                        player,
                        infoset,
                        children,
                    }
                }
                other => return Err(parse_err(ln, format!("unknown node kind {other:?}"))),
            };
            if slots.len() <= id {
                slots.resize(id + 1, None);
            }
            if slots[id].replace(kind).is_some() {
                return Err(parse_err(ln, format!("duplicate node {id}")));
            }
        }
        let nodes = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| parse_err(0, format!("node {i} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, root)
    }
}

/// Convenience builder that hands out node ids in insertion order.
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    nodes: Vec<NodeKind>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserves an id to be filled later with [`TreeBuilder::set`].
    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(NodeKind::Terminal { payoff: 0.0 });
        self.nodes.len() - 1
    }

    pub fn set(&mut self, id: NodeId, kind: NodeKind) {
        self.nodes[id] = kind;
    }

    pub fn terminal(&mut self, payoff: f64) -> NodeId {
        self.nodes.push(NodeKind::Terminal { payoff });
        self.nodes.len() - 1
    }

    pub fn chance(&mut self, outcomes: Vec<(NodeId, f64)>) -> NodeId {
        self.nodes.push(NodeKind::Chance { outcomes });
        self.nodes.len() - 1
    }

    pub fn decision(&mut self, player: Player, infoset: u64, children: Vec<NodeId>) -> NodeId {
        self.nodes.push(NodeKind::Decision {
            player,
            infoset,
            children,
        });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn build(self, root: NodeId) -> Result<GameTree> {
        GameTree::new(self.nodes, root)
    }
}
