use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::cardgame::CardGameState;
use crate::efg::Player;
use crate::error::{Error, Result};
use crate::numeric::{sample_categorical, softmax};
use crate::policy::TabularPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsParams {
    /// Simulations per search.
    pub n: usize,
    /// Exploration constant.
    pub c: f64,
    /// Prior temperature.
    pub tau: f64,
    /// Dirichlet concentration.
    pub alpha: f64,
    /// Weight of the policy prior against the Dirichlet draw.
    pub p_mix: f64,
}

impl Default for MctsParams {
    fn default() -> Self {
        Self {
            n: 400,
            c: 5.0,
            tau: 10.0,
            alpha: 0.03,
            p_mix: 0.75,
        }
    }
}

impl MctsParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0
            || !(self.c >= 0.0)
            || !(self.tau > 0.0)
            || !(self.alpha > 0.0)
            || !(0.0..=1.0).contains(&self.p_mix)
        {
            return Err(Error::Config(format!(
                "need n >= 1, c >= 0, tau > 0, alpha > 0, p_mix in [0, 1]; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// A game the planner can step through. Chance must be resolved inside
/// [`SearchGame::play`], so a cloned state replays the same world.
pub trait SearchGame: Clone {
    /// `None` once the game is over.
    fn to_move(&self) -> Option<Player>;
    /// Legal action ids, ascending.
    fn legal(&self) -> Vec<usize>;
    fn play(&mut self, action: usize) -> Result<()>;
    /// Final return of `player`; `None` before the end.
    fn reward(&self, player: Player) -> Option<f64>;
}

/// Action probabilities of the acting player, aligned with `legal`.
pub trait SearchPolicy<G> {
    fn probs(&self, h: &G, legal: &[usize]) -> Vec<f64>;
}

impl SearchGame for CardGameState {
    fn to_move(&self) -> Option<Player> {
        self.to_act()
    }

    fn legal(&self) -> Vec<usize> {
        self.mask().legal()
    }

    fn play(&mut self, action: usize) -> Result<()> {
        self.apply(action).map(|_| ())
    }

    fn reward(&self, player: Player) -> Option<f64> {
        self.outcome().map(|r| player.sign() * r)
    }
}

impl SearchPolicy<CardGameState> for TabularPolicy {
    fn probs(&self, h: &CardGameState, legal: &[usize]) -> Vec<f64> {
        let player = h.to_act().expect("policy queried on a decision state");
        self.probs_over(h.stage(), h.info_hash(player), legal, 1.0)
    }
}

/// Draw from a symmetric Dirichlet via normalized Gamma variates. When every
/// variate underflows (tiny `alpha`) the draw is a uniformly chosen vertex,
/// which is the `alpha → 0` limit.
pub fn dirichlet<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha > 0");
    let g: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = g.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        g.iter().map(|v| v / sum).collect()
    } else {
        let mut d = vec![0.0; k];
        d[rng.random_range(0..k)] = 1.0;
        d
    }
}

/// `p_mix · softmax(log π / τ) + (1 − p_mix) · Dirichlet(α)` over the legal
/// actions; `log_pi` may be any logits of `π`.
pub fn prior_mix<R: Rng + ?Sized>(log_pi: &[f64], tau: f64, alpha: f64, p_mix: f64, rng: &mut R) -> Vec<f64> {
    let scaled: Vec<f64> = log_pi.iter().map(|l| l / tau).collect();
    let x = softmax(&scaled);
    if p_mix == 1.0 {
        return x;
    }
    let d = dirichlet(log_pi.len(), alpha, rng);
    x.iter().zip(&d).map(|(a, b)| p_mix * a + (1.0 - p_mix) * b).collect()
}

#[derive(Debug, Clone)]
pub struct MctsNode<G> {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// World state after the inbound action and the opponent's reply;
    /// `None` until first expanded.
    pub h: Option<G>,
    pub a: usize,
    pub p: f64,
    pub n: u32,
    pub w: f64,
    pub q: f64,
    /// How many times this node's own value entered the sums.
    pub evals: u32,
}

#[derive(Debug, Clone)]
pub struct MctsTree<G> {
    pub nodes: Vec<MctsNode<G>>,
    pub player: Player,
}

impl<G> MctsTree<G> {
    pub fn root(&self) -> &MctsNode<G> {
        &self.nodes[0]
    }

    /// Indented `action n q prior` lines, children in creation order.
    pub fn trace(&self, max_depth: usize) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            let nd = &self.nodes[id];
            let label = if id == 0 { "root".to_string() } else { nd.a.to_string() };
            writeln!(
                out,
                "{}{} n={} q={:.4} p={:.4}",
                "  ".repeat(depth),
                label,
                nd.n,
                nd.q,
                nd.p
            )
            .unwrap();
            if depth < max_depth {
                stack.extend(nd.children.iter().rev().map(|&c| (c, depth + 1)));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<G> {
    /// Sampled from `visits`.
    pub action: usize,
    /// `(action, visit share)` per root child.
    pub visits: Vec<(usize, f64)>,
    pub root_q: f64,
    pub tree: MctsTree<G>,
}

impl<G> SearchResult<G> {
    /// Most visited action; ties go to the first child.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.visits.iter().enumerate() {
            if v.1 > self.visits[best].1 {
                best = i;
            }
        }
        self.visits[best].0
    }
}

/// Plays the opponent's moves with `policy` until `player` is to move or the
/// game ends.
fn roll_opponent<G: SearchGame, P: SearchPolicy<G>>(
    h: &mut G,
    player: Player,
    policy: &P,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    while let Some(who) = h.to_move() {
        if who == player {
            break;
        }
        let legal = h.legal();
        let p = policy.probs(h, &legal);
        h.play(legal[sample_categorical(&p, rng)])?;
    }
    Ok(())
}

fn add_children<G: SearchGame, P: SearchPolicy<G>>(
    tree: &mut MctsTree<G>,
    id: usize,
    policy: &P,
    params: &MctsParams,
    rng: &mut ChaCha8Rng,
) {
    let h = tree.nodes[id].h.as_ref().expect("expanded node has a state");
    let legal = h.legal();
    let log_pi: Vec<f64> = policy.probs(h, &legal).iter().map(|p| p.ln()).collect();
    let prior = prior_mix(&log_pi, params.tau, params.alpha, params.p_mix, rng);
    for (&a, &p) in legal.iter().zip(&prior) {
        let child = tree.nodes.len();
        tree.nodes.push(MctsNode {
            parent: Some(id),
            children: Vec::new(),
            h: None,
            a,
            p,
            n: 0,
            w: 0.0,
            q: 0.0,
            evals: 0,
        });
        tree.nodes[id].children.push(child);
    }
}

/// Information-state MCTS on the true world state `h0`.
///
/// The root is expanded from `h0` before the first simulation. Each
/// simulation descends by `argmax q + c √(1 + Σn) / (1 + n) · p`, re-plays
/// the leaf's action from its parent state followed by the opponent's moves
/// sampled from `policy`, expands the result with mixed priors, and adds
/// `value_fn` (or the true reward at the end of the game) to every node on
/// the path. Values are `h0`'s mover's returns.
pub fn search<G, P, V>(
    h0: &G,
    policy: &P,
    value_fn: &V,
    params: &MctsParams,
    rng: &mut ChaCha8Rng,
) -> Result<SearchResult<G>>
where
    G: SearchGame,
    P: SearchPolicy<G>,
    V: Fn(&G, Player, &mut ChaCha8Rng) -> f64,
{
    params.validate()?;
    let player = h0
        .to_move()
        .ok_or_else(|| Error::ContractViolation("search from a finished game".into()))?;
    let mut tree = MctsTree {
        nodes: vec![MctsNode {
            parent: None,
            children: Vec::new(),
            h: Some(h0.clone()),
            a: 0,
            p: 1.0,
            n: 0,
            w: 0.0,
            q: 0.0,
            evals: 0,
        }],
        player,
    };
    add_children(&mut tree, 0, policy, params, rng);

    for _ in 0..params.n {
        let mut id = 0;
        while !tree.nodes[id].children.is_empty() {
            let kids = &tree.nodes[id].children;
            let total: u32 = kids.iter().map(|&k| tree.nodes[k].n).sum();
            let scale = params.c * (1.0 + total as f64).sqrt();
            let mut best = kids[0];
            let mut best_score = f64::NEG_INFINITY;
            for &k in kids {
                let nd = &tree.nodes[k];
                let score = nd.q + scale / (1.0 + nd.n as f64) * nd.p;
                if score > best_score {
                    best = k;
                    best_score = score;
                }
            }
            id = best;
        }

        let parent = tree.nodes[id].parent.expect("root always has children");
        let mut h = tree.nodes[parent].h.clone().expect("parent was expanded");
        h.play(tree.nodes[id].a)?;
        roll_opponent(&mut h, player, policy, rng)?;
        let v = match h.reward(player) {
            Some(r) => {
                tree.nodes[id].h = Some(h);
                r
            }
            None => {
                let v = value_fn(&h, player, rng);
                tree.nodes[id].h = Some(h);
                add_children(&mut tree, id, policy, params, rng);
                v
            }
        };
        tree.nodes[id].evals += 1;

        let mut cur = Some(id);
        while let Some(k) = cur {
            let nd = &mut tree.nodes[k];
            nd.n += 1;
            nd.w += v;
            nd.q = nd.w / nd.n as f64;
            cur = nd.parent;
        }
    }

    let root = &tree.nodes[0];
    let total = root.n as f64;
    let visits: Vec<(usize, f64)> = root
        .children
        .iter()
        .map(|&k| (tree.nodes[k].a, tree.nodes[k].n as f64 / total))
        .collect();
    let probs: Vec<f64> = visits.iter().map(|v| v.1).collect();
    let action = visits[sample_categorical(&probs, rng)].0;
    let root_q = root.q;
    Ok(SearchResult {
        action,
        visits,
        root_q,
        tree,
    })
}

/// Value estimate from one playout of `policy` for both players. The clone
/// keeps the state's own chance stream.
pub fn playout_value<G: SearchGame, P: SearchPolicy<G>>(
    policy: &P,
) -> impl Fn(&G, Player, &mut ChaCha8Rng) -> f64 + '_ {
    move |h, player, rng| {
        let mut h = h.clone();
        while h.to_move().is_some() {
            let legal = h.legal();
            let p = policy.probs(&h, &legal);
            h.play(legal[sample_categorical(&p, rng)]).expect("legal action");
        }
        h.reward(player).expect("finished game")
    }
}
