use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mixture::{sample_opponent, OpponentMixture};
use crate::efg::{
    behavioral_to_sequence, counterfactual_q, dilated_entropy, expected_return, sbr_treeplex,
    sequence_to_behavioral_unchecked, treeplex_payoff_vector, BehavioralPolicy, GameTree, NodeKind,
    Player, SequencePolicy, Treeplex,
};
use crate::error::{Error, Result};
use crate::numeric::{sample_categorical, softmax};

fn ordered<'a>(
    x: &'a SequencePolicy,
    opp: &'a SequencePolicy,
    player: Player,
) -> Result<(&'a SequencePolicy, &'a SequencePolicy)> {
    if x.player != player || opp.player != player.opponent() {
        return Err(Error::ContractViolation(format!(
            "expected a {player} policy and an opponent policy"
        )));
    }
    Ok(match player {
        Player::P1 => (x, opp),
        Player::P2 => (opp, x),
    })
}

/// `∂R/∂π(a|s) = ρ(s) Q(s, a)` for every sequence of `player`, in the
/// player's own return. Infosets with `ρ(s) = 0` get 0.
pub fn policy_gradient(
    gt: &GameTree,
    x: &SequencePolicy,
    opp: &SequencePolicy,
    player: Player,
) -> Result<Vec<f64>> {
    let (p1, p2) = ordered(x, opp, player)?;
    let cf = counterfactual_q(gt, p1, p2, player)?;
    let tp = gt.treeplex(player);
    Ok((0..tp.n_seqs())
        .map(|seq| {
            let (s, _) = tp.seq_owner(seq);
            cf.q[seq].map_or(0.0, |q| cf.rho[s] * q)
        })
        .collect())
}

/// Own return of `player`.
fn own_return(gt: &GameTree, x: &SequencePolicy, opp: &SequencePolicy, player: Player) -> Result<f64> {
    let (p1, p2) = ordered(x, opp, player)?;
    Ok(player.sign() * expected_return(gt, p1, p2)?)
}

/// `Σ α̃ᵢ ℓᵢ(x)` with `ℓᵢ(x) = −R(x, yᵢ) + ψ(x)/μ`: the regularized loss of
/// `x` against the opponent mixture.
pub fn sbr_objective(gt: &GameTree, x: &SequencePolicy, mix: &OpponentMixture<SequencePolicy>) -> Result<f64> {
    let player = x.player;
    let psi = dilated_entropy(gt.treeplex(player), x)?;
    let mut total = 0.0;
    for (y, w) in mix.opponents.iter().zip(&mix.alpha_tilde) {
        total += w * (-own_return(gt, x, y, player)? + psi / mix.mu);
    }
    Ok(total)
}

/// Exact minimizer of [`sbr_objective`].
pub fn sbr_exact(gt: &GameTree, mix: &OpponentMixture<SequencePolicy>) -> Result<SequencePolicy> {
    let player = mix.opponents[0].player.opponent();
    let tp = gt.treeplex(player);
    let mut g = vec![0.0; tp.n_seqs()];
    for (y, w) in mix.opponents.iter().zip(&mix.alpha_tilde) {
        for (acc, v) in g.iter_mut().zip(treeplex_payoff_vector(gt, y, player)) {
            *acc += w * v;
        }
    }
    sbr_treeplex(tp, &g, 1.0 / mix.mu)
}

/// Softmax of per-infoset logits, indexed like the treeplex sequences.
pub fn logits_to_behavioral(tp: &Treeplex, logits: &[f64]) -> BehavioralPolicy {
    BehavioralPolicy {
        player: tp.player(),
        probs: tp
            .infosets()
            .iter()
            .map(|s| softmax(&logits[s.first_seq..s.first_seq + s.n_actions]))
            .collect(),
    }
}

/// Gradient of the dilated negentropy `ψ` with respect to softmax logits.
///
/// With `W(s) = Σ_a π(a|s) c(s, a)` and `c(s, a) = log π(a|s) + Σ_t W(t)`
/// over child infosets `t` of `(s, a)`, the derivative is
/// `x(s) π(b|s) (c(s, b) − W(s))`.
pub fn entropy_logit_gradient(tp: &Treeplex, pi: &BehavioralPolicy) -> Vec<f64> {
    let n = tp.n_infosets();
    let mut w = vec![0.0; n];
    let mut c = vec![0.0; tp.n_seqs()];
    for s in (0..n).rev() {
        let info = tp.infoset(s);
        let mut ws = 0.0;
        for a in 0..info.n_actions {
            let p = pi.probs[s][a];
            let ca = if p > 0.0 { p.ln() } else { 0.0 }
                + info.child_infosets[a].iter().map(|&t| w[t]).sum::<f64>();
            c[info.first_seq + a] = ca;
            ws += p * ca;
        }
        w[s] = ws;
    }
    let x = behavioral_to_sequence(tp, pi);
    let mut grad = vec![0.0; tp.n_seqs()];
    for (s, info) in tp.infosets().iter().enumerate() {
        let mass = x.reach(info.parent_seq);
        for a in 0..info.n_actions {
            let seq = info.first_seq + a;
            grad[seq] = mass * pi.probs[s][a] * (c[seq] - w[s]);
        }
    }
    grad
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgConfig {
    pub lr: f64,
    /// Episodes per update.
    pub batch: usize,
    /// Per own decision, applied to sampled returns only.
    pub discount: f64,
}

impl Default for PgConfig {
    fn default() -> Self {
        Self {
            lr: 0.05,
            batch: 32,
            discount: 0.99,
        }
    }
}

impl PgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) || self.batch == 0 {
            return Err(Error::Config("lr must be >= 0 and batch at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(Error::Config(format!("discount {} outside [0, 1]", self.discount)));
        }
        Ok(())
    }
}

/// One sampled play of the tree: the learner's `(sequence, decisions left
/// after it)` visits and its final return.
struct TreeEpisode {
    visits: Vec<(usize, u32)>,
    ret: f64,
}

fn sample_episode<R: Rng + ?Sized>(
    gt: &GameTree,
    player: Player,
    pis: [&BehavioralPolicy; 2],
    rng: &mut R,
) -> TreeEpisode {
    let tp = gt.treeplex(player);
    let mut id = gt.root();
    let mut seqs = Vec::new();
    loop {
        match gt.node(id) {
            NodeKind::Terminal { payoff } => {
                let n = seqs.len() as u32;
                return TreeEpisode {
                    visits: seqs.into_iter().enumerate().map(|(i, s)| (s, n - 1 - i as u32)).collect(),
                    ret: player.sign() * payoff,
                };
            }
            NodeKind::Chance { outcomes } => {
                let probs: Vec<f64> = outcomes.iter().map(|o| o.1).collect();
                id = outcomes[sample_categorical(&probs, rng)].0;
            }
            NodeKind::Decision {
                player: who,
                children,
                ..
            } => {
                let s = gt.infoset_of(id).expect("decision node has an infoset");
                let a = sample_categorical(&pis[who.index()].probs[s], rng);
                if *who == player {
                    seqs.push(tp.seq(s, a));
                }
                id = children[a];
            }
        }
    }
}

/// Minimizes [`sbr_objective`] by stochastic gradient steps on softmax
/// logits. Each episode plays an opponent drawn from the mixture; the return
/// gradient is a REINFORCE estimate with a leave-one-out mean baseline and
/// the entropy gradient is exact. Returns the average sequence-form iterate
/// over the second half of the run.
pub fn solve_sbr_pg<R: Rng + ?Sized>(
    gt: &GameTree,
    mix: &OpponentMixture<SequencePolicy>,
    steps: usize,
    cfg: &PgConfig,
    rng: &mut R,
) -> Result<SequencePolicy> {
    cfg.validate()?;
    if steps == 0 || cfg.lr == 0.0 {
        return Err(Error::Config("steps and lr must be positive".into()));
    }
    let player = mix.opponents[0].player.opponent();
    let tp = gt.treeplex(player);
    let opp_tp = gt.treeplex(player.opponent());
    let opp_pis: Vec<BehavioralPolicy> = mix
        .opponents
        .iter()
        .map(|y| {
            y.validate(opp_tp)?;
            Ok(sequence_to_behavioral_unchecked(opp_tp, y))
        })
        .collect::<Result<_>>()?;
    let mut logits = vec![0.0; tp.n_seqs()];
    let mut avg = vec![0.0; tp.n_seqs()];
    let tail_start = steps / 2;
    let mut episodes = Vec::with_capacity(cfg.batch);
    for step in 0..steps {
        let pi = logits_to_behavioral(tp, &logits);
        episodes.clear();
        for _ in 0..cfg.batch {
            let i = sample_opponent(mix, rng);
            let pis = match player {
                Player::P1 => [&pi, &opp_pis[i]],
                Player::P2 => [&opp_pis[i], &pi],
            };
            episodes.push(sample_episode(gt, player, pis, rng));
        }
        let total: f64 = episodes.iter().map(|e| e.ret).sum();
        let n = episodes.len() as f64;
        let mut grad = entropy_logit_gradient(tp, &pi);
        for g in &mut grad {
            *g /= mix.mu;
        }
        for e in &episodes {
            let baseline = if episodes.len() > 1 { (total - e.ret) / (n - 1.0) } else { 0.0 };
            let adv = e.ret - baseline;
            for &(seq, left) in &e.visits {
                let (s, a) = tp.seq_owner(seq);
                let info = tp.infoset(s);
                let g = cfg.discount.powi(left as i32) * adv / n;
                for b in 0..info.n_actions {
                    let ind = if b == a { 1.0 } else { 0.0 };
                    grad[info.first_seq + b] -= g * (ind - pi.probs[s][b]);
                }
            }
        }
        for (l, g) in logits.iter_mut().zip(&grad) {
            *l -= cfg.lr * g;
        }
        if step >= tail_start {
            let x = behavioral_to_sequence(tp, &logits_to_behavioral(tp, &logits));
            for (acc, v) in avg.iter_mut().zip(&x.x) {
                *acc += v;
            }
        }
    }
    let count = (steps - tail_start) as f64;
    for v in &mut avg {
        *v /= count;
    }
    SequencePolicy::new(tp, avg)
}
