//! Brute-force evaluation of extensive-form games by walking every
//! root-to-leaf path.

use osfp_core::efg::{GameTree, NodeKind, Player, SequencePolicy, Treeplex};

use crate::lp::{solve_matrix, Cmp, Lp};

/// One terminal history.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub chance: f64,
    /// `(player, infoset, action)` for every decision on the path.
    pub path: Vec<(Player, usize, usize)>,
    /// Player-1 return.
    pub payoff: f64,
}

pub fn leaves(gt: &GameTree) -> Vec<Leaf> {
    let mut out = Vec::new();
    let mut stack = vec![(gt.root(), 1.0, Vec::new())];
    while let Some((id, chance, path)) = stack.pop() {
        match gt.node(id) {
            NodeKind::Terminal { payoff } => out.push(Leaf {
                chance,
                path,
                payoff: *payoff,
            }),
            NodeKind::Chance { outcomes } => {
                for &(c, p) in outcomes {
                    stack.push((c, chance * p, path.clone()));
                }
            }
            NodeKind::Decision {
                player, children, ..
            } => {
                let s = gt.infoset_of(id).unwrap();
                for (a, &c) in children.iter().enumerate() {
                    let mut p = path.clone();
                    p.push((*player, s, a));
                    stack.push((c, chance, p));
                }
            }
        }
    }
    out
}

/// `π(a|s) = x(s, a) / Σ_b x(s, b)`, uniform where the infoset has no mass.
pub fn behavioral(tp: &Treeplex, x: &SequencePolicy) -> Vec<Vec<f64>> {
    tp.infosets()
        .iter()
        .map(|s| {
            let w = &x.x[s.first_seq..s.first_seq + s.n_actions];
            let t: f64 = w.iter().sum();
            if t > 0.0 {
                w.iter().map(|v| v / t).collect()
            } else {
                vec![1.0 / s.n_actions as f64; s.n_actions]
            }
        })
        .collect()
}

/// Product of the given per-infoset weights along a path. The weights need
/// not be normalized, which makes this the return polynomial.
pub fn path_weight(leaf: &Leaf, probs: [&[Vec<f64>]; 2]) -> f64 {
    leaf.path
        .iter()
        .map(|&(p, s, a)| probs[p.index()][s][a])
        .product::<f64>()
        * leaf.chance
}

/// Player-1 return `Σ_z ρ(z) r(z)` for per-infoset weights of both players.
pub fn return_of(gt: &GameTree, probs: [&[Vec<f64>]; 2]) -> f64 {
    leaves(gt).iter().map(|z| path_weight(z, probs) * z.payoff).sum()
}

pub fn expected_return(gt: &GameTree, x: &SequencePolicy, y: &SequencePolicy) -> f64 {
    let px = behavioral(gt.treeplex(Player::P1), x);
    let py = behavioral(gt.treeplex(Player::P2), y);
    return_of(gt, [&px, &py])
}

/// Reach of every infoset of `player` and `Q(s, a)` in the player's own
/// return, from the set of terminal histories through `(s, a)`:
/// `Q(s, a) = Σ_{z ∈ T(s,a)} ρ(z) r(z) / (π(a|s) ρ(s))`.
pub fn trajectory_q(
    gt: &GameTree,
    probs: [&[Vec<f64>]; 2],
    player: Player,
) -> (Vec<f64>, Vec<Vec<Option<f64>>>) {
    let tp = gt.treeplex(player);
    let mut rho = vec![0.0; tp.n_infosets()];
    // Infoset reach: sum over decision nodes of the prefix weight. Walk the
    // tree again since some infosets may have no leaf below a given prefix.
    let mut stack = vec![(gt.root(), 1.0)];
    while let Some((id, w)) = stack.pop() {
        match gt.node(id) {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { outcomes } => {
                for &(c, p) in outcomes {
                    stack.push((c, w * p));
                }
            }
            NodeKind::Decision {
                player: who,
                children,
                ..
            } => {
                let s = gt.infoset_of(id).unwrap();
                if *who == player {
                    rho[s] += w;
                }
                for (a, &c) in children.iter().enumerate() {
                    stack.push((c, w * probs[who.index()][s][a]));
                }
            }
        }
    }
    let mut num: Vec<Vec<f64>> = tp.infosets().iter().map(|s| vec![0.0; s.n_actions]).collect();
    for z in leaves(gt) {
        let w = path_weight(&z, probs) * z.payoff * player.sign();
        for &(p, s, a) in &z.path {
            if p == player {
                let pa = probs[p.index()][s][a];
                if pa > 0.0 {
                    num[s][a] += w / pa;
                } else {
                    // Weight with this action's factor removed.
                    let mut q = probs.map(|v| v.to_vec());
                    q[p.index()][s][a] = 1.0;
                    num[s][a] += path_weight(&z, [&q[0], &q[1]]) * z.payoff * player.sign();
                }
            }
        }
    }
    let q = num
        .into_iter()
        .enumerate()
        .map(|(s, row)| row.into_iter().map(|v| (rho[s] > 0.0).then(|| v / rho[s])).collect())
        .collect();
    (rho, q)
}

/// Every pure strategy as one action index per infoset.
pub fn pure_strategies(tp: &Treeplex) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in tp.infosets() {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s.n_actions).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

fn one_hot(tp: &Treeplex, pure: &[usize]) -> Vec<Vec<f64>> {
    tp.infosets()
        .iter()
        .zip(pure)
        .map(|(s, &a)| {
            let mut v = vec![0.0; s.n_actions];
            v[a] = 1.0;
            v
        })
        .collect()
}

/// Player-1 return matrix over all pure strategy pairs.
pub fn normal_form(gt: &GameTree) -> Vec<Vec<f64>> {
    let zs = leaves(gt);
    let p1: Vec<Vec<Vec<f64>>> = pure_strategies(gt.treeplex(Player::P1))
        .iter()
        .map(|s| one_hot(gt.treeplex(Player::P1), s))
        .collect();
    let p2: Vec<Vec<Vec<f64>>> = pure_strategies(gt.treeplex(Player::P2))
        .iter()
        .map(|s| one_hot(gt.treeplex(Player::P2), s))
        .collect();
    p1.iter()
        .map(|a| {
            p2.iter()
                .map(|b| zs.iter().map(|z| path_weight(z, [a, b]) * z.payoff).sum())
                .collect()
        })
        .collect()
}

/// Player-1 equilibrium return via the pure-strategy normal form.
pub fn normal_form_value(gt: &GameTree) -> f64 {
    solve_matrix(&normal_form(gt)).2
}

/// Player-1 equilibrium return via the sequence-form LP
/// `max f·q  s.t.  Fᵀq ≤ Bᵀx, E x = e, x ≥ 0`.
pub fn sequence_form_value(gt: &GameTree) -> f64 {
    let t1 = gt.treeplex(Player::P1);
    let t2 = gt.treeplex(Player::P2);
    // Sequence 0 is the empty sequence; real sequences are shifted by one.
    let n1 = t1.n_seqs() + 1;
    let n2 = t2.n_seqs() + 1;
    let m2 = t2.n_infosets() + 1;
    let mut b = vec![vec![0.0; n2]; n1];
    for z in leaves(gt) {
        let mut last = [0usize; 2];
        for &(p, s, a) in &z.path {
            let tp = if p == Player::P1 { t1 } else { t2 };
            last[p.index()] = tp.seq(s, a) + 1;
        }
        b[last[0]][last[1]] += z.chance * z.payoff;
    }
    // Variables: x (n1), then q (m2, free).
    let mut lp = Lp::new(n1 + m2);
    lp.objective[n1] = 1.0;
    for v in lp.free.iter_mut().skip(n1) {
        *v = true;
    }
    // F: row 0 is y_∅ = 1; row t + 1 is Σ_a y(t, a) − y(parent) = 0.
    let parent2 = |j: usize| -> Vec<(usize, f64)> {
        // Entries of column j of F.
        let mut col = Vec::new();
        if j == 0 {
            col.push((0, 1.0));
        } else {
            let (t, _) = t2.seq_owner(j - 1);
            col.push((t + 1, 1.0));
        }
        for (t, info) in t2.infosets().iter().enumerate() {
            let parent = info.parent_seq.map_or(0, |ps| ps + 1);
            if parent == j {
                col.push((t + 1, -1.0));
            }
        }
        col
    };
    for j in 0..n2 {
        let mut row = vec![0.0; n1 + m2];
        for (r, v) in parent2(j) {
            row[n1 + r] += v;
        }
        for (i, bi) in b.iter().enumerate() {
            row[i] -= bi[j];
        }
        lp.add(row, Cmp::Le, 0.0);
    }
    let mut root = vec![0.0; n1 + m2];
    root[0] = 1.0;
    lp.add(root, Cmp::Eq, 1.0);
    for info in t1.infosets() {
        let mut row = vec![0.0; n1 + m2];
        for a in 0..info.n_actions {
            row[info.first_seq + a + 1] = 1.0;
        }
        row[info.parent_seq.map_or(0, |ps| ps + 1)] -= 1.0;
        lp.add(row, Cmp::Eq, 0.0);
    }
    lp.solve().expect("sequence-form LP is feasible and bounded").value
}

/// `x(s, a) = x(parent(s)) π(a|s)`.
pub fn sequence_from_behavioral(tp: &Treeplex, probs: &[Vec<f64>]) -> Vec<f64> {
    let mut x = vec![0.0; tp.n_seqs()];
    // Parents precede children in index order only by convention, so
    // resolve by repeated passes.
    let mut done = vec![false; tp.n_infosets()];
    while done.iter().any(|d| !d) {
        for (s, info) in tp.infosets().iter().enumerate() {
            if done[s] {
                continue;
            }
            let parent = match info.parent_seq {
                None => 1.0,
                Some(ps) => {
                    let (owner, _) = tp.seq_owner(ps);
                    if !done[owner] {
                        continue;
                    }
                    x[ps]
                }
            };
            for a in 0..info.n_actions {
                x[info.first_seq + a] = parent * probs[s][a];
            }
            done[s] = true;
        }
    }
    x
}

/// `Σ_s x(parent(s)) Σ_a π(a|s) log π(a|s)` from behavioral weights.
pub fn dilated_negentropy(tp: &Treeplex, probs: &[Vec<f64>]) -> f64 {
    let x = sequence_from_behavioral(tp, probs);
    tp.infosets()
        .iter()
        .enumerate()
        .map(|(s, info)| {
            let mass = info.parent_seq.map_or(1.0, |ps| x[ps]);
            mass * probs[s]
                .iter()
                .map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 })
                .sum::<f64>()
        })
        .sum()
}

/// `V(s)` in `player`'s own return: the reach-weighted return of every
/// terminal history through `s`, divided by `ρ(s)`.
pub fn infoset_value(gt: &GameTree, probs: [&[Vec<f64>]; 2], player: Player) -> Vec<Option<f64>> {
    let (rho, _) = trajectory_q(gt, probs, player);
    let mut num = vec![0.0; rho.len()];
    for z in leaves(gt) {
        let w = path_weight(&z, probs) * z.payoff * player.sign();
        let mut seen = Vec::new();
        for &(p, s, _) in &z.path {
            if p == player && !seen.contains(&s) {
                num[s] += w;
                seen.push(s);
            }
        }
    }
    rho.iter()
        .zip(num)
        .map(|(&r, n)| (r > 0.0).then(|| n / r))
        .collect()
}

/// Central differences of the return polynomial with respect to every
/// `π(a|s)` of `player` as an independent variable, in the player's own
/// return.
pub fn return_gradient_fd(gt: &GameTree, probs: [&[Vec<f64>]; 2], player: Player, h: f64) -> Vec<Vec<f64>> {
    let zs = leaves(gt);
    let eval = |p: [&[Vec<f64>]; 2]| -> f64 {
        zs.iter().map(|z| path_weight(z, p) * z.payoff).sum::<f64>() * player.sign()
    };
    let mut own = probs[player.index()].to_vec();
    let mut out = Vec::with_capacity(own.len());
    for s in 0..own.len() {
        let mut row = Vec::with_capacity(own[s].len());
        for a in 0..own[s].len() {
            let v = own[s][a];
            own[s][a] = v + h;
            let up = if player == Player::P1 { eval([&own, probs[1]]) } else { eval([probs[0], &own]) };
            own[s][a] = v - h;
            let dn = if player == Player::P1 { eval([&own, probs[1]]) } else { eval([probs[0], &own]) };
            own[s][a] = v;
            row.push((up - dn) / (2.0 * h));
        }
        out.push(row);
    }
    out
}
