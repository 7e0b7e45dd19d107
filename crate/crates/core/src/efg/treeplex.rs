use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tree::Player;
use crate::error::{Error, Result};

/// Tolerance on the flow constraints accepted from callers.
pub const TREEPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfosetInfo {
    pub key: u64,
    pub n_actions: usize,
    /// Sequence id of action 0; action `a` is `first_seq + a`.
    pub first_seq: usize,
    /// The player's own edge that immediately leads here, `None` at the root.
    pub parent_seq: Option<usize>,
    /// Infosets whose parent sequence is `(this, a)`, per action.
    pub child_infosets: Vec<Vec<usize>>,
}

/// One player's sequence-form strategy space. Infosets are stored in
/// topological order (parents before children).
#[derive(Debug, Clone, PartialEq)]
pub struct Treeplex {
    player: Player,
    infosets: Vec<InfosetInfo>,
    seq_owner: Vec<usize>,
    by_key: HashMap<u64, usize>,
}

impl Treeplex {
    pub(crate) fn new(player: Player, infosets: Vec<InfosetInfo>, seq_owner: Vec<usize>) -> Self {
        let by_key = infosets.iter().enumerate().map(|(i, s)| (s.key, i)).collect();
        Self {
            player,
            infosets,
            seq_owner,
            by_key,
        }
    }

    /// Builds a treeplex directly from infoset descriptions given in
    /// topological order; `parent_seq` entries must reference earlier infosets.
    pub fn from_infosets(player: Player, specs: &[(usize, Option<usize>)]) -> Result<Self> {
        let mut infosets: Vec<InfosetInfo> = Vec::with_capacity(specs.len());
        let mut seq_owner: Vec<usize> = Vec::new();
        for (i, &(n_actions, parent_seq)) in specs.iter().enumerate() {
            if n_actions == 0 {
                return Err(Error::ContractViolation(format!("infoset {i} has no actions")));
            }
            if let Some(ps) = parent_seq {
                let owner = *seq_owner.get(ps).ok_or_else(|| {
                    Error::ContractViolation(format!("infoset {i}: parent sequence {ps} not yet defined"))
                })?;
                let a = ps - infosets[owner].first_seq;
                infosets[owner].child_infosets[a].push(i);
            }
            infosets.push(InfosetInfo {
                key: i as u64,
                n_actions,
                first_seq: seq_owner.len(),
                parent_seq,
                child_infosets: vec![Vec::new(); n_actions],
            });
            seq_owner.extend(std::iter::repeat_n(i, n_actions));
        }
        Ok(Self::new(player, infosets, seq_owner))
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn n_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn n_seqs(&self) -> usize {
        self.seq_owner.len()
    }

    pub fn infosets(&self) -> &[InfosetInfo] {
        &self.infosets
    }

    pub fn infoset(&self, s: usize) -> &InfosetInfo {
        &self.infosets[s]
    }

    pub fn infoset_by_key(&self, key: u64) -> Option<usize> {
        self.by_key.get(&key).copied()
    }

    #[inline]
    pub fn seq(&self, s: usize, a: usize) -> usize {
        self.infosets[s].first_seq + a
    }

    /// `(infoset, action)` of a sequence id.
    pub fn seq_owner(&self, seq: usize) -> (usize, usize) {
        let s = self.seq_owner[seq];
        (s, seq - self.infosets[s].first_seq)
    }

    /// Infosets without a parent sequence.
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.infosets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.parent_seq.is_none())
            .map(|(i, _)| i)
    }
}

/// Reach probabilities over one player's sequences, excluding the opponent
/// and chance. The empty sequence has implicit mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequencePolicy {
    pub player: Player,
    pub x: Vec<f64>,
}

impl SequencePolicy {
    /// Validates the flow constraints against `tp`.
    pub fn new(tp: &Treeplex, x: Vec<f64>) -> Result<Self> {
        let p = Self {
            player: tp.player(),
            x,
        };
        p.validate(tp)?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(player: Player, x: Vec<f64>) -> Self {
        Self { player, x }
    }

    /// Mass of an optional parent sequence (`None` is the empty sequence).
    #[inline]
    pub fn reach(&self, seq: Option<usize>) -> f64 {
        seq.map_or(1.0, |s| self.x[s])
    }

    /// `x(s) = Σ_a x(s, a)`, which equals the parent sequence mass.
    pub fn infoset_reach(&self, tp: &Treeplex, s: usize) -> f64 {
        self.reach(tp.infoset(s).parent_seq)
    }

    /// Largest violation of `Σ_a x(s,a) = x(parent(s))` over all infosets.
    pub fn max_violation(&self, tp: &Treeplex) -> f64 {
        tp.infosets()
            .iter()
            .map(|s| {
                let total: f64 = self.x[s.first_seq..s.first_seq + s.n_actions].iter().sum();
                (total - self.reach(s.parent_seq)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, tp: &Treeplex) -> Result<()> {
        if self.player != tp.player() || self.x.len() != tp.n_seqs() {
            return Err(Error::DimensionMismatch(format!(
                "{} policy with {} sequences does not fit {} treeplex with {}",
                self.player,
                self.x.len(),
                tp.player(),
                tp.n_seqs()
            )));
        }
        if self.x.iter().any(|v| !(-TREEPLEX_TOL..=1.0 + TREEPLEX_TOL).contains(v)) {
            return Err(Error::ContractViolation("sequence mass outside [0, 1]".into()));
        }
        let worst = self.max_violation(tp);
        if worst > TREEPLEX_TOL {
            return Err(Error::ContractViolation(format!(
                "treeplex flow constraint violated by {worst}"
            )));
        }
        Ok(())
    }

    /// Convex combination `(1 − w) self + w other`.
    pub fn lerp(&self, other: &SequencePolicy, w: f64) -> SequencePolicy {
        SequencePolicy {
            player: self.player,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + (b - a) * w).collect(),
        }
    }
}

/// Conditional policy `π(·|s)` per infoset, in treeplex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehavioralPolicy {
    pub player: Player,
    pub probs: Vec<Vec<f64>>,
}

impl BehavioralPolicy {
    pub fn uniform(tp: &Treeplex) -> Self {
        Self {
            player: tp.player(),
            probs: tp
                .infosets()
                .iter()
                .map(|s| vec![1.0 / s.n_actions as f64; s.n_actions])
                .collect(),
        }
    }

    pub fn new(tp: &Treeplex, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != tp.n_infosets() {
            return Err(Error::DimensionMismatch(format!(
                "{} infosets expected, got {}",
                tp.n_infosets(),
                probs.len()
            )));
        }
        for (i, (p, s)) in probs.iter().zip(tp.infosets()).enumerate() {
            let sum: f64 = p.iter().sum();
            if p.len() != s.n_actions
                || p.iter().any(|v| !(*v >= 0.0 && v.is_finite()))
                || (sum - 1.0).abs() > TREEPLEX_TOL
            {
                return Err(Error::ContractViolation(format!(
                    "infoset {i}: {p:?} is not a distribution over {} actions",
                    s.n_actions
                )));
            }
        }
        Ok(Self {
            player: tp.player(),
            probs,
        })
    }
}

/// `x(s, a) = x(s) · π(a|s)`, pushed top-down.
pub fn behavioral_to_sequence(tp: &Treeplex, pi: &BehavioralPolicy) -> SequencePolicy {
    let mut x = vec![0.0; tp.n_seqs()];
    for (s, info) in tp.infosets().iter().enumerate() {
        let parent = info.parent_seq.map_or(1.0, |ps| x[ps]);
        for a in 0..info.n_actions {
            x[info.first_seq + a] = parent * pi.probs[s][a];
        }
    }
    SequencePolicy::new_unchecked(tp.player(), x)
}

/// `π(a|s) = x(s, a) / x(s)`, uniform where `x(s) = 0`.
pub fn sequence_to_behavioral(tp: &Treeplex, x: &SequencePolicy) -> Result<BehavioralPolicy> {
    x.validate(tp)?;
    Ok(sequence_to_behavioral_unchecked(tp, x))
}

pub(crate) fn sequence_to_behavioral_unchecked(tp: &Treeplex, x: &SequencePolicy) -> BehavioralPolicy {
    let probs = tp
        .infosets()
        .iter()
        .map(|info| {
            let mass = x.reach(info.parent_seq);
            let seqs = &x.x[info.first_seq..info.first_seq + info.n_actions];
            if mass > 0.0 {
                let total: f64 = seqs.iter().map(|v| v.max(0.0)).sum();
                if total > 0.0 {
                    return seqs.iter().map(|v| v.max(0.0) / total).collect();
                }
            }
            vec![1.0 / info.n_actions as f64; info.n_actions]
        })
        .collect();
    BehavioralPolicy {
        player: tp.player(),
        probs,
    }
}

pub fn uniform_sequence(tp: &Treeplex) -> SequencePolicy {
    behavioral_to_sequence(tp, &BehavioralPolicy::uniform(tp))
}
