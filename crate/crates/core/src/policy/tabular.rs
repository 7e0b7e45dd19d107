use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cardgame::{ActionMask, CardGameTree, InfoState, Stage};
use crate::efg::{behavioral_to_sequence, BehavioralPolicy, Player, SequencePolicy};
use crate::error::{parse_err, Error, Result};
use crate::ngame::SimplexPolicy;
use crate::numeric::softmax;

const HEADER: &str = "tabular-policy v1";

/// Logit tables keyed by information-state key, one table per stage. The
/// stage of the state picks the table, so a single policy covers both deck
/// building and battle. Unseen states have all-zero logits.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    action_size: usize,
    blocks: [BTreeMap<u64, Vec<f64>>; 2],
}

#[inline]
fn block_index(stage: Stage) -> usize {
    match stage {
        Stage::Cb => 0,
        Stage::Bt => 1,
    }
}

/// Softmax of `logits / tau` restricted to `legal`; `tau = 0` is the one-hot
/// argmax with ties going to the first legal entry.
pub fn tempered(logits: &[f64], tau: f64) -> Vec<f64> {
    if tau == 0.0 {
        let mut best = 0;
        for (i, &l) in logits.iter().enumerate() {
            if l > logits[best] {
                best = i;
            }
        }
        let mut p = vec![0.0; logits.len()];
        p[best] = 1.0;
        return p;
    }
    let scaled: Vec<f64> = logits.iter().map(|l| l / tau).collect();
    softmax(&scaled)
}

impl TabularPolicy {
    pub fn new(action_size: usize) -> Self {
        Self {
            action_size,
            blocks: [BTreeMap::new(), BTreeMap::new()],
        }
    }

    pub fn action_size(&self) -> usize {
        self.action_size
    }

    pub fn block(&self, stage: Stage) -> &BTreeMap<u64, Vec<f64>> {
        &self.blocks[block_index(stage)]
    }

    pub fn logits(&self, stage: Stage, key: u64) -> Option<&[f64]> {
        self.blocks[block_index(stage)].get(&key).map(Vec::as_slice)
    }

    /// Logit row of a state, created as zeros on first access.
    pub fn logits_mut(&mut self, stage: Stage, key: u64) -> &mut [f64] {
        let n = self.action_size;
        self.blocks[block_index(stage)]
            .entry(key)
            .or_insert_with(|| vec![0.0; n])
    }

    /// Action probabilities over `legal` (ascending flat ids).
    pub fn probs_over(&self, stage: Stage, key: u64, legal: &[usize], tau: f64) -> Vec<f64> {
        let logits: Vec<f64> = match self.logits(stage, key) {
            Some(row) => legal.iter().map(|&a| row[a]).collect(),
            None => vec![0.0; legal.len()],
        };
        tempered(&logits, tau)
    }

    /// Policy over the full action space; zero on masked actions.
    pub fn act(&self, s: &InfoState, mask: &ActionMask, tau: f64) -> Result<SimplexPolicy> {
        self.act_key(s.stage, s.key, mask, tau)
    }

    pub fn act_key(&self, stage: Stage, key: u64, mask: &ActionMask, tau: f64) -> Result<SimplexPolicy> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::ContractViolation(format!("temperature must be >= 0, got {tau}")));
        }
        if mask.len() != self.action_size {
            return Err(Error::DimensionMismatch(format!(
                "mask has {} entries, policy has {} actions",
                mask.len(),
                self.action_size
            )));
        }
        let legal = mask.legal();
        if legal.is_empty() {
            return Err(Error::ContractViolation("no legal action".into()));
        }
        let p = self.probs_over(stage, key, &legal, tau);
        let mut full = vec![0.0; self.action_size];
        for (&a, v) in legal.iter().zip(p) {
            full[a] = v;
        }
        Ok(SimplexPolicy::new_unchecked(full))
    }

    /// The behavior of `player` on a flattened card game as a sequence-form
    /// policy.
    pub fn to_sequence(&self, cg: &CardGameTree, player: Player, tau: f64) -> SequencePolicy {
        let tp = cg.tree.treeplex(player);
        let probs = cg.infosets[player.index()]
            .iter()
            .map(|m| self.probs_over(m.stage, m.key, &m.actions, tau))
            .collect();
        behavioral_to_sequence(
            tp,
            &BehavioralPolicy {
                player,
                probs,
            },
        )
    }

    /// ```text
    /// tabular-policy v1
    /// actions <n>
    /// <cb|bt> <key> <action>:<logit> ...
    /// ```
    /// Zero logits are omitted.
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\nactions {}\n", self.action_size);
        for (tag, stage) in [("cb", Stage::Cb), ("bt", Stage::Bt)] {
            for (key, row) in self.block(stage) {
                write!(out, "{tag} {key}").unwrap();
                for (a, l) in row.iter().enumerate().filter(|(_, l)| **l != 0.0) {
                    write!(out, " {a}:{l:?}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err(parse_err(1, format!("expected `{HEADER}` header"))),
        }
        let action_size = match lines.next() {
            Some((i, l)) => l
                .trim()
                .strip_prefix("actions ")
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| parse_err(i + 1, "expected `actions <n>`"))?,
            None => return Err(parse_err(2, "missing `actions <n>` line")),
        };
        let mut policy = Self::new(action_size);
        for (i, line) in lines {
            let ln = i + 1;
            let mut tok = line.split_whitespace();
            let stage = match tok.next() {
                Some("cb") => Stage::Cb,
                Some("bt") => Stage::Bt,
                other => return Err(parse_err(ln, format!("expected cb or bt, got {other:?}"))),
            };
            let key: u64 = tok
                .next()
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| parse_err(ln, "bad state key"))?;
            let row = policy.logits_mut(stage, key);
            for t in tok {
                let (a, l) = t
                    .split_once(':')
                    .ok_or_else(|| parse_err(ln, format!("expected action:logit, got {t:?}")))?;
                let a: usize = a.parse().map_err(|_| parse_err(ln, format!("bad action {a:?}")))?;
                let l: f64 = l.parse().map_err(|_| parse_err(ln, format!("bad logit {l:?}")))?;
                if a >= action_size || !l.is_finite() {
                    return Err(parse_err(ln, format!("entry {t:?} out of range")));
                }
                row[a] = l;
            }
        }
        Ok(policy)
    }
}
