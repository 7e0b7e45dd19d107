use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::efg::Player;
use crate::error::{Error, Result};
use crate::numeric::sample_categorical;

/// How historical opponents are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpponentRule {
    Uniform,
    /// Newest snapshot weighted double.
    Recency,
}

impl FromStr for OpponentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(OpponentRule::Uniform),
            "recency" => Ok(OpponentRule::Recency),
            other => Err(Error::Config(format!("unknown opponent rule {other:?}"))),
        }
    }
}

impl fmt::Display for OpponentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpponentRule::Uniform => "uniform",
            OpponentRule::Recency => "recency",
        })
    }
}

impl OpponentRule {
    pub fn weights(self, n: usize) -> Vec<f64> {
        match self {
            OpponentRule::Uniform => vec![1.0; n],
            OpponentRule::Recency => (0..n).map(|i| if i + 1 == n { 2.0 } else { 1.0 }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Opponent {
    SelfPlay,
    Historical(usize),
}

/// One finished game, from the learner's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// `+1` win, `−1` loss, `0` draw.
    pub g: i8,
    pub opponent: Opponent,
    pub learner_side: Player,
}

/// Gate parameters of the league.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    /// Self-play probability.
    pub p: f64,
    /// Score threshold on `G[i]/C[i]`.
    pub xi: f64,
    /// Learning periods without a snapshot before one is forced.
    pub c: u32,
    pub f: OpponentRule,
}

impl Default for GateParams {
    fn default() -> Self {
        Self {
            p: 0.6,
            xi: 0.7,
            c: 6,
            f: OpponentRule::Uniform,
        }
    }
}

impl GateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) || !(self.xi > 0.0 && self.xi < 1.0) || self.c == 0 {
            return Err(Error::Config(format!(
                "need 0 < p < 1, 0 < xi < 1 and c > 0; got p={}, xi={}, c={}",
                self.p, self.xi, self.c
            )));
        }
        Ok(())
    }
}

/// Snapshots `H` with per-LP score `G` and match count `C` against each.
#[derive(Debug, Clone, PartialEq)]
pub struct LeagueState<P> {
    pub history: Vec<P>,
    pub g: Vec<i64>,
    pub c: Vec<u64>,
    pub count: u32,
    pub params: GateParams,
}

/// `(∀i: C[i] > 0 ∧ G[i]/C[i] > ξ) ∨ count > c`.
pub fn gate_predicate(g: &[i64], c: &[u64], count: u32, params: &GateParams) -> bool {
    let all_beaten = g
        .iter()
        .zip(c)
        .all(|(&gi, &ci)| ci > 0 && gi as f64 / ci as f64 > params.xi);
    all_beaten || count > params.c
}

impl<P> LeagueState<P> {
    pub fn new(params: GateParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            history: Vec::new(),
            g: Vec::new(),
            c: Vec::new(),
            count: 0,
            params,
        })
    }

    /// Clears `G` and `C` at the start of a learning period.
    pub fn begin_lp(&mut self) {
        self.g = vec![0; self.history.len()];
        self.c = vec![0; self.history.len()];
    }

    pub fn select_opponent<R: Rng + ?Sized>(&self, rng: &mut R) -> Opponent {
        if self.history.is_empty() || rng.random::<f64>() < self.params.p {
            return Opponent::SelfPlay;
        }
        let w = self.params.f.weights(self.history.len());
        let total: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|v| v / total).collect();
        Opponent::Historical(sample_categorical(&probs, rng))
    }

    pub fn record_result(&mut self, i: usize, g: i8) -> Result<()> {
        if i >= self.g.len() {
            return Err(Error::ContractViolation(format!(
                "opponent {i} out of range for {} snapshots",
                self.g.len()
            )));
        }
        if !(-1..=1).contains(&g) {
            return Err(Error::ContractViolation(format!("game result {g} not in {{-1, 0, 1}}")));
        }
        self.g[i] += g as i64;
        self.c[i] += 1;
        Ok(())
    }

    /// End-of-period gate: snapshots `learner` and resets `count` when the
    /// predicate holds, otherwise increments `count`.
    pub fn gate(&mut self, learner: impl FnOnce() -> P) -> bool {
        if gate_predicate(&self.g, &self.c, self.count, &self.params) {
            self.history.push(learner());
            self.count = 0;
            true
        } else {
            self.count += 1;
            false
        }
    }

    /// Mean of `(1 + G[i]/C[i]) / 2` over opponents played this period.
    pub fn mean_winrate(&self) -> Option<f64> {
        let rates: Vec<f64> = self
            .g
            .iter()
            .zip(&self.c)
            .filter(|(_, &c)| c > 0)
            .map(|(&g, &c)| 0.5 * (1.0 + g as f64 / c as f64))
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}
