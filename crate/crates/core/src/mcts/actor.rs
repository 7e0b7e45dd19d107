use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::search::{search, MctsParams, SearchPolicy};
use crate::cardgame::CardGameState;
use crate::efg::Player;
use crate::error::{Error, Result};
use crate::numeric::sample_categorical;
use crate::policy::{Actor, TabularPolicy};

/// Search on an own information state with probability `p_expand`, using
/// `n_expand` simulations, and keep searching for `m_successive` own states
/// in a row once triggered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RolloutMixParams {
    pub p_expand: f64,
    pub n_expand: usize,
    pub m_successive: usize,
}

impl Default for RolloutMixParams {
    fn default() -> Self {
        Self {
            p_expand: 0.1,
            n_expand: 40,
            m_successive: 1,
        }
    }
}

impl RolloutMixParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_expand) || self.n_expand == 0 || self.m_successive == 0 {
            return Err(Error::Config(format!(
                "need p_expand in [0, 1], n_expand >= 1, m_successive >= 1; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Expected searched simulations per own decision, `p · n · m` to first
    /// order for small `p`.
    pub fn budget(&self) -> f64 {
        self.p_expand * self.n_expand as f64 * self.m_successive as f64
    }
}

/// Plays `policy`, switching to MCTS at randomly triggered information
/// states. The reported probability of a searched move is its visit share,
/// which is the behavior policy to correct for during learning.
pub struct RolloutMixActor<'a, V> {
    pub policy: &'a TabularPolicy,
    pub value_fn: V,
    pub mix: RolloutMixParams,
    pub mcts: MctsParams,
    remaining: [usize; 2],
    pub searches: usize,
}

impl<'a, V> RolloutMixActor<'a, V>
where
    V: Fn(&CardGameState, Player, &mut ChaCha8Rng) -> f64,
{
    /// `mcts.n` is replaced by `mix.n_expand`.
    pub fn new(policy: &'a TabularPolicy, value_fn: V, mix: RolloutMixParams, mcts: MctsParams) -> Result<Self> {
        mix.validate()?;
        let mcts = MctsParams {
            n: mix.n_expand,
            ..mcts
        };
        mcts.validate()?;
        Ok(Self {
            policy,
            value_fn,
            mix,
            mcts,
            remaining: [0; 2],
            searches: 0,
        })
    }
}

impl<V> Actor for RolloutMixActor<'_, V>
where
    V: Fn(&CardGameState, Player, &mut ChaCha8Rng) -> f64,
{
    fn choose(&mut self, h: &CardGameState, rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
        let player = h.to_act().expect("actor called on a decision state");
        let left = &mut self.remaining[player.index()];
        if *left == 0 && self.mix.p_expand > 0.0 && rng.random::<f64>() < self.mix.p_expand {
            *left = self.mix.m_successive;
        }
        if *left > 0 {
            *left -= 1;
            self.searches += 1;
            let r = search(h, self.policy, &self.value_fn, &self.mcts, rng)?;
            let p = r.visits.iter().find(|v| v.0 == r.action).map_or(0.0, |v| v.1);
            return Ok((r.action, p));
        }
        let legal = h.legal_actions(player)?.legal();
        let p = SearchPolicy::probs(self.policy, h, &legal);
        let i = sample_categorical(&p, rng);
        Ok((legal[i], p[i]))
    }
}
