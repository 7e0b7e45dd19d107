use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

/// Creatures per player per lane.
pub const LANE_CAPACITY: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CbMode {
    /// Each round offers `candidates_per_round` cards; pick one.
    Arena,
    /// Pick `deck_size` distinct cards from the whole pool, one at a time.
    Constructed,
}

impl FromStr for CbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arena" => Ok(CbMode::Arena),
            "constructed" => Ok(CbMode::Constructed),
            other => Err(Error::Config(format!("unknown cb_mode {other:?}"))),
        }
    }
}

impl fmt::Display for CbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CbMode::Arena => "arena",
            CbMode::Constructed => "constructed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub pool_size: usize,
    pub deck_size: usize,
    pub cb_mode: CbMode,
    pub candidates_per_round: usize,
    pub lanes: usize,
    pub initial_hp: i32,
    pub max_mana: u32,
    pub hand_limit: usize,
    /// Rounds; each player gets this many turns.
    pub max_turns: u32,
    pub draw_per_turn: usize,
    /// Seeds the card pool and the arena candidates.
    pub rng_seed: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            pool_size: 12,
            deck_size: 4,
            cb_mode: CbMode::Arena,
            candidates_per_round: 3,
            lanes: 2,
            initial_hp: 8,
            max_mana: 3,
            hand_limit: 4,
            max_turns: 5,
            draw_per_turn: 1,
            rng_seed: 0,
        }
    }
}

const KEYS: [&str; 11] = [
    "pool_size",
    "deck_size",
    "cb_mode",
    "candidates_per_round",
    "lanes",
    "initial_hp",
    "max_mana",
    "hand_limit",
    "max_turns",
    "draw_per_turn",
    "rng_seed",
];

impl GameConfig {
    /// Three cards, one pick each, one lane, two rounds. Game value 0 and
    /// about a hundred tree nodes, so it is solvable exactly in microseconds.
    pub fn tiny() -> Self {
        Self {
            pool_size: 3,
            deck_size: 1,
            cb_mode: CbMode::Constructed,
            candidates_per_round: 3,
            lanes: 1,
            initial_hp: 3,
            max_mana: 2,
            hand_limit: 2,
            max_turns: 2,
            draw_per_turn: 1,
            rng_seed: 4,
        }
    }

    /// Arena drafting of two cards with random draws; a few thousand tree
    /// nodes including chance.
    pub fn small() -> Self {
        Self {
            pool_size: 4,
            deck_size: 2,
            cb_mode: CbMode::Arena,
            candidates_per_round: 2,
            rng_seed: 17,
            ..Self::tiny()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.pool_size == 0 || self.deck_size == 0 {
            return fail("pool_size and deck_size must be positive".into());
        }
        if self.deck_size > self.pool_size {
            return fail(format!(
                "deck_size {} exceeds pool_size {}",
                self.deck_size, self.pool_size
            ));
        }
        if self.cb_mode == CbMode::Arena
            && !(1..=self.pool_size).contains(&self.candidates_per_round)
        {
            return fail(format!(
                "candidates_per_round must be in 1..={}",
                self.pool_size
            ));
        }
        if self.lanes == 0 || self.hand_limit == 0 || self.max_turns == 0 || self.max_mana == 0 {
            return fail("lanes, hand_limit, max_turns and max_mana must be positive".into());
        }
        if self.initial_hp <= 0 {
            return fail("initial_hp must be positive".into());
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Missing keys keep
    /// their default.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = GameConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(i + 1, format!("expected key = value, got {line:?}")))?;
            c.set(k.trim(), v.trim()).map_err(|e| parse_err(i + 1, e.to_string()))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
        }
        match key {
            "pool_size" => self.pool_size = num(key, value)?,
            "deck_size" => self.deck_size = num(key, value)?,
            "cb_mode" => self.cb_mode = value.parse()?,
            "candidates_per_round" => self.candidates_per_round = num(key, value)?,
            "lanes" => self.lanes = num(key, value)?,
            "initial_hp" => self.initial_hp = num(key, value)?,
            "max_mana" => self.max_mana = num(key, value)?,
            "hand_limit" => self.hand_limit = num(key, value)?,
            "max_turns" => self.max_turns = num(key, value)?,
            "draw_per_turn" => self.draw_per_turn = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?}; expected one of {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "pool_size = {}\ndeck_size = {}\ncb_mode = {}\ncandidates_per_round = {}\nlanes = {}\n\
             initial_hp = {}\nmax_mana = {}\nhand_limit = {}\nmax_turns = {}\ndraw_per_turn = {}\n\
             rng_seed = {}\n",
            self.pool_size,
            self.deck_size,
            self.cb_mode,
            self.candidates_per_round,
            self.lanes,
            self.initial_hp,
            self.max_mana,
            self.hand_limit,
            self.max_turns,
            self.draw_per_turn,
            self.rng_seed
        )
    }

    /// Number of picks offered per CB decision.
    pub fn cb_width(&self) -> usize {
        match self.cb_mode {
            CbMode::Arena => self.candidates_per_round,
            CbMode::Constructed => self.pool_size,
        }
    }
}
