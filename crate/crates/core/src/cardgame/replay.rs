use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::GameConfig;
use super::state::{CardGameState, Rules};
use crate::error::{parse_err, Result};

/// One applied decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub turn: u32,
    pub player: u8,
    pub action: usize,
    /// Player 1's reward after the action (non-zero only at the end).
    pub reward: f64,
}

pub fn write_trajectory<W: Write>(records: &[TrajectoryRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "turn,player,action,reward")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.turn, r.player, r.action, r.reward)?;
    }
    Ok(())
}

/// A game pinned down by its config, deal seed and decisions.
///
/// ```text
/// cardgame-replay v1
/// <config lines>
/// deal_seed = <n>
/// actions = <id> <id> ...
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub config: GameConfig,
    pub deal_seed: u64,
    pub actions: Vec<usize>,
}

impl Replay {
    pub fn to_text(&self) -> String {
        let actions: Vec<String> = self.actions.iter().map(|a| a.to_string()).collect();
        format!(
            "cardgame-replay v1\n{}deal_seed = {}\nactions = {}\n",
            self.config.to_text(),
            self.deal_seed,
            actions.join(" ")
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == "cardgame-replay v1" => {}
            _ => return Err(parse_err(1, "expected `cardgame-replay v1` header")),
        }
        let mut config_text = String::new();
        let mut deal_seed = None;
        let mut actions = None;
        for (i, line) in lines {
            let (k, v) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => {
                    config_text.push_str(line);
                    config_text.push('\n');
                    continue;
                }
            };
            match k {
                "deal_seed" => {
                    deal_seed = Some(v.parse().map_err(|_| parse_err(i + 1, "bad deal_seed"))?)
                }
                "actions" => {
                    actions = Some(
                        v.split_whitespace()
                            .map(|t| t.parse().map_err(|_| parse_err(i + 1, format!("bad action {t:?}"))))
                            .collect::<Result<Vec<usize>>>()?,
                    )
                }
                _ => {
                    config_text.push_str(line);
                    config_text.push('\n');
                }
            }
        }
        Ok(Self {
            config: GameConfig::parse(&config_text)?,
            deal_seed: deal_seed.ok_or_else(|| parse_err(0, "missing deal_seed"))?,
            actions: actions.ok_or_else(|| parse_err(0, "missing actions"))?,
        })
    }

    /// Re-plays the decisions, returning the trajectory and final state.
    pub fn run(&self) -> Result<(Vec<TrajectoryRecord>, CardGameState)> {
        let mut h = CardGameState::with_deal(Rules::new(self.config.clone())?, self.deal_seed)?;
        let mut records = Vec::with_capacity(self.actions.len());
        for &a in &self.actions {
            let player = h.to_act().map_or(0, |p| p.number());
            let turn = h.turn();
            let out = h.apply(a)?;
            records.push(TrajectoryRecord {
                turn,
                player,
                action: a,
                reward: out.reward,
            });
        }
        Ok((records, h))
    }
}
