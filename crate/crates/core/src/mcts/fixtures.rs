//! Small perfect-information games for checking the planner.

use rand::Rng;

use super::search::{SearchGame, SearchPolicy};
use crate::efg::Player;
use crate::error::{Error, Result};

/// Player 1 picks a row, player 2 a column; player 1 receives
/// `rewards[row][col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoMoveGame {
    pub rewards: Vec<Vec<f64>>,
    pub row: Option<usize>,
    pub col: Option<usize>,
}

impl TwoMoveGame {
    pub fn new(rewards: Vec<Vec<f64>>) -> Self {
        Self {
            rewards,
            row: None,
            col: None,
        }
    }

    /// Row maximizing the worst-case reward, with its value.
    pub fn minimax(&self) -> (usize, f64) {
        let worst: Vec<f64> = self
            .rewards
            .iter()
            .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let mut best = 0;
        for (i, &w) in worst.iter().enumerate() {
            if w > worst[best] {
                best = i;
            }
        }
        (best, worst[best])
    }
}

impl SearchGame for TwoMoveGame {
    fn to_move(&self) -> Option<Player> {
        match (self.row, self.col) {
            (None, _) => Some(Player::P1),
            (Some(_), None) => Some(Player::P2),
            _ => None,
        }
    }

    fn legal(&self) -> Vec<usize> {
        match self.to_move() {
            Some(Player::P1) => (0..self.rewards.len()).collect(),
            Some(Player::P2) => (0..self.rewards[0].len()).collect(),
            None => Vec::new(),
        }
    }

    fn play(&mut self, action: usize) -> Result<()> {
        if !self.legal().contains(&action) {
            return Err(Error::IllegalAction {
                action,
                reason: "not offered".into(),
            });
        }
        match self.row {
            None => self.row = Some(action),
            Some(_) => self.col = Some(action),
        }
        Ok(())
    }

    fn reward(&self, player: Player) -> Option<f64> {
        match (self.row, self.col) {
            (Some(r), Some(c)) => Some(player.sign() * self.rewards[r][c]),
            _ => None,
        }
    }
}

/// Uniform for player 1; player 2 plays the lowest-index column minimizing
/// player 1's reward.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinimizingReply;

impl SearchPolicy<TwoMoveGame> for MinimizingReply {
    fn probs(&self, h: &TwoMoveGame, legal: &[usize]) -> Vec<f64> {
        match h.row {
            None => vec![1.0 / legal.len() as f64; legal.len()],
            Some(r) => {
                let row = &h.rewards[r];
                let mut best = 0;
                for (i, &c) in legal.iter().enumerate() {
                    if row[c] < row[legal[best]] {
                        best = i;
                    }
                }
                let mut p = vec![0.0; legal.len()];
                p[best] = 1.0;
                p
            }
        }
    }
}

/// Random game with rewards in `{−1, 0, 1}` whose minimax row is unique.
pub fn random_two_move<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> TwoMoveGame {
    loop {
        let rewards: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(-1..=1) as f64).collect())
            .collect();
        let g = TwoMoveGame::new(rewards);
        let (_, v) = g.minimax();
        let ties = g
            .rewards
            .iter()
            .filter(|r| r.iter().copied().fold(f64::INFINITY, f64::min) == v)
            .count();
        if ties == 1 {
            return g;
        }
    }
}
