use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{GateParams, LeagueState, Opponent};
use crate::cardgame::{to_game_tree, CardGameTree, GameConfig, Rules, Stage, DEFAULT_NODE_BUDGET};
use crate::efg::{exploitability_efg, Player};
use crate::error::{Error, Result};
use crate::policy::{play_policies, reinforce_update, PgConfig, RolloutBatch, TabularPolicy, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeagueConfig {
    pub game: GameConfig,
    pub n_lp: usize,
    /// Games per learning period.
    pub samples_per_lp: usize,
    pub gate: GateParams,
    /// `batch` is the number of games per update wave.
    pub pg: PgConfig,
    pub entropy_weight: f64,
    /// Sampling temperature of every actor.
    pub tau: f64,
    pub seed: u64,
    /// Node budget for flattening the game to measure exploitability; games
    /// over budget log no exploitability.
    pub tree_budget: usize,
}

impl Default for LeagueConfig {
    fn default() -> Self {
        Self {
            game: GameConfig::default(),
            n_lp: 30,
            samples_per_lp: 100_000,
            gate: GateParams::default(),
            pg: PgConfig::default(),
            entropy_weight: 0.01,
            tau: 1.0,
            seed: 0,
            tree_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl LeagueConfig {
    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        self.gate.validate()?;
        self.pg.validate()?;
        if self.samples_per_lp == 0 {
            return Err(Error::Config("samples_per_lp must be positive".into()));
        }
        if !(self.entropy_weight >= 0.0) || !(self.tau > 0.0) {
            return Err(Error::Config("entropy_weight must be >= 0 and tau > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeagueLogRow {
    pub lp: usize,
    pub len_h: usize,
    pub count: u32,
    pub learner_exploitability: Option<f64>,
    pub mean_winrate: Option<f64>,
    /// Stage trained during the period, for alternating training.
    pub stage: Option<Stage>,
    pub snapshot: bool,
}

#[derive(Debug, Clone)]
pub struct LeagueRun {
    pub log: Vec<LeagueLogRow>,
    pub learner: TabularPolicy,
    pub league: LeagueState<TabularPolicy>,
}

pub fn write_league_csv<W: Write>(rows: &[LeagueLogRow], mut out: W) -> std::io::Result<()> {
    fn opt(v: Option<f64>) -> String {
        v.map_or(String::new(), |x| x.to_string())
    }
    writeln!(out, "lp,len_H,count,learner_exploitability,mean_winrate")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.lp,
            r.len_h,
            r.count,
            opt(r.learner_exploitability),
            opt(r.mean_winrate)
        )?;
    }
    Ok(())
}

/// Exploitability of a tabular policy playing both seats.
pub fn policy_exploitability(cg: &CardGameTree, policy: &TabularPolicy, tau: f64) -> Result<f64> {
    let x = policy.to_sequence(cg, Player::P1, tau);
    let y = policy.to_sequence(cg, Player::P2, tau);
    exploitability_efg(&cg.tree, &x, &y)
}

/// Self-play league with opponent sampling from frozen snapshots.
pub fn run_league(cfg: &LeagueConfig) -> Result<LeagueRun> {
    run(cfg, false, |_, _| ())
}

/// [`run_league`] with a callback after every learning period.
pub fn run_league_with<F: FnMut(&LeagueLogRow, &TabularPolicy)>(
    cfg: &LeagueConfig,
    on_lp: F,
) -> Result<LeagueRun> {
    run(cfg, false, on_lp)
}

/// As [`run_league`], but only one stage's table learns at a time, starting
/// with battle and switching at every snapshot.
pub fn run_alternating(cfg: &LeagueConfig) -> Result<LeagueRun> {
    run(cfg, true, |_, _| ())
}

pub fn run_alternating_with<F: FnMut(&LeagueLogRow, &TabularPolicy)>(
    cfg: &LeagueConfig,
    on_lp: F,
) -> Result<LeagueRun> {
    run(cfg, true, on_lp)
}

fn run<F: FnMut(&LeagueLogRow, &TabularPolicy)>(
    cfg: &LeagueConfig,
    alternating: bool,
    mut on_lp: F,
) -> Result<LeagueRun> {
    cfg.validate()?;
    let rules = Rules::new(cfg.game.clone())?;
    let cg = if cfg.tree_budget > 0 {
        match to_game_tree(&cfg.game, cfg.tree_budget) {
            Ok(t) => Some(t),
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut learner = TabularPolicy::new(rules.layout.size());
    let mut league = LeagueState::new(cfg.gate)?;
    let mut stage = Stage::Bt;
    let mut log = Vec::with_capacity(cfg.n_lp);
    for lp in 0..cfg.n_lp {
        league.begin_lp();
        let frozen = alternating.then_some(match stage {
            Stage::Bt => Stage::Cb,
            Stage::Cb => Stage::Bt,
        });
        let mut remaining = cfg.samples_per_lp;
        while remaining > 0 {
            let wave = remaining.min(cfg.pg.batch);
            remaining -= wave;
            let batch = play_wave(&rules, &learner, &league, wave, cfg.tau, &mut rng)?;
            for t in &batch.trajectories {
                if let Some(i) = t.opponent {
                    let side = if t.learner[0] { Player::P1 } else { Player::P2 };
                    league.record_result(i, (side.sign() * t.reward) as i8)?;
                }
            }
            reinforce_update(&mut learner, &batch, &cfg.pg, cfg.entropy_weight, frozen);
        }
        let mean_winrate = league.mean_winrate();
        let snapshot = league.gate(|| learner.clone());
        let trained = alternating.then_some(stage);
        if snapshot && alternating {
            stage = match stage {
                Stage::Bt => Stage::Cb,
                Stage::Cb => Stage::Bt,
            };
        }
        let learner_exploitability = match &cg {
            Some(cg) => Some(policy_exploitability(cg, &learner, cfg.tau)?),
            None => None,
        };
        let row = LeagueLogRow {
            lp,
            len_h: league.history.len(),
            count: league.count,
            learner_exploitability,
            mean_winrate,
            stage: trained,
            snapshot,
        };
        on_lp(&row, &learner);
        log.push(row);
    }
    Ok(LeagueRun { log, learner, league })
}

/// Plays one wave of games. Opponents, seats and seeds are drawn serially so
/// the wave is independent of thread scheduling.
fn play_wave(
    rules: &Arc<Rules>,
    learner: &TabularPolicy,
    league: &LeagueState<TabularPolicy>,
    n: usize,
    tau: f64,
    rng: &mut ChaCha8Rng,
) -> Result<RolloutBatch> {
    let jobs: Vec<(Opponent, Player, u64)> = (0..n)
        .map(|_| {
            let opp = league.select_opponent(rng);
            let side = if rng.random::<bool>() { Player::P1 } else { Player::P2 };
            (opp, side, rng.random())
        })
        .collect();
    let trajectories = jobs
        .par_iter()
        .map(|&(opp, side, seed)| {
            let other = match opp {
                Opponent::SelfPlay => learner,
                Opponent::Historical(i) => &league.history[i],
            };
            let seats = match side {
                Player::P1 => [learner, other],
                Player::P2 => [other, learner],
            };
            let (steps, reward) = play_policies(rules, seats, tau, seed)?;
            let learner_seats = match opp {
                Opponent::SelfPlay => [true, true],
                Opponent::Historical(_) => [side == Player::P1, side == Player::P2],
            };
            Ok(Trajectory {
                steps,
                reward,
                learner: learner_seats,
                opponent: match opp {
                    Opponent::SelfPlay => None,
                    Opponent::Historical(i) => Some(i),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RolloutBatch { trajectories })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub n: usize,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
    /// `(wins + draws / 2) / n` for the first policy.
    pub winrate: f64,
}

/// Head-to-head record of `pa` against `pb` over `n` games; each game
/// assigns `pa` a uniformly random seat and a fresh deal.
pub fn evaluate(
    pa: &TabularPolicy,
    pb: &TabularPolicy,
    config: &GameConfig,
    n: usize,
    tau: f64,
    seed: u64,
) -> Result<EvalResult> {
    if n == 0 {
        return Err(Error::Config("need at least one match".into()));
    }
    let rules = Rules::new(config.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(bool, u64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let scores = jobs
        .par_iter()
        .map(|&(a_first, s)| {
            let seats = if a_first { [pa, pb] } else { [pb, pa] };
            let (_, r) = play_policies(&rules, seats, tau, s)?;
            Ok(if a_first { r } else { -r })
        })
        .collect::<Result<Vec<f64>>>()?;
    let wins = scores.iter().filter(|&&r| r > 0.0).count();
    let losses = scores.iter().filter(|&&r| r < 0.0).count();
    let draws = n - wins - losses;
    Ok(EvalResult {
        n,
        wins,
        draws,
        losses,
        winrate: (wins as f64 + 0.5 * draws as f64) / n as f64,
    })
}
