use std::fs;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use osfp_core::cardgame::{to_game_tree, CardGameState, CardSet, Replay, Rules};
use osfp_core::efg::fixtures::{kuhn_poker, matching_pennies};
use osfp_core::efg::{solve_efg as run_efg, write_efg_trace_csv, GameTree, Player};
use osfp_core::league::{
    evaluate, run_alternating_with, run_league_with, write_league_csv, GateParams, LeagueConfig,
};
use osfp_core::mcts::{playout_value, MctsParams, RolloutMixActor, RolloutMixParams};
use osfp_core::ngame::{JointPolicy, MatrixGame, SimplexPolicy};
use osfp_core::policy::{play_episode, Actor, PgConfig, PolicyActor, TabularPolicy};
use osfp_core::solvers::{solve_from, write_trace_csv, Method};
use osfp_core::Error;

use crate::args::{
    EfgFixture, EvalArgs, GenGameArgs, MatrixPreset, MctsPlayArgs, Searcher, SolveEfgArgs,
    SolveMatrixArgs, TrainArgs,
};
use crate::io::{game_config, json, policy, read_input, usage, write_output};

/// Config and contract errors from the core come from bad user input.
fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::DimensionMismatch(_) => usage(e.to_string()),
        other => other.into(),
    }
}

fn start(v: Option<Vec<f64>>, n: usize, who: &str) -> Result<SimplexPolicy> {
    match v {
        None => Ok(SimplexPolicy::uniform(n)),
        Some(p) if p.len() != n => Err(usage(format!("{who} has {} entries, expected {n}", p.len()))),
        Some(p) => SimplexPolicy::new(p).map_err(|e| usage(format!("{who}: {e}"))),
    }
}

pub fn solve_matrix(a: SolveMatrixArgs) -> Result<()> {
    let game = match (&a.game, a.preset) {
        (Some(path), _) => MatrixGame::parse(&read_input(path)?).map_err(classify)?,
        (None, MatrixPreset::Rps) => MatrixGame::rock_paper_scissors(),
        (None, MatrixPreset::Pennies) => MatrixGame::matching_pennies(),
    };
    let z1 = JointPolicy::new(
        start(a.x0, game.n_rows(), "--x0")?,
        start(a.y0, game.n_cols(), "--y0")?,
    );
    let rows = solve_from(&game, a.method, a.eta, a.iters, z1).map_err(classify)?;
    let mut csv = Vec::new();
    write_trace_csv(&rows, &mut csv)?;
    write_output(a.out.as_ref(), &csv)?;
    let last = rows.last().expect("at least one row");
    eprintln!(
        "{} on {}x{}: k={} gap_actual={:.3e} gap_average={:.3e}",
        a.method,
        game.n_rows(),
        game.n_cols(),
        last.k,
        last.gap_actual,
        last.gap_average
    );
    Ok(())
}

#[derive(Serialize)]
struct StrategyFile<'a> {
    method: String,
    k: usize,
    actual: [&'a [f64]; 2],
    average: [&'a [f64]; 2],
}

pub fn solve_efg(a: SolveEfgArgs) -> Result<()> {
    if a.method == Method::Omd {
        return Err(usage("solve-efg supports sfp and osfp; osfp produces the OMD iterates"));
    }
    let gt: GameTree = match (&a.efg, a.fixture) {
        (Some(path), _) => GameTree::parse(&read_input(path)?).map_err(classify)?,
        (None, Some(EfgFixture::Kuhn)) => kuhn_poker(),
        (None, Some(EfgFixture::Pennies)) => matching_pennies(),
        (None, None) => to_game_tree(&game_config(&a.game)?, a.budget)?.tree,
    };
    let (rows, st) = run_efg(&gt, a.method, a.eta, a.iters).map_err(classify)?;
    let mut csv = Vec::new();
    write_efg_trace_csv(&rows, &mut csv)?;
    write_output(a.out.as_ref(), &csv)?;
    if let Some(path) = &a.strategy_out {
        let file = StrategyFile {
            method: a.method.to_string(),
            k: st.k,
            actual: [&st.z[0].x, &st.z[1].x],
            average: [&st.z_bar[0].x, &st.z_bar[1].x],
        };
        write_output(Some(path), &json(&file)?)?;
    }
    let last = rows.last().expect("at least one row");
    eprintln!(
        "{} on {} nodes: k={} exploitability_actual={:.3e} exploitability_average={:.3e} value={:.6}",
        a.method,
        gt.len(),
        last.k,
        last.exploitability_actual,
        last.exploitability_average,
        last.value
    );
    Ok(())
}

#[derive(Serialize)]
struct GenSummary {
    pool_size: usize,
    action_size: usize,
    budget: usize,
    /// `None` when the game exceeds the budget.
    tree: Option<TreeSummary>,
}

#[derive(Serialize)]
struct TreeSummary {
    nodes: usize,
    terminals: usize,
    chance_nodes: usize,
    infosets: [usize; 2],
    sequences: [usize; 2],
}

pub fn gen_game(a: GenGameArgs) -> Result<()> {
    let config = game_config(&a.game)?;
    let cards = CardSet::generate(&config);
    let rules = Rules::new(config.clone())?;
    if let Some(p) = &a.pool_out {
        write_output(Some(p), cards.to_text().as_bytes())?;
    }
    if let Some(p) = &a.config_out {
        write_output(Some(p), config.to_text().as_bytes())?;
    }
    let tree = match to_game_tree(&config, a.budget) {
        Ok(cg) => Some(cg.tree),
        Err(Error::BudgetExceeded { .. }) if a.efg_out.is_none() => None,
        Err(e) => return Err(e.into()),
    };
    if let (Some(p), Some(t)) = (&a.efg_out, &tree) {
        write_output(Some(p), t.to_text().as_bytes())?;
    }
    let summary = GenSummary {
        pool_size: cards.pool.len(),
        action_size: rules.layout.size(),
        budget: a.budget,
        tree: tree.as_ref().map(|t| TreeSummary {
            nodes: t.len(),
            terminals: t.count_terminals(),
            chance_nodes: t.count_chance_nodes(),
            infosets: Player::BOTH.map(|p| t.treeplex(p).n_infosets()),
            sequences: Player::BOTH.map(|p| t.treeplex(p).n_seqs()),
        }),
    };
    write_output(a.out.as_ref(), &json(&summary)?)?;
    match &summary.tree {
        Some(t) => eprintln!("{} nodes, {} terminals", t.nodes, t.terminals),
        None => eprintln!("game exceeds the node budget of {}; no tree written", a.budget),
    }
    Ok(())
}

fn league_config(a: &TrainArgs) -> Result<LeagueConfig> {
    if let Some(path) = &a.league_config {
        let cfg: LeagueConfig = serde_json::from_str(&read_input(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(cfg);
    }
    Ok(LeagueConfig {
        game: game_config(&a.game)?,
        n_lp: a.n_lp,
        samples_per_lp: a.samples_per_lp,
        gate: GateParams {
            p: a.p,
            xi: a.xi,
            c: a.c,
            f: a.opponent_rule,
        },
        pg: PgConfig {
            lr: a.lr,
            batch: a.batch,
            discount: a.discount,
        },
        entropy_weight: a.entropy_weight,
        tau: a.tau,
        seed: a.seed,
        tree_budget: a.budget,
    })
}

#[derive(Serialize)]
struct TrainSummary {
    n_lp: usize,
    snapshots: usize,
    final_exploitability: Option<f64>,
    final_mean_winrate: Option<f64>,
}

pub fn train(a: TrainArgs, alternating: bool) -> Result<()> {
    let cfg = league_config(&a)?;
    cfg.validate().map_err(classify)?;
    let dir = &a.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.json"), json(&cfg)?)?;
    let mut io_err = None;
    let mut snapshots = 0usize;
    let on_lp = |row: &osfp_core::league::LeagueLogRow, learner: &TabularPolicy| {
        if row.snapshot && io_err.is_none() {
            let path = dir.join(format!("snapshot_{snapshots:03}.policy"));
            if let Err(e) = fs::write(&path, learner.to_text()) {
                io_err = Some(anyhow::Error::from(e).context(format!("writing {}", path.display())));
            }
            snapshots += 1;
        }
        eprintln!(
            "lp {:>3}  len_H {:>3}  count {}  exploitability {}",
            row.lp,
            row.len_h,
            row.count,
            row.learner_exploitability.map_or("-".into(), |v| format!("{v:.4}"))
        );
    };
    let run = if alternating {
        run_alternating_with(&cfg, on_lp)
    } else {
        run_league_with(&cfg, on_lp)
    }
    .map_err(classify)?;
    if let Some(e) = io_err {
        return Err(e);
    }
    let mut csv = Vec::new();
    write_league_csv(&run.log, &mut csv)?;
    fs::write(dir.join("log.csv"), csv)?;
    fs::write(dir.join("learner.policy"), run.learner.to_text())?;
    let last = run.log.last();
    let summary = TrainSummary {
        n_lp: run.log.len(),
        snapshots,
        final_exploitability: last.and_then(|r| r.learner_exploitability),
        final_mean_winrate: last.and_then(|r| r.mean_winrate),
    };
    write_output(None, &json(&summary)?)
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let config = game_config(&a.game)?;
    let pa = policy(&a.a, &config)?;
    let pb = policy(&a.b, &config)?;
    let r = evaluate(&pa, &pb, &config, a.n, a.tau, a.seed).map_err(classify)?;
    write_output(a.out.as_ref(), &json(&r)?)?;
    eprintln!(
        "{} vs {}: {} wins, {} draws, {} losses, winrate {:.4}",
        a.a, a.b, r.wins, r.draws, r.losses, r.winrate
    );
    Ok(())
}

enum Agent<'a, V> {
    Plain(PolicyActor<'a>),
    Search(RolloutMixActor<'a, V>),
}

impl<V> Agent<'_, V> {
    fn searches(&self) -> usize {
        match self {
            Agent::Plain(_) => 0,
            Agent::Search(s) => s.searches,
        }
    }
}

impl<V> Actor for Agent<'_, V>
where
    V: Fn(&CardGameState, Player, &mut ChaCha8Rng) -> f64,
{
    fn choose(&mut self, h: &CardGameState, rng: &mut ChaCha8Rng) -> osfp_core::Result<(usize, f64)> {
        match self {
            Agent::Plain(p) => p.choose(h, rng),
            Agent::Search(s) => s.choose(h, rng),
        }
    }
}

#[derive(Serialize)]
struct MctsSummary {
    games: usize,
    wins: usize,
    draws: usize,
    losses: usize,
    /// For agent `a`, draws counting half.
    winrate: f64,
    searches: usize,
    mcts: MctsParams,
    rollout_mix: RolloutMixParams,
}

pub fn mcts_play(a: MctsPlayArgs) -> Result<()> {
    if a.games == 0 {
        bail!(usage("--games must be positive"));
    }
    let config = game_config(&a.game)?;
    let rules = Rules::new(config.clone())?;
    let pols = [policy(&a.a, &config)?, policy(&a.b, &config)?];
    let mcts = MctsParams {
        n: a.n,
        c: a.c,
        tau: a.prior_tau,
        alpha: a.alpha,
        p_mix: a.p_mix,
    };
    mcts.validate().map_err(classify)?;
    let mix = RolloutMixParams {
        p_expand: a.p_expand,
        n_expand: a.n_expand.unwrap_or(a.n),
        m_successive: a.m_successive,
    };
    mix.validate().map_err(classify)?;
    let searching = match a.search {
        Searcher::A => [true, false],
        Searcher::B => [false, true],
        Searcher::Both => [true, true],
        Searcher::None => [false, false],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut wins, mut draws, mut losses, mut searches) = (0, 0, 0, 0);
    for g in 0..a.games {
        let deal_seed: u64 = rng.random();
        // Agent `a` sits first in even games.
        let seat_of_agent = if g % 2 == 0 { [0, 1] } else { [1, 0] };
        let mut agents = Vec::with_capacity(2);
        for (i, p) in pols.iter().enumerate() {
            agents.push(if searching[i] {
                Agent::Search(RolloutMixActor::new(p, playout_value(p), mix, mcts).map_err(classify)?)
            } else {
                Agent::Plain(PolicyActor { policy: p, tau: a.tau })
            });
        }
        let [agent_a, agent_b] = &mut agents[..] else {
            unreachable!()
        };
        let seats: [&mut dyn Actor; 2] = if seat_of_agent[0] == 0 {
            [agent_a, agent_b]
        } else {
            [agent_b, agent_a]
        };
        let (steps, r) = play_episode(&rules, deal_seed, seats, &mut rng)?;
        searches += agents.iter().map(Agent::searches).sum::<usize>();
        let r_a = if seat_of_agent[0] == 0 { r } else { -r };
        match r_a.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => wins += 1,
            Some(std::cmp::Ordering::Less) => losses += 1,
            _ => draws += 1,
        }
        if g == 0 {
            if let Some(p) = &a.replay_out {
                let replay = Replay {
                    config: config.clone(),
                    deal_seed,
                    actions: steps.iter().map(|s| s.action).collect(),
                };
                write_output(Some(p), replay.to_text().as_bytes())?;
            }
        }
    }
    let summary = MctsSummary {
        games: a.games,
        wins,
        draws,
        losses,
        winrate: (wins as f64 + 0.5 * draws as f64) / a.games as f64,
        searches,
        mcts,
        rollout_mix: mix,
    };
    write_output(a.out.as_ref(), &json(&summary)?)?;
    eprintln!("agent a: {wins} wins, {draws} draws, {losses} losses over {} games", a.games);
    Ok(())
}
