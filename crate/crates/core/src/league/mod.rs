//! Self-play league training: a learner trains against itself and frozen
//! snapshots of itself, and is snapshotted once it beats every snapshot by
//! the gate margin or after too many periods without progress.

mod state;
mod train;

pub use state::{gate_predicate, GateParams, LeagueState, MatchResult, Opponent, OpponentRule};
pub use train::{
    evaluate, policy_exploitability, run_alternating, run_alternating_with, run_league,
    run_league_with, write_league_csv, EvalResult,
    LeagueConfig, LeagueLogRow, LeagueRun,
};

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::cardgame::{GameConfig, Stage};
    use crate::policy::{PgConfig, TabularPolicy};

    fn state(n: usize, params: GateParams) -> LeagueState<()> {
        let mut ls = LeagueState::new(params).unwrap();
        ls.history = vec![(); n];
        ls.begin_lp();
        ls
    }

    #[test]
    fn empty_history_always_self_plays() {
        let ls = state(0, GateParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..1000).all(|_| ls.select_opponent(&mut rng) == Opponent::SelfPlay));
    }

    #[test]
    fn opponent_frequencies() {
        let n = 100_000;
        for (rule, weights) in [
            (OpponentRule::Uniform, [1.0 / 3.0; 3]),
            (OpponentRule::Recency, [0.25, 0.25, 0.5]),
        ] {
            let ls = state(3, GateParams { f: rule, ..GateParams::default() });
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut selfs = 0usize;
            let mut hist = [0usize; 3];
            for _ in 0..n {
                match ls.select_opponent(&mut rng) {
                    Opponent::SelfPlay => selfs += 1,
                    Opponent::Historical(i) => hist[i] += 1,
                }
            }
            let p = 0.6;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((selfs as f64 / n as f64 - p).abs() < 3.0 * sigma);
            let m = n - selfs;
            for (c, w) in hist.iter().zip(weights) {
                let sigma = (w * (1.0 - w) / m as f64).sqrt();
                assert!((*c as f64 / m as f64 - w).abs() < 3.0 * sigma, "{rule} {hist:?}");
            }
        }
    }

    #[test]
    fn record_result_accumulates() {
        let mut ls = state(2, GateParams::default());
        ls.record_result(1, 1).unwrap();
        ls.record_result(1, -1).unwrap();
        assert_eq!((ls.g[1], ls.c[1]), (0, 2));
        for _ in 0..100 {
            ls.record_result(0, 1).unwrap();
        }
        assert_eq!(ls.g[0] as f64 / ls.c[0] as f64, 1.0);
        assert!(ls.record_result(2, 1).is_err());
        assert!(ls.record_result(0, 2).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let i = rng.random_range(0..2);
            ls.record_result(i, rng.random_range(-1..=1)).unwrap();
            assert!(ls.g.iter().zip(&ls.c).all(|(g, c)| g.unsigned_abs() <= *c));
        }
    }

    #[test]
    fn gate_examples() {
        let params = GateParams::default();
        let mut ls = state(3, params);
        ls.g = vec![8, 80, 4];
        ls.c = vec![10, 100, 5];
        assert!(ls.gate(|| ()));
        assert_eq!((ls.history.len(), ls.count), (4, 0));

        let mut ls = state(2, params);
        ls.count = 7;
        ls.g = vec![-5, 0];
        ls.c = vec![10, 10];
        assert!(ls.gate(|| ()));

        let mut ls = state(2, params);
        ls.count = 3;
        ls.g = vec![9, 5];
        ls.c = vec![10, 10];
        assert!(!ls.gate(|| ()));
        assert_eq!((ls.history.len(), ls.count), (2, 4));

        // Untested opponents cannot be certified.
        let mut ls = state(2, params);
        ls.g = vec![10, 0];
        ls.c = vec![10, 0];
        assert!(!ls.gate(|| ()));
    }

    #[test]
    fn gate_matches_direct_predicate_on_fuzzed_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let params = GateParams::default();
        for _ in 0..10_000 {
            let n = rng.random_range(0..6);
            let mut ls = state(n, params);
            for i in 0..n {
                ls.c[i] = rng.random_range(0..20);
                ls.g[i] = if ls.c[i] == 0 { 0 } else { rng.random_range(-(ls.c[i] as i64)..=ls.c[i] as i64) };
            }
            ls.count = rng.random_range(0..=params.c + 1);
            let mut expect = true;
            for i in 0..n {
                if ls.c[i] == 0 || (ls.g[i] as f64) <= params.xi * ls.c[i] as f64 {
                    expect = false;
                }
            }
            expect |= ls.count > params.c;
            let count = ls.count;
            assert_eq!(ls.gate(|| ()), expect);
            assert_eq!(ls.history.len(), n + expect as usize);
            assert_eq!(ls.count, if expect { 0 } else { count + 1 });
        }
    }

    fn tiny_cfg() -> LeagueConfig {
        LeagueConfig {
            game: GameConfig::tiny(),
            n_lp: 6,
            samples_per_lp: 2000,
            ..LeagueConfig::default()
        }
    }

    #[test]
    fn frozen_learner_snapshots_on_the_count_cap_only() {
        let cfg = LeagueConfig {
            n_lp: 20,
            gate: GateParams { c: 3, ..GateParams::default() },
            pg: PgConfig { lr: 0.0, ..PgConfig::default() },
            ..tiny_cfg()
        };
        let run = run_league(&cfg).unwrap();
        let snaps: Vec<usize> = run.log.iter().filter(|r| r.snapshot).map(|r| r.lp).collect();
        // The first period has no snapshots to beat; afterwards the cap
        // fires once `count` reaches c + 1.
        assert_eq!(snaps, vec![0, 5, 10, 15]);
        for h in &run.league.history {
            for stage in [Stage::Cb, Stage::Bt] {
                assert!(h.block(stage).values().flatten().all(|&l| l == 0.0));
            }
        }
    }

    #[test]
    fn history_grows_by_at_most_one_per_period() {
        let run = run_league(&tiny_cfg()).unwrap();
        let mut prev = 0;
        for r in &run.log {
            assert!(r.len_h == prev || r.len_h == prev + 1);
            prev = r.len_h;
        }
    }

    #[test]
    fn near_certain_self_play_never_touches_scores() {
        let cfg = LeagueConfig {
            gate: GateParams { p: 1.0 - 1e-12, ..GateParams::default() },
            ..tiny_cfg()
        };
        let run = run_league(&cfg).unwrap();
        assert!(run.log.iter().all(|r| r.mean_winrate.is_none()));
        assert!(run.league.c.iter().all(|&c| c == 0));
    }

    #[test]
    fn runs_are_reproducible() {
        let a = run_league(&tiny_cfg()).unwrap();
        let b = run_league(&tiny_cfg()).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.learner, b.learner);
        let c = run_league(&LeagueConfig { seed: 1, ..tiny_cfg() }).unwrap();
        assert_ne!(a.learner, c.learner);
    }

    #[test]
    fn alternating_freezes_the_inactive_block() {
        let cfg = LeagueConfig {
            n_lp: 12,
            gate: GateParams { c: 2, ..GateParams::default() },
            ..tiny_cfg()
        };
        let mut prev = TabularPolicy::new(0);
        let mut stages = Vec::new();
        let run = run_alternating_with(&cfg, |row, learner| {
            let stage = row.stage.unwrap();
            let frozen = if stage == Stage::Bt { Stage::Cb } else { Stage::Bt };
            assert_eq!(learner.block(frozen), prev.block(frozen), "lp {}", row.lp);
            assert_ne!(learner.block(stage), prev.block(stage));
            if stages.last() != Some(&stage) {
                stages.push(stage);
            }
            prev = learner.clone();
        })
        .unwrap();
        assert!(run.log.iter().filter(|r| r.snapshot).count() >= 2);
        assert_eq!(&stages[..3], &[Stage::Bt, Stage::Cb, Stage::Bt]);
    }

    #[test]
    fn evaluation_is_symmetric_for_equal_policies() {
        let p = TabularPolicy::new(crate::cardgame::Rules::new(GameConfig::small()).unwrap().layout.size());
        let n = 2500;
        let r = evaluate(&p, &p, &GameConfig::small(), n, 1.0, 3).unwrap();
        assert_eq!(r.wins + r.draws + r.losses, n);
        let sigma = 0.5 / (n as f64).sqrt();
        assert!((r.winrate - 0.5).abs() < 3.0 * sigma, "{r:?}");
        assert_eq!(r, evaluate(&p, &p, &GameConfig::small(), n, 1.0, 3).unwrap());
    }

    #[test]
    fn csv_leaves_missing_values_empty() {
        let rows = vec![LeagueLogRow {
            lp: 0,
            len_h: 1,
            count: 0,
            learner_exploitability: Some(0.5),
            mean_winrate: None,
            stage: None,
            snapshot: true,
        }];
        let mut out = Vec::new();
        write_league_csv(&rows, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "lp,len_H,count,learner_exploitability,mean_winrate\n0,1,0,0.5,\n"
        );
    }
}
