use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use osfp_core::cardgame::{to_game_tree, GameConfig};
use osfp_core::efg::fixtures::{kuhn_poker, random_tree, RandomTreeParams};
use osfp_core::efg::{exact_br, exploitability_efg, solve_efg, GameTree, Player, SequencePolicy};
use osfp_core::ngame::{duality_gap, JointPolicy, MatrixGame, SimplexPolicy};
use osfp_core::solvers::Method;
use osfp_oracle::enumerate::{expected_return, normal_form, pure_strategies, sequence_form_value, sequence_from_behavioral};
use osfp_oracle::lp::solve_matrix;

fn random_policy(rng: &mut ChaCha8Rng, gt: &GameTree, p: Player) -> SequencePolicy {
    let tp = gt.treeplex(p);
    let probs: Vec<Vec<f64>> = tp
        .infosets()
        .iter()
        .map(|s| {
            let w: Vec<f64> = (0..s.n_actions).map(|_| rng.random_range(0.01..1.0)).collect();
            let t: f64 = w.iter().sum();
            w.iter().map(|v| v / t).collect()
        })
        .collect();
    SequencePolicy::new(tp, sequence_from_behavioral(tp, &probs)).unwrap()
}

fn pure_policy(gt: &GameTree, p: Player, pure: &[usize]) -> SequencePolicy {
    let tp = gt.treeplex(p);
    let probs: Vec<Vec<f64>> = tp
        .infosets()
        .iter()
        .zip(pure)
        .map(|(s, &a)| (0..s.n_actions).map(|b| f64::from(u8::from(a == b))).collect())
        .collect();
    SequencePolicy::new(tp, sequence_from_behavioral(tp, &probs)).unwrap()
}

/// Best own return of `player` against `opp`, by trying every pure strategy.
fn br_by_enumeration(gt: &GameTree, opp: &SequencePolicy, player: Player) -> f64 {
    pure_strategies(gt.treeplex(player))
        .iter()
        .map(|s| {
            let me = pure_policy(gt, player, s);
            let r = match player {
                Player::P1 => expected_return(gt, &me, opp),
                Player::P2 => expected_return(gt, opp, &me),
            };
            player.sign() * r
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn exact_br_matches_pure_strategy_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut trees = vec![kuhn_poker(), to_game_tree(&GameConfig::tiny(), 10_000).unwrap().tree];
    while trees.len() < 12 {
        let gt = random_tree(&mut rng, &RandomTreeParams::default());
        let small = Player::BOTH.iter().all(|&p| pure_strategies(gt.treeplex(p)).len() <= 512);
        if small {
            trees.push(gt);
        }
    }
    for gt in &trees {
        for player in Player::BOTH {
            let opp = random_policy(&mut rng, gt, player.opponent());
            let (_, v) = exact_br(gt, &opp, player).unwrap();
            let want = br_by_enumeration(gt, &opp, player);
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
    }
}

#[test]
fn osfp_reaches_the_kuhn_value() {
    let gt = kuhn_poker();
    let (rows, st) = solve_efg(&gt, Method::Osfp, 1.0, 3000).unwrap();
    let last = rows.last().unwrap();
    let v = sequence_form_value(&gt);
    assert!((v + 1.0 / 18.0).abs() < 1e-9);
    assert!(last.exploitability_actual < 1e-4, "{}", last.exploitability_actual);
    assert!((last.value - v).abs() < 1e-4);
    assert!(exploitability_efg(&gt, &st.z[0], &st.z[1]).unwrap() < 1e-4);
}

#[test]
fn normal_form_of_card_tiny_has_value_zero_and_solver_agrees() {
    let gt = to_game_tree(&GameConfig::tiny(), 10_000).unwrap().tree;
    let nf = normal_form(&gt);
    let (_, _, v) = solve_matrix(&nf);
    assert!((v - sequence_form_value(&gt)).abs() < 1e-9);
    // The core matrix solver on the flattened matrix, with u = −R.
    let rows = nf.len();
    let cols = nf[0].len();
    let loss: Vec<f64> = nf.iter().flatten().map(|r| -r).collect();
    let game = MatrixGame::new(rows, cols, loss).unwrap();
    let trace = osfp_core::solvers::solve(&game, Method::Osfp, 1.0, 3000).unwrap();
    assert!(trace.last().unwrap().gap_actual < 1e-6);
}

#[test]
fn lp_equilibria_have_zero_duality_gap_in_core() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let (m, n) = (rng.random_range(2..6), rng.random_range(2..6));
        let a: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let game = MatrixGame::new(m, n, a.clone()).unwrap();
        // Player 1 receives −u.
        let b: Vec<Vec<f64>> = a.chunks(n).map(|r| r.iter().map(|v| -v).collect()).collect();
        let (x, y, _) = solve_matrix(&b);
        let clip = |v: Vec<f64>| {
            let w: Vec<f64> = v.iter().map(|p| p.max(0.0)).collect();
            let t: f64 = w.iter().sum();
            SimplexPolicy::new(w.iter().map(|p| p / t).collect()).unwrap()
        };
        let z = JointPolicy::new(clip(x), clip(y));
        assert!(duality_gap(&game, &z).unwrap() < 1e-9);
    }
}
