use osfp_core::efg::Player;
use osfp_core::mcts::SearchGame;

/// Exact value for `player` by full enumeration: `player` maximizes, the
/// other player minimizes.
pub fn minimax_value<G: SearchGame>(h: &G, player: Player) -> f64 {
    match h.to_move() {
        None => h.reward(player).unwrap(),
        Some(who) => {
            let vals = h.legal().into_iter().map(|a| {
                let mut c = h.clone();
                c.play(a).unwrap();
                minimax_value(&c, player)
            });
            if who == player {
                vals.fold(f64::NEG_INFINITY, f64::max)
            } else {
                vals.fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Actions at the root that attain the minimax value.
pub fn minimax_actions<G: SearchGame>(h: &G) -> Vec<usize> {
    let player = h.to_move().expect("decision state");
    let vals: Vec<(usize, f64)> = h
        .legal()
        .into_iter()
        .map(|a| {
            let mut c = h.clone();
            c.play(a).unwrap();
            (a, minimax_value(&c, player))
        })
        .collect();
    let best = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    vals.into_iter().filter(|v| v.1 == best).map(|v| v.0).collect()
}
