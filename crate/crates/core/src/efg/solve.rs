use std::io::Write;

use serde::{Deserialize, Serialize};

use super::smoothing::sbr_treeplex;
use super::tree::{GameTree, Player};
use super::treeplex::{uniform_sequence, SequencePolicy};
use super::values::{expected_return, exploitability_efg, reward_vector};
use crate::error::{Error, Result};
use crate::solvers::Method;

/// Payoff vector of `player` against a fixed opponent: the negated linear
/// part of the player's own return, so that lower is better.
pub fn treeplex_payoff_vector(gt: &GameTree, opponent: &SequencePolicy, player: Player) -> Vec<f64> {
    let (r, _) = reward_vector(gt, opponent, player);
    r.into_iter().map(|v| -v).collect()
}

/// Fictitious-play state on a pair of treeplexes; mirrors
/// [`crate::solvers::SolverState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfgSolverState {
    pub k: usize,
    pub z: [SequencePolicy; 2],
    pub z_bar: [SequencePolicy; 2],
    pub f_tilde: [Vec<f64>; 2],
    pub f_prev: [Vec<f64>; 2],
    pub eta: f64,
}

impl EfgSolverState {
    pub fn new(gt: &GameTree, x: SequencePolicy, y: SequencePolicy, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::ContractViolation(format!("eta must be > 0, got {eta}")));
        }
        x.validate(gt.treeplex(Player::P1))?;
        y.validate(gt.treeplex(Player::P2))?;
        let f = payoff_pair(gt, &x, &y);
        Ok(Self {
            k: 1,
            z_bar: [x.clone(), y.clone()],
            z: [x, y],
            f_tilde: f.clone(),
            f_prev: f,
            eta,
        })
    }

    pub fn uniform(gt: &GameTree, eta: f64) -> Result<Self> {
        Self::new(
            gt,
            uniform_sequence(gt.treeplex(Player::P1)),
            uniform_sequence(gt.treeplex(Player::P2)),
            eta,
        )
    }

    /// Moves to `z_{k+1} = SBR(η (F̃_k + ω F_k))` on each treeplex.
    pub fn step(&self, gt: &GameTree, omega: f64) -> Result<Self> {
        let mu = 1.0 / self.eta;
        let mut next = Vec::with_capacity(2);
        for p in Player::BOTH {
            let i = p.index();
            let g: Vec<f64> = self.f_tilde[i]
                .iter()
                .zip(&self.f_prev[i])
                .map(|(a, b)| a + omega * b)
                .collect();
            next.push(sbr_treeplex(gt.treeplex(p), &g, mu)?);
        }
        let y = next.pop().expect("two players");
        let x = next.pop().expect("two players");
        let f = payoff_pair(gt, &x, &y);
        let k = self.k + 1;
        let w = 1.0 / k as f64;
        let mut f_tilde = self.f_tilde.clone();
        for (acc, v) in f_tilde.iter_mut().zip(&f) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        Ok(Self {
            k,
            z_bar: [self.z_bar[0].lerp(&x, w), self.z_bar[1].lerp(&y, w)],
            z: [x, y],
            f_tilde,
            f_prev: f,
            eta: self.eta,
        })
    }
}

fn payoff_pair(gt: &GameTree, x: &SequencePolicy, y: &SequencePolicy) -> [Vec<f64>; 2] {
    [
        treeplex_payoff_vector(gt, y, Player::P1),
        treeplex_payoff_vector(gt, x, Player::P2),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfgTraceRow {
    pub k: usize,
    pub exploitability_actual: f64,
    pub exploitability_average: f64,
    /// Player-1 return of the actual iterate.
    pub value: f64,
}

/// Runs SFP or OSFP with exact treeplex smooth best responses from the
/// uniform start. Returns the trace and the final state.
pub fn solve_efg(
    gt: &GameTree,
    method: Method,
    eta: f64,
    iters: usize,
) -> Result<(Vec<EfgTraceRow>, EfgSolverState)> {
    let omega = match method {
        Method::Sfp => 0.0,
        Method::Osfp => 1.0,
        Method::Omd => {
            return Err(Error::Config(
                "omd is only available for matrix games; use osfp, which produces the same iterates"
                    .into(),
            ))
        }
    };
    if iters == 0 {
        return Err(Error::ContractViolation("iters must be >= 1".into()));
    }
    let mut st = EfgSolverState::uniform(gt, eta)?;
    let mut rows = Vec::with_capacity(iters);
    loop {
        rows.push(EfgTraceRow {
            k: st.k,
            exploitability_actual: exploitability_efg(gt, &st.z[0], &st.z[1])?,
            exploitability_average: exploitability_efg(gt, &st.z_bar[0], &st.z_bar[1])?,
            value: expected_return(gt, &st.z[0], &st.z[1])?,
        });
        if st.k == iters {
            break;
        }
        st = st.step(gt, omega)?;
    }
    Ok((rows, st))
}

/// Writes `k,exploitability_actual,exploitability_average,value` rows.
pub fn write_efg_trace_csv<W: Write>(rows: &[EfgTraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,exploitability_actual,exploitability_average,value")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.k, r.exploitability_actual, r.exploitability_average, r.value
        )?;
    }
    Ok(())
}
