//! Smooth best responses and the three iterative normal-form solvers:
//! smooth fictitious play (SFP), its optimistic variant (OSFP) and
//! optimistic mirror descent (OMD).
//!
//! Both players are minimizers of their own block of the payoff vector (see
//! [`crate::ngame`]). With the negative-entropy regularizer the smooth best
//! response has the closed form `softmax(−η F)` per block, and OMD reduces to
//! multiplicative weights. Started from the uniform point with `F₀ = 0`, the
//! OSFP and OMD iterate sequences coincide.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngame::{self, JointPolicy, MatrixGame, PayoffVector, SimplexPolicy};
use crate::numeric::{neg_entropy, softmax, softmax_neg};

pub const DEFAULT_ETA: f64 = 0.1;

/// Negative entropy `ψ(x) = Σ xᵢ log xᵢ` on the simplex.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyRegularizer;

impl EntropyRegularizer {
    pub fn value(&self, x: &[f64]) -> f64 {
        neg_entropy(x)
    }

    /// `∇ψ(x)ᵢ = 1 + log xᵢ`.
    pub fn mirror_map(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 1.0 + v.ln()).collect()
    }

    /// Inverse mirror map restricted to the simplex: the additive constant
    /// is absorbed by normalization, leaving `softmax(−g)`.
    pub fn inverse_mirror_map(&self, g: &[f64]) -> Vec<f64> {
        softmax_neg(g, 1.0)
    }

    /// Bregman divergence `D_ψ(z, z') = ψ(z) − ψ(z') − ⟨∇ψ(z'), z − z'⟩`.
    pub fn bregman(&self, z: &[f64], z_prime: &[f64]) -> f64 {
        let grad = self.mirror_map(z_prime);
        let lin: f64 = grad
            .iter()
            .zip(z.iter().zip(z_prime))
            .map(|(g, (a, b))| g * (a - b))
            .sum();
        self.value(z) - self.value(z_prime) - lin
    }
}

/// Smooth best response `argmin_z η⟨F, z⟩ + ψ(z)`, one softmax per block.
pub fn sbr(f: &PayoffVector, eta: f64) -> Result<JointPolicy> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::ContractViolation(format!("eta must be > 0, got {eta}")));
    }
    if !f.is_finite() {
        return Err(Error::ContractViolation("payoff vector is not finite".into()));
    }
    Ok(JointPolicy::new(
        SimplexPolicy::new_unchecked(softmax_neg(&f.fx, eta)),
        SimplexPolicy::new_unchecked(softmax_neg(&f.fy, eta)),
    ))
}

/// Fictitious-play solver state at iteration `k`.
///
/// `f_tilde = Σ_{t≤k} F(z_t)` and `z_bar = (1/k) Σ_{t≤k} z_t`; `f_prev` is
/// `F(z_k)`, the term OSFP counts twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub k: usize,
    pub z: JointPolicy,
    pub z_bar: JointPolicy,
    pub f_tilde: PayoffVector,
    pub f_prev: PayoffVector,
    pub eta: f64,
}

impl SolverState {
    pub fn new(game: &MatrixGame, z1: JointPolicy, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::ContractViolation(format!("eta must be > 0, got {eta}")));
        }
        let f1 = ngame::payoff_vector(game, &z1)?;
        Ok(Self {
            k: 1,
            z_bar: z1.clone(),
            z: z1,
            f_tilde: f1.clone(),
            f_prev: f1,
            eta,
        })
    }

    /// Starts at the mirror-map minimum (uniform), which corresponds to `F₀ = 0`.
    pub fn uniform(game: &MatrixGame, eta: f64) -> Result<Self> {
        Self::new(game, JointPolicy::uniform(game), eta)
    }

    fn advance(&self, game: &MatrixGame, z_next: JointPolicy) -> Result<Self> {
        let f_next = ngame::payoff_vector(game, &z_next)?;
        let k = self.k + 1;
        let mut f_tilde = self.f_tilde.clone();
        f_tilde.add_assign(&f_next);
        let z_bar = JointPolicy::new(
            running_mean(&self.z_bar.x, &z_next.x, k),
            running_mean(&self.z_bar.y, &z_next.y, k),
        );
        Ok(Self {
            k,
            z: z_next,
            z_bar,
            f_tilde,
            f_prev: f_next,
            eta: self.eta,
        })
    }
}

fn running_mean(avg: &SimplexPolicy, z: &SimplexPolicy, k: usize) -> SimplexPolicy {
    let w = 1.0 / k as f64;
    SimplexPolicy::new_unchecked(
        avg.probs()
            .iter()
            .zip(z.probs())
            .map(|(a, b)| a + (b - a) * w)
            .collect(),
    )
}

/// SFP / FTRL: `z_{k+1} = SBR(η F̃_k)`.
pub fn sfp_step(state: &SolverState, game: &MatrixGame) -> Result<SolverState> {
    let z_next = sbr(&state.f_tilde, state.eta)?;
    state.advance(game, z_next)
}

/// OSFP: `z_{k+1} = SBR(η (F̃_k + F_k))`.
pub fn osfp_step(state: &SolverState, game: &MatrixGame) -> Result<SolverState> {
    optimistic_step(state, game, 1.0)
}

/// `z_{k+1} = SBR(η (F̃_k + ω F_k))`; `ω = 1` is OSFP.
pub fn optimistic_step(state: &SolverState, game: &MatrixGame, omega: f64) -> Result<SolverState> {
    let arg = state.f_tilde.sum(&state.f_prev.scaled(omega));
    let z_next = sbr(&arg, state.eta)?;
    state.advance(game, z_next)
}

/// OMD with a primary sequence `z_k` and a secondary sequence `ẑ_k`.
///
/// The secondary sequence is kept as log-weights, which is its mirror-map
/// image up to a per-block constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmdState {
    pub k: usize,
    pub z: JointPolicy,
    log_hat_x: Vec<f64>,
    log_hat_y: Vec<f64>,
    pub eta: f64,
}

impl OmdState {
    /// `ẑ₁` at the mirror-map minimum; with `F₀ = 0` this makes `z₁ = ẑ₁`.
    pub fn uniform(game: &MatrixGame, eta: f64) -> Result<Self> {
        Self::from_hat(JointPolicy::uniform(game), eta)
    }

    /// Starts from an arbitrary interior `ẑ₁` (again `z₁ = ẑ₁` since `F₀ = 0`).
    pub fn from_hat(z_hat: JointPolicy, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::ContractViolation(format!("eta must be > 0, got {eta}")));
        }
        let logs = |p: &SimplexPolicy| -> Result<Vec<f64>> {
            if p.probs().iter().any(|v| *v <= 0.0) {
                return Err(Error::ContractViolation(
                    "OMD secondary iterate must be interior".into(),
                ));
            }
            Ok(p.probs().iter().map(|v| v.ln()).collect())
        };
        Ok(Self {
            k: 1,
            log_hat_x: logs(&z_hat.x)?,
            log_hat_y: logs(&z_hat.y)?,
            z: z_hat,
            eta,
        })
    }

    pub fn z_hat(&self) -> JointPolicy {
        JointPolicy::new(
            SimplexPolicy::new_unchecked(softmax(&self.log_hat_x)),
            SimplexPolicy::new_unchecked(softmax(&self.log_hat_y)),
        )
    }
}

/// One OMD step with `F_k = F(z_k)`:
/// `ẑ_{k+1} = argmin η⟨F_k, z⟩ + D_ψ(z, ẑ_k)` then
/// `z_{k+1} = argmin η⟨F_k, z⟩ + D_ψ(z, ẑ_{k+1})`.
pub fn omd_step(state: &OmdState, game: &MatrixGame) -> Result<OmdState> {
    let f = ngame::payoff_vector(game, &state.z)?;
    let eta = state.eta;
    let descend = |logs: &[f64], g: &[f64]| -> Vec<f64> {
        logs.iter().zip(g).map(|(l, gi)| l - eta * gi).collect()
    };
    let log_hat_x = descend(&state.log_hat_x, &f.fx);
    let log_hat_y = descend(&state.log_hat_y, &f.fy);
    let x = softmax(&descend(&log_hat_x, &f.fx));
    let y = softmax(&descend(&log_hat_y, &f.fy));
    Ok(OmdState {
        k: state.k + 1,
        z: JointPolicy::new(SimplexPolicy::new_unchecked(x), SimplexPolicy::new_unchecked(y)),
        log_hat_x,
        log_hat_y,
        eta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sfp,
    Osfp,
    Omd,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sfp" => Ok(Method::Sfp),
            "osfp" => Ok(Method::Osfp),
            "omd" => Ok(Method::Omd),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Sfp => "sfp",
            Method::Osfp => "osfp",
            Method::Omd => "omd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub gap_actual: f64,
    pub gap_average: f64,
}

/// Runs `iters` iterates from the uniform start.
pub fn solve(game: &MatrixGame, method: Method, eta: f64, iters: usize) -> Result<Vec<TraceRow>> {
    solve_from(game, method, eta, iters, JointPolicy::uniform(game))
}

/// Runs `iters` iterates starting from `z1`; row `k` reports the gaps of
/// `z_k` and of the running average `z̄_k`.
pub fn solve_from(
    game: &MatrixGame,
    method: Method,
    eta: f64,
    iters: usize,
    z1: JointPolicy,
) -> Result<Vec<TraceRow>> {
    if iters == 0 {
        return Err(Error::ContractViolation("iters must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(iters);
    match method {
        Method::Sfp | Method::Osfp => {
            let mut st = SolverState::new(game, z1, eta)?;
            loop {
                rows.push(TraceRow {
                    k: st.k,
                    gap_actual: ngame::duality_gap(game, &st.z)?,
                    gap_average: ngame::duality_gap(game, &st.z_bar)?,
                });
                if st.k == iters {
                    break;
                }
                st = match method {
                    Method::Sfp => sfp_step(&st, game)?,
                    _ => osfp_step(&st, game)?,
                };
            }
        }
        Method::Omd => {
            let mut st = OmdState::from_hat(z1, eta)?;
            let mut avg = st.z.clone();
            loop {
                rows.push(TraceRow {
                    k: st.k,
                    gap_actual: ngame::duality_gap(game, &st.z)?,
                    gap_average: ngame::duality_gap(game, &avg)?,
                });
                if st.k == iters {
                    break;
                }
                st = omd_step(&st, game)?;
                avg = JointPolicy::new(
                    running_mean(&avg.x, &st.z.x, st.k),
                    running_mean(&avg.y, &st.z.y, st.k),
                );
            }
        }
    }
    Ok(rows)
}

/// Writes `k,gap_actual,gap_average` rows.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,gap_actual,gap_average")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.k, r.gap_actual, r.gap_average)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp_start() -> JointPolicy {
        JointPolicy::new(
            SimplexPolicy::new(vec![0.9, 0.1]).unwrap(),
            SimplexPolicy::uniform(2),
        )
    }

    #[test]
    fn sbr_closed_forms() {
        let f = PayoffVector {
            fx: vec![0.0; 3],
            fy: vec![2f64.ln(), 0.0],
        };
        let z = sbr(&f, 1.0).unwrap();
        for p in z.x.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((z.y.probs()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((z.y.probs()[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(sbr(&f, 0.0).is_err());
    }

    #[test]
    fn sbr_survives_huge_arguments() {
        let f = PayoffVector {
            fx: vec![1e6, 1e6 + 1.0],
            fy: vec![-1e7, 0.0],
        };
        let z = sbr(&f, 10.0).unwrap();
        assert!(z.x.probs().iter().chain(z.y.probs()).all(|p| p.is_finite()));
        assert_eq!(z.y.probs()[0], 1.0);
    }

    #[test]
    fn rps_uniform_is_a_fixed_point_for_every_method() {
        let g = MatrixGame::rock_paper_scissors();
        for m in [Method::Sfp, Method::Osfp, Method::Omd] {
            let rows = solve(&g, m, 0.1, 10).unwrap();
            assert_eq!(rows.len(), 10);
            assert!(rows.iter().all(|r| r.gap_actual < 1e-15 && r.gap_average < 1e-15), "{m}");
        }
    }

    #[test]
    fn state_accumulators_track_history() {
        let g = MatrixGame::from_rows(&[vec![2.0, -1.0, 0.5], vec![-0.5, 1.0, 0.0]]).unwrap();
        let mut st = SolverState::uniform(&g, 0.3).unwrap();
        let mut hist = vec![st.z.clone()];
        for _ in 0..20 {
            st = osfp_step(&st, &g).unwrap();
            hist.push(st.z.clone());
        }
        let mut sum = PayoffVector::zeros(&g);
        let mut xbar = [0.0; 2];
        for z in &hist {
            sum.add_assign(&ngame::payoff_vector(&g, z).unwrap());
            for (a, b) in xbar.iter_mut().zip(z.x.probs()) {
                *a += b / hist.len() as f64;
            }
        }
        for (a, b) in st.f_tilde.fx.iter().zip(&sum.fx) {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in st.z_bar.x.probs().iter().zip(&xbar) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn first_osfp_step_doubles_the_initial_payoff_vector() {
        let g = MatrixGame::matching_pennies();
        let st = SolverState::new(&g, mp_start(), 0.1).unwrap();
        let next = osfp_step(&st, &g).unwrap();
        let f1 = ngame::payoff_vector(&g, &mp_start()).unwrap();
        let expected = sbr(&f1, 0.2).unwrap();
        assert_eq!(next.z, expected);
    }

    #[test]
    fn zero_optimism_is_sfp_bit_for_bit() {
        let g = MatrixGame::from_rows(&[vec![0.3, -1.0], vec![-0.7, 0.4], vec![1.0, 0.0]]).unwrap();
        let mut st = SolverState::uniform(&g, 0.25).unwrap();
        for _ in 0..50 {
            let a = sfp_step(&st, &g).unwrap();
            let b = optimistic_step(&st, &g, 0.0).unwrap();
            assert_eq!(a, b);
            st = osfp_step(&st, &g).unwrap();
        }
    }

    #[test]
    fn omd_first_step_from_uniform_is_uniform() {
        let g = MatrixGame::matching_pennies();
        let st = OmdState::uniform(&g, 0.1).unwrap();
        assert_eq!(st.z, JointPolicy::uniform(&g));
        assert_eq!(st.z_hat(), JointPolicy::uniform(&g));
    }

    #[test]
    fn bregman_is_kl_on_the_simplex() {
        let psi = EntropyRegularizer;
        let p: [f64; 3] = [0.2, 0.3, 0.5];
        let q: [f64; 3] = [0.4, 0.4, 0.2];
        let kl: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        assert!((psi.bregman(&p, &q) - kl).abs() < 1e-14);
        assert!(psi.bregman(&p, &p).abs() < 1e-15);
        let back = psi.inverse_mirror_map(&psi.mirror_map(&p).iter().map(|v| -v).collect::<Vec<_>>());
        for (a, b) in back.iter().zip(&p) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sfp_cycles_while_osfp_converges_on_matching_pennies() {
        let g = MatrixGame::matching_pennies();
        let sfp = solve_from(&g, Method::Sfp, 0.1, 1000, mp_start()).unwrap();
        let min_actual = sfp[99..].iter().map(|r| r.gap_actual).fold(f64::INFINITY, f64::min);
        assert!(min_actual > 0.05, "sfp actual gap dipped to {min_actual}");
        let osfp = solve_from(&g, Method::Osfp, 0.1, 2000, mp_start()).unwrap();
        assert!(osfp.last().unwrap().gap_actual < 1e-3);
    }

    #[test]
    fn csv_layout() {
        let rows = [TraceRow { k: 1, gap_actual: 0.5, gap_average: 0.25 }];
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,gap_actual,gap_average\n1,0.5,0.25\n");
    }

    #[test]
    fn method_parsing() {
        assert_eq!("OSFP".parse::<Method>().unwrap(), Method::Osfp);
        assert!("cfr".parse::<Method>().is_err());
        assert!(solve(&MatrixGame::matching_pennies(), Method::Sfp, 0.1, 0).is_err());
    }
}
