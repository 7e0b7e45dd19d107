use rand::Rng;

use crate::efg::{GameTree, SequencePolicy};
use crate::error::{Error, Result};
use crate::numeric::sample_categorical;

/// Historical opponents `y₁ … y_k` with weights `α̃ᵢ = αᵢ / Σα`, where
/// `αᵢ = 1` for `i < k` and `α_k = 2`, and `μ = η Σα`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpponentMixture<P> {
    pub opponents: Vec<P>,
    pub eta: f64,
    pub alpha: Vec<f64>,
    pub alpha_tilde: Vec<f64>,
    pub mu: f64,
}

impl<P> OpponentMixture<P> {
    pub fn new(opponents: Vec<P>, eta: f64) -> Result<Self> {
        let k = opponents.len();
        if k == 0 {
            return Err(Error::ContractViolation("empty opponent mixture".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::ContractViolation(format!("eta must be positive, got {eta}")));
        }
        let alpha: Vec<f64> = (0..k).map(|i| if i + 1 == k { 2.0 } else { 1.0 }).collect();
        let total: f64 = alpha.iter().sum();
        let alpha_tilde = alpha.iter().map(|a| a / total).collect();
        Ok(Self {
            opponents,
            eta,
            alpha,
            alpha_tilde,
            mu: eta * total,
        })
    }

    pub fn len(&self) -> usize {
        self.opponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opponents.is_empty()
    }
}

/// Zero-based index drawn with probability `α̃ᵢ`.
pub fn sample_opponent<P, R: Rng + ?Sized>(mix: &OpponentMixture<P>, rng: &mut R) -> usize {
    sample_categorical(&mix.alpha_tilde, rng)
}

impl OpponentMixture<SequencePolicy> {
    /// `Σ α̃ᵢ yᵢ`; the return is linear in the opponent, so this single
    /// policy stands in for the whole mixture.
    pub fn average(&self, gt: &GameTree) -> Result<SequencePolicy> {
        let player = self.opponents[0].player;
        let tp = gt.treeplex(player);
        let mut x = vec![0.0; tp.n_seqs()];
        for (y, w) in self.opponents.iter().zip(&self.alpha_tilde) {
            y.validate(tp)?;
            for (acc, v) in x.iter_mut().zip(&y.x) {
                *acc += w * v;
            }
        }
        SequencePolicy::new(tp, x)
    }
}
