use super::treeplex::{sequence_to_behavioral_unchecked, SequencePolicy, Treeplex};
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, neg_entropy};

/// Dilated negative entropy `ψ(x) = Σ_s x(s) Σ_a π(a|s) log π(a|s)`.
pub fn dilated_entropy(tp: &Treeplex, x: &SequencePolicy) -> Result<f64> {
    x.validate(tp)?;
    let pi = sequence_to_behavioral_unchecked(tp, x);
    Ok((0..tp.n_infosets())
        .map(|s| {
            let mass = x.infoset_reach(tp, s);
            if mass > 0.0 {
                mass * neg_entropy(&pi.probs[s])
            } else {
                0.0
            }
        })
        .sum())
}

/// `⟨g, x⟩ + μ ψ(x)`.
pub fn smoothed_objective(tp: &Treeplex, g: &[f64], mu: f64, x: &SequencePolicy) -> Result<f64> {
    let linear: f64 = g.iter().zip(&x.x).map(|(a, b)| a * b).sum();
    Ok(linear + mu * dilated_entropy(tp, x)?)
}

/// Exact minimizer of `⟨g, x⟩ + μ ψ(x)` over the treeplex together with the
/// attained minimum.
pub fn sbr_treeplex_with_value(tp: &Treeplex, g: &[f64], mu: f64) -> Result<(SequencePolicy, f64)> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::ContractViolation(format!("mu must be positive, got {mu}")));
    }
    if g.len() != tp.n_seqs() {
        return Err(Error::DimensionMismatch(format!(
            "gradient has {} entries, treeplex has {} sequences",
            g.len(),
            tp.n_seqs()
        )));
    }
    let n = tp.n_infosets();
    let mut soft_value = vec![0.0; n];
    let mut probs: Vec<Vec<f64>> = vec![Vec::new(); n];
    for s in (0..n).rev() {
        let info = tp.infoset(s);
        let cost: Vec<f64> = (0..info.n_actions)
            .map(|a| {
                g[info.first_seq + a]
                    + info.child_infosets[a].iter().map(|&t| soft_value[t]).sum::<f64>()
            })
            .collect();
        let logits: Vec<f64> = cost.iter().map(|c| -c / mu).collect();
        let lse = log_sum_exp(&logits);
        probs[s] = logits.iter().map(|l| (l - lse).exp()).collect();
        soft_value[s] = -mu * lse;
    }
    let mut x = vec![0.0; tp.n_seqs()];
    for (s, info) in tp.infosets().iter().enumerate() {
        let parent = info.parent_seq.map_or(1.0, |ps| x[ps]);
        for a in 0..info.n_actions {
            x[info.first_seq + a] = parent * probs[s][a];
        }
    }
    let value = tp.roots().map(|s| soft_value[s]).sum();
    Ok((SequencePolicy::new_unchecked(tp.player(), x), value))
}

/// Smooth best response on a treeplex: softmin at every infoset, taken
/// bottom-up with children's soft values folded into the action costs.
pub fn sbr_treeplex(tp: &Treeplex, g: &[f64], mu: f64) -> Result<SequencePolicy> {
    sbr_treeplex_with_value(tp, g, mu).map(|(x, _)| x)
}
