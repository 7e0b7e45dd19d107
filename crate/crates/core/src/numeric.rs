//! Small numeric helpers shared by the solvers.

/// Numerically stable `log Σ exp(v)`.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Softmax with max-subtraction. Entries equal to `-inf` get probability 0.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return vec![1.0 / logits.len() as f64; logits.len()];
    }
    let mut out: Vec<f64> = logits.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = out.iter().sum();
    for o in &mut out {
        *o /= s;
    }
    out
}

/// `softmax(−scale · g)`.
pub fn softmax_neg(g: &[f64], scale: f64) -> Vec<f64> {
    let logits: Vec<f64> = g.iter().map(|v| -scale * v).collect();
    softmax(&logits)
}

/// `Σ p log p` with `0 log 0 = 0`.
pub fn neg_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum()
}

/// Index drawn from a probability vector by inversion of one uniform draw.
/// Trailing rounding mass goes to the last positive entry.
pub fn sample_categorical<R: rand::Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_shift_invariant_and_stable() {
        let a = softmax(&[1000.0, 1001.0]);
        let b = softmax(&[0.0, 1.0]);
        assert!((a[0] - b[0]).abs() < 1e-15);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(softmax(&[f64::NEG_INFINITY, 0.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn log_sum_exp_matches_naive() {
        let v = [0.3, -1.2, 2.5];
        let naive = v.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&v) - naive).abs() < 1e-14);
    }

    #[test]
    fn neg_entropy_edge_cases() {
        assert_eq!(neg_entropy(&[1.0, 0.0]), 0.0);
        assert!((neg_entropy(&[0.25; 4]) + 4f64.ln()).abs() < 1e-15);
    }
}
