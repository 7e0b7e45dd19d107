//! Derivative-free-ish minimizers: central-difference gradients with
//! projected descent and Armijo backtracking.

/// Euclidean projection onto `{x : x_i ≥ eps, Σ x_i = 1}`.
pub fn project_simplex(v: &[f64], eps: f64) -> Vec<f64> {
    let n = v.len();
    let mass = 1.0 - eps * n as f64;
    assert!(mass > 0.0, "eps too large for dimension {n}");
    let mut u: Vec<f64> = v.iter().map(|x| x - eps).collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - mass) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - eps - theta).max(0.0) + eps).collect()
}

/// Steps shrink near zero so the probe stays in the positive orthant.
fn central_diff<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut p = x.to_vec();
    for i in 0..x.len() {
        let xi = p[i];
        let h = (0.5 * xi).min(1e-6);
        p[i] = xi + h;
        let up = f(&p);
        p[i] = xi - h;
        let dn = f(&p);
        p[i] = xi;
        g[i] = (up - dn) / (2.0 * h);
    }
    g
}

/// Projected descent on a product of simplices. `blocks` gives the length
/// of each simplex in the flat vector. Returns the best point and value.
pub fn minimize_product<F: Fn(&[f64]) -> f64>(
    f: F,
    blocks: &[usize],
    eps: f64,
    iters: usize,
) -> (Vec<f64>, f64) {
    let project = |v: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        let mut at = 0;
        for &n in blocks {
            out.extend(project_simplex(&v[at..at + n], eps));
            at += n;
        }
        out
    };
    let init: Vec<f64> = blocks
        .iter()
        .flat_map(|&n| std::iter::repeat_n(1.0 / n as f64, n))
        .collect();
    let mut x = project(&init);
    let mut fx = f(&x);
    let mut step = 1.0;
    for _ in 0..iters {
        let g = central_diff(&f, &x);
        let mut accepted = false;
        let mut t = step * 2.0;
        while t > 1e-14 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let cand = project(&cand);
            let decrease: f64 = x.iter().zip(&cand).zip(&g).map(|((a, c), gi)| gi * (a - c)).sum();
            let fc = f(&cand);
            if fc <= fx - 1e-4 * decrease && decrease > 0.0 {
                x = cand;
                fx = fc;
                step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, fx)
}

/// Minimum of `f` over one simplex.
pub fn minimize_simplex<F: Fn(&[f64]) -> f64>(f: F, n: usize, eps: f64, iters: usize) -> (Vec<f64>, f64) {
    minimize_product(f, &[n], eps, iters)
}
