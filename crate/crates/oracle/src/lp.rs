//! Dense two-phase simplex.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `maximize cᵀx` subject to rows `aᵢᵀx (≤|≥|=) bᵢ`; variables are
/// nonnegative unless marked free.
#[derive(Debug, Clone)]
pub struct Lp {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Cmp, f64)>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const EPS: f64 = 1e-10;

impl Lp {
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            rows: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let n = self.objective.len();
        // Column map: free variables become x⁺ − x⁻.
        let mut col_of = Vec::with_capacity(n);
        let mut n_struct = 0;
        for &f in &self.free {
            col_of.push((n_struct, f.then_some(n_struct + 1)));
            n_struct += if f { 2 } else { 1 };
        }
        let m = self.rows.len();
        let n_slack = self.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let mut norm: Vec<(Vec<f64>, Cmp, f64)> = Vec::with_capacity(m);
        for (a, cmp, b) in &self.rows {
            let mut row = vec![0.0; n_struct];
            for (j, &v) in a.iter().enumerate() {
                let (p, neg) = col_of[j];
                row[p] = v;
                if let Some(q) = neg {
                    row[q] = -v;
                }
            }
            let (row, cmp, b) = if *b < 0.0 {
                let flipped = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                (row.iter().map(|v| -v).collect(), flipped, -b)
            } else {
                (row, *cmp, *b)
            };
            norm.push((row, cmp, b));
        }
        let n_art = norm.iter().filter(|r| r.1 != Cmp::Le).count();
        let width = n_struct + n_slack + n_art;
        let mut t = Tableau::new(m, width);
        let mut slack = n_struct;
        let mut art = n_struct + n_slack;
        for (i, (row, cmp, b)) in norm.iter().enumerate() {
            t.a[i][..n_struct].copy_from_slice(row);
            t.a[i][width] = *b;
            match cmp {
                Cmp::Le => {
                    t.a[i][slack] = 1.0;
                    t.basis[i] = slack;
                    slack += 1;
                }
                Cmp::Ge => {
                    t.a[i][slack] = -1.0;
                    slack += 1;
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }
        let art_start = n_struct + n_slack;
        if n_art > 0 {
            let mut c1 = vec![0.0; width];
            for c in c1.iter_mut().skip(art_start) {
                *c = -1.0;
            }
            t.set_objective(&c1);
            t.run(width)?;
            if t.objective_value() < -1e-7 {
                return Err(LpError::Infeasible);
            }
            // Drive remaining artificials out of the basis where possible.
            for i in 0..m {
                if t.basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| t.a[i][j].abs() > 1e-9) {
                        t.pivot(i, j);
                    }
                }
            }
        }
        let mut c2 = vec![0.0; width];
        for (j, &c) in self.objective.iter().enumerate() {
            let (p, neg) = col_of[j];
            c2[p] = c;
            if let Some(q) = neg {
                c2[q] = -c;
            }
        }
        t.set_objective(&c2);
        t.run(art_start)?;
        let mut xs = vec![0.0; width];
        for i in 0..m {
            xs[t.basis[i]] = t.a[i][width];
        }
        let x: Vec<f64> = col_of
            .iter()
            .map(|&(p, neg)| xs[p] - neg.map_or(0.0, |q| xs[q]))
            .collect();
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, value })
    }
}

struct Tableau {
    /// `m` constraint rows of width `n + 1` (last entry the right-hand side).
    a: Vec<Vec<f64>>,
    /// Reduced costs `c_B B⁻¹ A − c` and objective value in the last entry.
    z: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Self {
            a: vec![vec![0.0; width + 1]; m],
            z: vec![0.0; width + 1],
            basis: vec![0; m],
            width,
        }
    }

    fn set_objective(&mut self, c: &[f64]) {
        self.z = c.iter().map(|v| -v).collect();
        self.z.push(0.0);
        for i in 0..self.a.len() {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.width {
                    self.z[j] += cb * self.a[i][j];
                }
            }
        }
    }

    fn objective_value(&self) -> f64 {
        self.z[self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes over columns `< allowed`. Uses the steepest reduced cost and
    /// falls back to Bland's rule after a run of degenerate pivots.
    fn run(&mut self, allowed: usize) -> Result<(), LpError> {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate > 50;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..allowed {
                if self.z[j] < -EPS {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if self.z[j] < best {
                        best = self.z[j];
                        enter = Some(j);
                    }
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for (i, row) in self.a.iter().enumerate() {
                if row[c] > EPS {
                    let r = row[self.width] / row[c];
                    let better = match leave {
                        None => true,
                        Some(l) => r < ratio - 1e-12 || (r <= ratio + 1e-12 && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leave = Some(i);
                        ratio = r;
                    }
                }
            }
            let Some(r) = leave else { return Err(LpError::Unbounded) };
            if ratio.abs() < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Equilibrium of the matrix game where player 1 receives `b[i][j]`:
/// `(x, y, max_x min_y xᵀBy)`.
pub fn solve_matrix(b: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, f64) {
    let m = b.len();
    let n = b[0].len();
    let row_player = |b: &dyn Fn(usize, usize) -> f64, m: usize, n: usize| {
        // Variables: x (m), v (free).
        let mut lp = Lp::new(m + 1);
        lp.objective[m] = 1.0;
        lp.free[m] = true;
        for j in 0..n {
            let mut row: Vec<f64> = (0..m).map(|i| b(i, j)).collect();
            row.push(-1.0);
            lp.add(row, Cmp::Ge, 0.0);
        }
        let mut sum = vec![1.0; m];
        sum.push(0.0);
        lp.add(sum, Cmp::Eq, 1.0);
        let s = lp.solve().expect("matrix games are feasible and bounded");
        (s.x[..m].to_vec(), s.value)
    };
    let (x, v) = row_player(&|i, j| b[i][j], m, n);
    let (y, _) = row_player(&|j, i| -b[i][j], n, m);
    (x, y, v)
}
