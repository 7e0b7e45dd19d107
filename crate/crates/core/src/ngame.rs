//! Two-player zero-sum normal-form games.
//!
//! Sign convention used throughout the crate: the bilinear payoff
//! `u(x, y) = xᵀ A y` is a *loss* for player 1 (the row player minimizes it)
//! and a *gain* for player 2 (the column player maximizes it). Both players
//! are expressed as minimizers of their own block of the payoff vector
//! `F(z) = (A y, −Aᵀ x)`, so a best response is always an `argmin`.
//!
//! Extensive-form code stores terminal payoffs as player-1 *returns*
//! `R = −u`; [`crate::efg`] converts between the two explicitly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

/// Tolerance on the simplex sum accepted by [`SimplexPolicy::new`].
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Default tolerance for [`ne_check`].
pub const DEFAULT_GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    /// Row-major payoff entries.
    a: Vec<f64>,
}

impl MatrixGame {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "payoff matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if a.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|v| !v.is_finite()) {
            return Err(Error::ContractViolation(format!(
                "payoff entries must be finite, found {bad}"
            )));
        }
        Ok(Self { rows, cols, a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged payoff rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// Rock-paper-scissors.
    pub fn rock_paper_scissors() -> Self {
        Self::from_rows(&[
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .expect("static matrix")
    }

    /// Matching pennies `[[1, −1], [−1, 1]]`.
    pub fn matching_pennies() -> Self {
        Self::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).expect("static matrix")
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.a
    }

    /// `A · y`.
    pub fn mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        self.a
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ · x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &xi) in self.a.chunks_exact(self.cols).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    /// Parses the plain-text format: a `rows cols` header followed by `rows`
    /// lines of whitespace-separated decimals. Blank lines and `#` comments
    /// are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(hline, format!("bad dimension {t:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(parse_err(hline, "header must be `rows cols`"));
        };

        let mut a = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| parse_err(hline + r + 1, format!("missing row {r}")))?;
            let before = a.len();
            for tok in line.split_whitespace() {
                a.push(
                    tok.parse::<f64>()
                        .map_err(|_| parse_err(ln, format!("bad number {tok:?}")))?,
                );
            }
            if a.len() - before != cols {
                return Err(parse_err(
                    ln,
                    format!("expected {cols} entries, found {}", a.len() - before),
                ));
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing data after last row"));
        }
        Self::new(rows, cols, a)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for row in self.a.chunks_exact(self.cols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPolicy(Vec<f64>);

impl SimplexPolicy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::ContractViolation("empty simplex policy".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::ContractViolation(format!(
                "simplex entries must be nonnegative and finite: {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL * probs.len().max(1) as f64 {
            return Err(Error::ContractViolation(format!(
                "simplex entries sum to {sum}, not 1"
            )));
        }
        Ok(Self(probs))
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::ContractViolation(format!(
                "cannot normalize weights {weights:?}"
            )));
        }
        Ok(Self(weights.iter().map(|w| w / sum).collect()))
    }

    pub(crate) fn new_unchecked(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform policy over zero actions");
        Self(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        Self(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for SimplexPolicy {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `z = (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPolicy {
    pub x: SimplexPolicy,
    pub y: SimplexPolicy,
}

impl JointPolicy {
    pub fn new(x: SimplexPolicy, y: SimplexPolicy) -> Self {
        Self { x, y }
    }

    pub fn uniform(game: &MatrixGame) -> Self {
        Self::new(
            SimplexPolicy::uniform(game.n_rows()),
            SimplexPolicy::uniform(game.n_cols()),
        )
    }

    fn check(&self, game: &MatrixGame) -> Result<()> {
        if self.x.len() != game.n_rows() || self.y.len() != game.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "policy dims ({}, {}) do not match {}x{} game",
                self.x.len(),
                self.y.len(),
                game.n_rows(),
                game.n_cols()
            )));
        }
        Ok(())
    }
}

/// `F(z) = (A y, −Aᵀ x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffVector {
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
}

impl PayoffVector {
    pub fn zeros(game: &MatrixGame) -> Self {
        Self {
            fx: vec![0.0; game.n_rows()],
            fy: vec![0.0; game.n_cols()],
        }
    }

    pub fn add_assign(&mut self, other: &PayoffVector) {
        add_into(&mut self.fx, &other.fx);
        add_into(&mut self.fy, &other.fy);
    }

    pub fn scaled(&self, s: f64) -> PayoffVector {
        PayoffVector {
            fx: self.fx.iter().map(|v| v * s).collect(),
            fy: self.fy.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sum(&self, other: &PayoffVector) -> PayoffVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.fx.iter().chain(&self.fy).all(|v| v.is_finite())
    }
}

pub(crate) fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `u(x, y) = xᵀ A y`.
pub fn payoff(game: &MatrixGame, z: &JointPolicy) -> Result<f64> {
    z.check(game)?;
    Ok(dot(z.x.probs(), &game.mul_vec(z.y.probs())))
}

pub fn payoff_vector(game: &MatrixGame, z: &JointPolicy) -> Result<PayoffVector> {
    z.check(game)?;
    let fx = game.mul_vec(z.y.probs());
    let fy = game
        .mul_transpose_vec(z.x.probs())
        .into_iter()
        .map(|v| -v)
        .collect();
    Ok(PayoffVector { fx, fy })
}

/// Index of the smallest entry; ties go to the lowest index.
pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &val) in v.iter().enumerate().skip(1) {
        if val < v[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &val) in v.iter().enumerate().skip(1) {
        if val > v[best] {
            best = i;
        }
    }
    best
}

/// Vertex best response of both players to a payoff vector.
pub fn best_response(f: &PayoffVector) -> Result<JointPolicy> {
    if !f.is_finite() || f.fx.is_empty() || f.fy.is_empty() {
        return Err(Error::ContractViolation(
            "best response needs a finite, non-empty payoff vector".into(),
        ));
    }
    Ok(JointPolicy::new(
        SimplexPolicy::vertex(f.fx.len(), argmin(&f.fx)),
        SimplexPolicy::vertex(f.fy.len(), argmin(&f.fy)),
    ))
}

/// `max_y' u(x, y') − min_x' u(x', y)`; both optima sit at vertices.
pub fn duality_gap(game: &MatrixGame, z: &JointPolicy) -> Result<f64> {
    z.check(game)?;
    let col_values = game.mul_transpose_vec(z.x.probs());
    let row_values = game.mul_vec(z.y.probs());
    let best_col = col_values[argmax(&col_values)];
    let best_row = row_values[argmin(&row_values)];
    Ok((best_col - best_row).max(0.0))
}

pub fn ne_check(game: &MatrixGame, z: &JointPolicy, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::ContractViolation(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(duality_gap(game, z)? <= tol)
}
