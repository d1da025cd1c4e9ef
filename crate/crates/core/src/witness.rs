//! The 5×5 probability matrix and the determinant witness.
//!
//! Rows `0..4` hold the four measurements, row `4` is the constant row of
//! ones, columns are the five preparations. `W = det p` is zero for any
//! qubit realization. Its shot-noise variance for `T` repetitions per cell
//! is, to leading order,
//!
//! ```text
//! T·Var(W) ≈ Σ_kj p_kj (1 - p_kj) (Adj p)_jk²
//! ```

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg};

use num_traits::Zero;

use crate::math::sqrt;
use crate::{Error, Result};

pub type Mat5 = [[f64; 5]; 5];

pub const ROWS: usize = 5;
pub const MEAS_ROWS: usize = 4;

/// Validated probability matrix: entries in `[0, 1]`, last row all ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbMatrix(Mat5);

impl ProbMatrix {
    pub fn new(p: Mat5) -> Result<Self> {
        for (k, row) in p.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                    return Err(Error::domain(alloc::format!("p[{k}][{j}] = {x} is not a probability")));
                }
            }
        }
        if p[MEAS_ROWS].iter().any(|&x| x != 1.0) {
            return Err(Error::domain("last row of p must be all ones"));
        }
        Ok(ProbMatrix(p))
    }

    /// Builds the matrix from the four measurement rows.
    pub fn from_measurement_rows(rows: [[f64; 5]; 4]) -> Result<Self> {
        let mut p = [[1.0; 5]; 5];
        p[..MEAS_ROWS].copy_from_slice(&rows);
        ProbMatrix::new(p)
    }

    pub fn identity() -> Self {
        let mut p = [[0.0; 5]; 5];
        for (i, row) in p.iter_mut().enumerate().take(MEAS_ROWS) {
            row[i] = 1.0;
        }
        p[MEAS_ROWS] = [1.0; 5];
        ProbMatrix(p)
    }

    pub fn as_array(&self) -> &Mat5 {
        &self.0
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.0[k][j]
    }

    pub fn column(&self, j: usize) -> [f64; 5] {
        core::array::from_fn(|k| self.0[k][j])
    }

    pub fn witness(&self) -> f64 {
        det5(&self.0)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &ProbMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for k in 0..ROWS {
            for j in 0..ROWS {
                d = d.max((self.0[k][j] - other.0[k][j]).abs());
            }
        }
        d
    }

    /// Entrywise mean of several matrices.
    pub fn mean(items: &[ProbMatrix]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::domain("mean of zero matrices"));
        }
        let mut acc = [[0.0; 5]; 5];
        for p in items {
            for k in 0..ROWS {
                for j in 0..ROWS {
                    acc[k][j] += p.0[k][j];
                }
            }
        }
        let n = items.len() as f64;
        for row in acc.iter_mut().take(MEAS_ROWS) {
            for x in row.iter_mut() {
                *x = (*x / n).clamp(0.0, 1.0);
            }
        }
        acc[MEAS_ROWS] = [1.0; 5];
        ProbMatrix::new(acc)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det5(m: &Mat5) -> f64 {
    det_pivoted(m)
}

fn det_pivoted<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let d = a[col][col];
        det *= d;
        for r in col + 1..N {
            let f = a[r][col] / d;
            if f != 0.0 {
                for c in col + 1..N {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    det
}

fn minor4(m: &Mat5, skip_row: usize, skip_col: usize) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (oi, i) in (0..5).filter(|&i| i != skip_row).enumerate() {
        for (oj, j) in (0..5).filter(|&j| j != skip_col).enumerate() {
            out[oi][oj] = m[i][j];
        }
    }
    out
}

/// Adjugate of an arbitrary 5×5 matrix: `(Adj m)_jk = (-1)^{j+k} minor(k, j)`.
pub fn adjugate5(m: &Mat5) -> Mat5 {
    let mut adj = [[0.0; 5]; 5];
    for (j, row) in adj.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let sign = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
            *cell = sign * det_pivoted(&minor4(m, k, j));
        }
    }
    adj
}

pub fn witness(p: &ProbMatrix) -> f64 {
    p.witness()
}

pub fn adjugate(p: &ProbMatrix) -> Mat5 {
    adjugate5(&p.0)
}

/// Leading-order variance of `W` with `t` repetitions in every cell.
pub fn witness_variance(p: &ProbMatrix, t: u64) -> Result<f64> {
    if t < 1 {
        return Err(Error::domain("repetition count T must be at least 1"));
    }
    Ok(variance_sum(p, |_, _| t as f64))
}

/// Same estimate with a separate repetition count per measurement cell.
/// The constant row carries no noise and needs no count.
pub fn witness_variance_cells(p: &ProbMatrix, counts: &[[u64; 5]; 4]) -> Result<f64> {
    if counts.iter().flatten().any(|&c| c == 0) {
        return Err(Error::domain("every cell needs at least one repetition"));
    }
    Ok(variance_sum(
        p,
        |k, j| {
            if k < MEAS_ROWS {
                counts[k][j] as f64
            } else {
                1.0
            }
        },
    ))
}

fn variance_sum(p: &ProbMatrix, count: impl Fn(usize, usize) -> f64) -> f64 {
    let adj = adjugate(p);
    let mut acc = 0.0;
    for k in 0..ROWS {
        for j in 0..ROWS {
            let x = p.0[k][j];
            let a = adj[j][k];
            acc += x * (1.0 - x) * a * a / count(k, j);
        }
    }
    acc
}

/// Witness, its standard deviation and the ratio between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessResult {
    pub w: f64,
    pub sigma: f64,
    /// `W / sigma`, `None` when `sigma` is zero.
    pub z: Option<f64>,
    pub t: u64,
}

impl WitnessResult {
    pub fn from_parts(w: f64, sigma: f64, t: u64) -> Self {
        let z = if sigma > 0.0 { Some(w / sigma) } else { None };
        WitnessResult { w, sigma, z, t }
    }
}

pub fn z_score(p: &ProbMatrix, t: u64) -> Result<WitnessResult> {
    let var = witness_variance(p, t)?;
    Ok(WitnessResult::from_parts(p.witness(), sqrt(var), t))
}

/// Determinant by cofactor expansion along the first row, in any ring.
/// Exact for integer or rational entries.
pub fn laplace_det<T>(m: &[Vec<T>]) -> T
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    let n = m.len();
    match n {
        0 => T::zero(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() + -(m[0][1].clone() * m[1][0].clone()),
        _ => {
            let mut acc = T::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != col)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].clone() * laplace_det(&sub);
                acc = if col % 2 == 0 { acc + term } else { acc + -term };
            }
            acc
        }
    }
}

/// Exact determinant of a small integer matrix by fraction-free
/// (Bareiss) elimination.
pub fn bareiss_det<const N: usize>(m: &[[i64; N]; N]) -> i64 {
    let mut a = *m;
    let mut sign = 1;
    let mut prev = 1i64;
    for k in 0..N.saturating_sub(1) {
        if a[k][k] == 0 {
            match (k + 1..N).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..N {
            for j in k + 1..N {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if N == 0 {
        1
    } else {
        sign * a[N - 1][N - 1]
    }
}
