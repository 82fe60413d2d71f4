use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A square nonnegative matrix with labelled rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    labels: Vec<String>,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!("expected a {n}x{n} array")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidMatrix(format!("duplicate label {dup}")));
        }
        for (i, row) in rows.iter().enumerate() {
            if let Some((j, x)) = row.iter().enumerate().find(|(_, x)| **x < S::zero()) {
                return Err(Error::InvalidMatrix(format!(
                    "negative entry {x} at ({}, {})",
                    labels[i], labels[j]
                )));
            }
        }
        Ok(Matrix { labels, rows })
    }

    /// Rows labelled `0..n`.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(labels, rows)
    }

    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        Matrix {
            labels,
            rows: vec![vec![S::zero(); n]; n],
        }
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let mut m = Self::zeros(labels);
        for i in 0..m.dim() {
            m.rows[i][i] = S::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub(crate) fn add_to(&mut self, i: usize, j: usize, x: S) {
        let cell = &mut self.rows[i][j];
        *cell = cell.clone() + x;
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        let n = self.dim();
        let mut rows = vec![vec![S::zero(); n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.rows[k].iter().enumerate() {
                    if !b.is_zero() {
                        rows[i][j] = rows[i][j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Matrix {
            labels: self.labels.clone(),
            rows,
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    /// Exact `M^n` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> Matrix<S> {
        let mut result = Matrix::identity(self.labels.clone());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn principal(&self, indices: &[usize]) -> Matrix<S> {
        Matrix {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            rows: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.rows[i][j].clone()).collect())
                .collect(),
        }
    }

    /// Column indices of the positive entries of each row.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| **x > S::zero())
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(S::zero(), |a, x| a + x.clone()))
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            labels: self.labels.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .chain(self.labels.iter())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
        write!(f, "{:>width$}", "")?;
        for l in &self.labels {
            write!(f, " {l:>width$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&cells) {
            write!(f, "{l:>width$}")?;
            for c in row {
                write!(f, " {c:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Solves `A x = b` exactly (up to the scalar's arithmetic) by Gaussian
/// elimination with largest-magnitude pivots. `None` when `A` is singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&x, &y| crate::scalar::cmp(&m[x][col].abs(), &m[y][col].abs()))?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..=n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone() / m[i][i].clone()).collect())
}

/// A nonzero vector in the kernel of `A`, if `A` is singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn kernel_vector<S: Scalar>(a: &[Vec<S>]) -> Option<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for c in col..n {
            m[row][c] = m[row][c].clone() / pv.clone();
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..n {
                    let delta = factor.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![S::zero(); n];
    v[free] = S::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -m[r][free].clone();
    }
    Some(v)
}

pub(crate) fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let x = solve(a, b)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub(crate) fn ones<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::one(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Matrix::<Rational>::from_rows(vec![vec![q(1, 1)], vec![q(1, 1)]]).is_err());
        assert!(Matrix::from_rows(vec![vec![q(-1, 2)]]).is_err());
        assert!(Matrix::<Rational>::new(vec!["a".into(), "a".into()], vec![vec![q(0, 1); 2]; 2]).is_err());
    }

    #[test]
    fn powers() {
        let m = Matrix::from_rows(vec![vec![q(1, 2), q(1, 1)], vec![q(0, 1), q(1, 3)]]).unwrap();
        assert_eq!(m.pow(0), Matrix::identity(m.labels().to_vec()));
        assert_eq!(m.pow(1), m);
        assert_eq!(m.pow(3), m.mul(&m).mul(&m));
    }

    #[test]
    fn exact_solve_and_kernel() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let x = solve(&a, &[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(solve(&singular, &[q(1, 1), q(1, 1)]).is_none());
        let k = kernel_vector(&singular).unwrap();
        assert_eq!(k, vec![q(-2, 1), q(1, 1)]);
        assert!(kernel_vector(&a).is_none());
    }
}
