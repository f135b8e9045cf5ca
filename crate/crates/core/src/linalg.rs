//! Dense exact matrices and the handful of linear solves the checks need.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut, Index, IndexMut};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qcore::ExactScalar;

/// A function on the grid `x = 0..=N`, stored as its `N + 1` values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridVector(pub Vec<ExactScalar>);

impl GridVector {
    pub fn constant(len: usize, v: ExactScalar) -> Self {
        GridVector(vec![v; len])
    }

    pub fn scaled(&self, s: &ExactScalar) -> GridVector {
        GridVector(self.0.iter().map(|v| v * s).collect())
    }
}

impl Deref for GridVector {
    type Target = [ExactScalar];
    fn deref(&self) -> &[ExactScalar] {
        &self.0
    }
}

impl DerefMut for GridVector {
    fn deref_mut(&mut self) -> &mut [ExactScalar] {
        &mut self.0
    }
}

impl From<Vec<ExactScalar>> for GridVector {
    fn from(v: Vec<ExactScalar>) -> Self {
        GridVector(v)
    }
}

/// Row-major dense matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { ExactScalar::one() } else { ExactScalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> GridVector {
        GridVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> GridVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        GridVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v)
                        .filter(|(a, _)| !a.is_zero())
                        .fold(ExactScalar::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        self.axpy(&ExactScalar::one(), o)
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.axpy(&-ExactScalar::one(), o)
    }

    /// `self + s * o`.
    pub fn axpy(&self, s: &ExactScalar, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn scale(&self, s: &ExactScalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b).sub(&b.mul(a))
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b).add(&b.mul(a))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry (zero for an empty matrix).
    pub fn max_abs(&self) -> ExactScalar {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(ExactScalar::zero)
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &ExactScalar)> {
        self.data.iter().position(|v| !v.is_zero()).map(|p| (p / self.cols, p % self.cols, &self.data[p]))
    }

    /// True when every nonzero entry `(i, j)` satisfies `-lower <= j - i <= upper`.
    pub fn within_band(&self, lower: usize, upper: usize) -> bool {
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let d = j as i64 - i as i64;
                self[(i, j)].is_zero() || (-(lower as i64) <= d && d <= upper as i64)
            })
        })
    }

    /// Does the `d`-th diagonal (`j - i = d`) have any nonzero entry?
    pub fn diagonal_nonzero(&self, d: i64) -> bool {
        (0..self.rows).any(|i| {
            let j = i as i64 + d;
            j >= 0 && (j as usize) < self.cols && !self[(i, j as usize)].is_zero()
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form of `m` in place; returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..m.cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..m.rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = &f * &m[(r, j)];
                    m[(i, j)] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of the right null space `{v : m v = 0}`.
pub fn nullspace(m: &Matrix) -> Vec<GridVector> {
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ExactScalar::zero(); m.cols];
            v[f] = ExactScalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, f)].clone();
            }
            GridVector(v)
        })
        .collect()
}

/// Unique exact solution of `a x = b`, where `a` may have more rows than
/// columns. Fails if `a` lacks full column rank or the system is
/// inconsistent.
pub fn solve_exact(a: &Matrix, b: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: b.len() });
    }
    let mut aug = Matrix::from_fn(a.rows, a.cols + 1, |i, j| if j < a.cols { a[(i, j)].clone() } else { b[i].clone() });
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&a.cols) {
        return Err(Error::Inconsistent);
    }
    if pivots.len() < a.cols {
        return Err(Error::RankDeficient { rank: pivots.len(), unknowns: a.cols });
    }
    Ok((0..a.cols).map(|i| aug[(i, a.cols)].clone()).collect())
}

/// Solves the square system `a x = b`, reporting singular matrices.
pub fn solve_square(a: &Matrix, b: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows, found: a.cols });
    }
    solve_exact(a, b).map_err(|e| match e {
        Error::RankDeficient { .. } | Error::Inconsistent => Error::SingularSystem,
        other => other,
    })
}

/// Forward substitution for a lower triangular `l`: returns `l^{-1} m`.
pub fn lower_solve(l: &Matrix, m: &Matrix) -> Result<Matrix> {
    let n = l.rows;
    if !l.is_square() || m.rows != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.rows });
    }
    let mut out = Matrix::zeros(n, m.cols);
    for j in 0..m.cols {
        for i in 0..n {
            let mut acc = m[(i, j)].clone();
            for k in 0..i {
                if !l[(i, k)].is_zero() {
                    acc -= &l[(i, k)] * &out[(k, j)];
                }
            }
            if l[(i, i)].is_zero() {
                return Err(Error::SingularSystem);
            }
            out[(i, j)] = acc / &l[(i, i)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{int, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn product_and_identity() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.mul(&Matrix::identity(2)), a);
        assert_eq!(a.mul(&a), m(&[&[7, 10], &[15, 22]]));
        assert_eq!(Matrix::commutator(&a, &a), Matrix::zeros(2, 2));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn overdetermined_solve() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(solve_exact(&a, &[int(2), int(3), int(5)]).unwrap(), vec![int(2), int(3)]);
        assert_eq!(solve_exact(&a, &[int(2), int(3), int(6)]), Err(Error::Inconsistent));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(matches!(solve_exact(&b, &[int(1), int(2)]), Err(Error::RankDeficient { .. })));
        assert_eq!(solve_square(&b, &[int(1), int(2)]), Err(Error::SingularSystem));
    }

    #[test]
    fn forward_substitution() {
        let l = m(&[&[2, 0], &[1, 4]]);
        let x = lower_solve(&l, &Matrix::identity(2)).unwrap();
        assert_eq!(l.mul(&x), Matrix::identity(2));
        assert_eq!(x[(1, 0)], ratio(-1, 8));
    }

    #[test]
    fn band_checks() {
        let a = m(&[&[1, 0, 0], &[5, 2, 0], &[0, 7, 3]]);
        assert!(a.within_band(1, 0));
        assert!(!a.within_band(0, 0));
        assert!(a.diagonal_nonzero(-1));
        assert!(!a.diagonal_nonzero(1));
    }
}
