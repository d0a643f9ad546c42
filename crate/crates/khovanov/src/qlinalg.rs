//! Exact rational linear algebra for the homology-level skein checks.
//!
//! Small dense matrices over `BigRational`: rank, nullspace, solving, and
//! homology bases with projection onto chosen representatives.

use crate::matrix::SparseIntegerMatrix;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![vec![Q::zero(); cols]; rows],
        }
    }

    pub fn from_sparse(m: &SparseIntegerMatrix) -> Self {
        let mut q = QMat::zero(m.rows, m.cols);
        for (r, c, v) in m.entries() {
            q.data[*r][*c] = Q::from_integer(v.clone());
        }
        q
    }

    pub fn from_columns(cols: &[Vec<Q>], rows: usize) -> Self {
        let mut q = QMat::zero(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                q.data[r][c] = v.clone();
            }
        }
        q
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.data[r][c].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .fold(Q::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    pub fn multiply(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = QMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.data[k][j].is_zero() {
                        continue;
                    }
                    let p = &self.data[i][k] * &rhs.data[k][j];
                    out.data[i][j] += p;
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        row_echelon(&mut self.clone().data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Q::is_zero))
    }

    /// A basis of the right nullspace, as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone().data;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].recip();
            for x in &mut m[row] {
                *x *= &inv;
            }
            for r in 0..self.rows {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..self.cols {
                        let t = &f * &m[row][c];
                        m[r][c] -= t;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for &(pr, pc) in &pivots {
                v[pc] = -m[pr][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut m: Vec<Vec<Q>> = self
            .data
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        let n = self.cols;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(p) = (row..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = m[row][col].recip();
            for x in &mut m[row] {
                *x *= &inv;
            }
            for r in 0..self.rows {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..=n {
                        let t = &f * &m[row][c];
                        m[r][c] -= t;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
            if row == self.rows {
                break;
            }
        }
        // inconsistent when a zero row has nonzero rhs
        for r in row..self.rows {
            if !m[r][n].is_zero() {
                return None;
            }
        }
        let mut x = vec![Q::zero(); n];
        for &(pr, pc) in &pivots {
            x[pc] = m[pr][n].clone();
        }
        Some(x)
    }
}

/// A growing linearly independent set kept in reduced echelon form, for
/// cheap incremental independence tests.
struct EchelonSpan {
    /// `(pivot index, vector normalized to 1 at the pivot)`.
    rows: Vec<(usize, Vec<Q>)>,
}

impl EchelonSpan {
    fn new() -> Self {
        EchelonSpan { rows: Vec::new() }
    }

    /// Insert `v` if independent of the current span; returns whether it was.
    fn try_insert(&mut self, mut v: Vec<Q>) -> bool {
        for (p, u) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(u) {
                    let t = &f * y;
                    *x -= t;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in &mut v {
            *x *= &inv;
        }
        self.rows.push((p, v));
        true
    }
}

fn row_echelon(m: &mut Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for x in &mut m[rank] {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..cols {
                    let t = &f * &m[rank][c];
                    m[r][c] -= t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rational homology of one cell, with representative cycles and projection.
pub struct QCellHomology {
    /// Representative cycles, a basis of the homology.
    pub reps: Vec<Vec<Q>>,
    /// `[boundary basis | reps]`, the solve target for projections.
    frame: QMat,
    boundary_count: usize,
}

impl QCellHomology {
    /// Homology of `ker(outgoing) / im(incoming)` with chosen representatives.
    pub fn new(outgoing: &QMat, incoming: &QMat) -> Self {
        let chain_dim = outgoing.cols;
        debug_assert_eq!(incoming.rows, chain_dim);
        let mut span = EchelonSpan::new();
        // a column basis of the boundary space
        let mut boundary_basis: Vec<Vec<Q>> = Vec::new();
        for c in 0..incoming.cols {
            let col = incoming.column(c);
            if span.try_insert(col.clone()) {
                boundary_basis.push(col);
            }
        }
        // extend the boundary basis to a basis of the cycle space; the
        // extending cycles represent homology classes
        let mut reps: Vec<Vec<Q>> = Vec::new();
        for z in outgoing.nullspace() {
            if span.try_insert(z.clone()) {
                reps.push(z);
            }
        }
        let mut frame_cols = boundary_basis.clone();
        frame_cols.extend(reps.iter().cloned());
        let frame = QMat::from_columns(&frame_cols, chain_dim);
        QCellHomology {
            reps,
            frame,
            boundary_count: boundary_basis.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Express the class of the cycle `z` in the representative basis;
    /// `None` when `z` is not a cycle of this cell.
    pub fn try_project(&self, z: &[Q]) -> Option<Vec<Q>> {
        if self.reps.is_empty() {
            return if z.iter().all(Q::is_zero) || self.frame.solve(z).is_some() {
                Some(Vec::new())
            } else {
                None
            };
        }
        let x = self.frame.solve(z)?;
        Some(x[self.boundary_count..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    fn mat(rows: &[&[i64]]) -> QMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = QMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.data[i][j] = q(v);
            }
        }
        m
    }

    #[test]
    fn rank_and_nullspace() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(Q::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = mat(&[&[1, 1], &[0, 1]]);
        let x = m.solve(&[q(3), q(1)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(3), q(1)]);
        let singular = mat(&[&[1, 1], &[1, 1]]);
        assert!(singular.solve(&[q(0), q(1)]).is_none());
    }

    #[test]
    fn cell_homology_of_a_point() {
        // 0 -> Q^2 -> 0: homology has dimension 2
        let h = QCellHomology::new(&QMat::zero(0, 2), &QMat::zero(2, 0));
        assert_eq!(h.dim(), 2);
        let coords = h.try_project(&[q(5), q(7)]).unwrap();
        assert_eq!(coords.len(), 2);
    }

    #[test]
    fn cell_homology_with_boundary() {
        // C = Q^2, boundary image = span{(1,1)}, no outgoing differential
        let incoming = mat(&[&[1], &[1]]);
        let h = QCellHomology::new(&QMat::zero(0, 2), &incoming);
        assert_eq!(h.dim(), 1);
        // (1,1) is a boundary: projects to zero
        assert!(h.try_project(&[q(1), q(1)]).unwrap().iter().all(Q::is_zero));
        // (1,0) + (0,1) = (1,1) is a boundary, so the classes are opposite
        let a = h.try_project(&[q(1), q(0)]).unwrap();
        let b = h.try_project(&[q(0), q(1)]).unwrap();
        assert_eq!(a.len(), 1);
        assert!(!a[0].is_zero());
        assert_eq!(a[0], -b[0].clone());
    }
}
