//! Sparse integer matrices and exact Smith normal form.
//!
//! Everything here is arbitrary-precision: the chain-level matrices only
//! carry entries in `{-1, 0, 1}`, but Smith reduction can grow coefficients
//! and exactness is non-negotiable downstream.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Integer matrix stored as `(row, column, value)` triplets with no explicit
/// zeros, sorted by `(column, row)`.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseIntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
}

impl SparseIntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, BigInt)>) -> Self {
        let mut entries: Vec<_> = entries.into_iter().filter(|(_, _, v)| !v.is_zero()).collect();
        for &(r, c, _) in &entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of range");
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));
        SparseIntegerMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntegerMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(usize, usize, BigInt)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nonzeros_in_col(&self, c: usize) -> usize {
        self.entries.iter().filter(|&&(_, ec, _)| ec == c).count()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zero(self.rows, self.cols);
        for (r, c, v) in &self.entries {
            m.data[*r][*c] = v.clone();
        }
        m
    }

    /// Matrix product `self * rhs`, exact.
    pub fn multiply(&self, rhs: &SparseIntegerMatrix) -> SparseIntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut acc: std::collections::BTreeMap<(usize, usize), BigInt> =
            std::collections::BTreeMap::new();
        // index lhs entries by column
        let mut by_col: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            by_col[*c].push((*r, v));
        }
        for (k, c, v) in &rhs.entries {
            for (r, lv) in &by_col[*k] {
                let e = acc.entry((*r, *c)).or_insert_with(BigInt::zero);
                *e += *lv * v;
            }
        }
        SparseIntegerMatrix::new(
            self.rows,
            rhs.cols,
            acc.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        )
    }
}

impl fmt::Debug for SparseIntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} {:?}", self.rows, self.cols, self.entries)
    }
}

/// Dense arbitrary-precision matrix, the working form for Smith reduction.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<BigInt>>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        debug_assert!(rows.iter().all(|row| row.len() == c));
        DenseMatrix { rows: r, cols: c, data: rows }
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.data[r][c].clone()).collect()
    }

    pub fn multiply(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = DenseMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.data[k][j].is_zero() {
                        continue;
                    }
                    let prod = &self.data[i][k] * &rhs.data[k][j];
                    out.data[i][j] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self.data[i][j] * &v[j])
                    .sum::<BigInt>()
            })
            .collect()
    }

    pub fn to_sparse(&self) -> SparseIntegerMatrix {
        let mut entries = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self.data[r][c].is_zero() {
                    entries.push((r, c, self.data[r][c].clone()));
                }
            }
        }
        SparseIntegerMatrix::new(self.rows, self.cols, entries)
    }
}

/// Result of Smith reduction `S = U * M * V` with `U`, `V` unimodular.
pub struct SmithDecomposition {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`, all positive.
    pub divisors: Vec<BigInt>,
    pub rank: usize,
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    pub v_inv: DenseMatrix,
}

impl SmithDecomposition {
    /// A basis of the integer kernel of `M` (as column vectors): the last
    /// `cols - rank` columns of `V`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.v.cols).map(|c| self.v.column(c)).collect()
    }

    /// Coordinates of `x` in the kernel basis, provided `M x = 0`.
    ///
    /// Returns `None` when `x` is not in the kernel.
    pub fn kernel_coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = self.v_inv.mul_vec(x);
        if y[..self.rank].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(y[self.rank..].to_vec())
    }

    /// Does the column lattice of `M` contain `b`? (Solvability of
    /// `M x = b` over the integers.)
    pub fn lattice_contains(&self, b: &[BigInt]) -> bool {
        let y = self.u.mul_vec(b);
        for (i, yi) in y.iter().enumerate() {
            if i < self.rank {
                if !(yi % &self.divisors[i]).is_zero() {
                    return false;
                }
            } else if !yi.is_zero() {
                return false;
            }
        }
        true
    }
}

/// The spec-facing Smith normal form: divisor list and rank.
pub fn smith_normal_form(m: &SparseIntegerMatrix) -> (Vec<BigInt>, usize) {
    let d = smith_decompose(&m.to_dense());
    let rank = d.rank;
    (d.divisors, rank)
}

/// Full Smith reduction with transforms. Pivoting picks the nonzero entry
/// of minimal absolute value to limit coefficient growth.
pub fn smith_decompose(m: &DenseMatrix) -> SmithDecomposition {
    let mut s = m.clone();
    let (rows, cols) = (s.rows, s.cols);
    let mut u = DenseMatrix::identity(rows);
    let mut v = DenseMatrix::identity(cols);
    let mut v_inv = DenseMatrix::identity(cols);

    let mut k = 0;
    while k < rows.min(cols) {
        // minimal-absolute-value pivot in the trailing submatrix
        let Some((pi, pj)) = min_abs_pivot(&s, k) else {
            break;
        };
        swap_rows(&mut s, &mut u, k, pi);
        swap_cols(&mut s, &mut v, &mut v_inv, k, pj);
        if s.data[k][k].is_negative() {
            negate_row(&mut s, &mut u, k);
        }
        loop {
            let mut clean = true;
            for i in k + 1..rows {
                if s.data[i][k].is_zero() {
                    continue;
                }
                let q = &s.data[i][k] / &s.data[k][k];
                if !q.is_zero() {
                    row_sub(&mut s, &mut u, i, k, &q);
                }
                if !s.data[i][k].is_zero() {
                    // remainder became the smaller pivot; swap it up
                    swap_rows(&mut s, &mut u, k, i);
                    if s.data[k][k].is_negative() {
                        negate_row(&mut s, &mut u, k);
                    }
                    clean = false;
                }
            }
            for j in k + 1..cols {
                if s.data[k][j].is_zero() {
                    continue;
                }
                let q = &s.data[k][j] / &s.data[k][k];
                if !q.is_zero() {
                    col_sub(&mut s, &mut v, &mut v_inv, j, k, &q);
                }
                if !s.data[k][j].is_zero() {
                    swap_cols(&mut s, &mut v, &mut v_inv, k, j);
                    if s.data[k][k].is_negative() {
                        negate_row(&mut s, &mut u, k);
                    }
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&s.data[i][j] % &s.data[k][k]).is_zero() {
                        row_add(&mut s, &mut u, k, i);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        k += 1;
    }

    let rank = k;
    let divisors = (0..rank).map(|i| s.data[i][i].clone()).collect();
    SmithDecomposition {
        divisors,
        rank,
        u,
        v,
        v_inv,
    }
}

fn min_abs_pivot(s: &DenseMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..s.rows {
        for j in k..s.cols {
            let val = &s.data[i][j];
            if val.is_zero() {
                continue;
            }
            let a = val.abs();
            match &best {
                Some((_, _, cur)) if *cur <= a => {}
                _ => best = Some((i, j, a)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_rows(s: &mut DenseMatrix, u: &mut DenseMatrix, a: usize, b: usize) {
    if a != b {
        s.data.swap(a, b);
        u.data.swap(a, b);
    }
}

fn swap_cols(s: &mut DenseMatrix, v: &mut DenseMatrix, v_inv: &mut DenseMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in &mut s.data {
        row.swap(a, b);
    }
    for row in &mut v.data {
        row.swap(a, b);
    }
    v_inv.data.swap(a, b);
}

fn negate_row(s: &mut DenseMatrix, u: &mut DenseMatrix, r: usize) {
    for x in &mut s.data[r] {
        *x = -std::mem::take(x);
    }
    for x in &mut u.data[r] {
        *x = -std::mem::take(x);
    }
}

/// row_i -= q * row_k
fn row_sub(s: &mut DenseMatrix, u: &mut DenseMatrix, i: usize, k: usize, q: &BigInt) {
    for j in 0..s.cols {
        let t = q * &s.data[k][j];
        s.data[i][j] -= t;
    }
    for j in 0..u.cols {
        let t = q * &u.data[k][j];
        u.data[i][j] -= t;
    }
}

/// row_k += row_i
fn row_add(s: &mut DenseMatrix, u: &mut DenseMatrix, k: usize, i: usize) {
    for j in 0..s.cols {
        let t = s.data[i][j].clone();
        s.data[k][j] += t;
    }
    for j in 0..u.cols {
        let t = u.data[i][j].clone();
        u.data[k][j] += t;
    }
}

/// col_j -= q * col_k, with the inverse op applied to v_inv on the left
fn col_sub(s: &mut DenseMatrix, v: &mut DenseMatrix, v_inv: &mut DenseMatrix, j: usize, k: usize, q: &BigInt) {
    for row in &mut s.data {
        let t = q * &row[k];
        row[j] -= t;
    }
    for row in &mut v.data {
        let t = q * &row[k];
        row[j] -= t;
    }
    // (C^{-1}) adds q * row_j to row_k of v_inv
    for c in 0..v_inv.cols {
        let t = q * &v_inv.data[j][c];
        v_inv.data[k][c] += t;
    }
}
