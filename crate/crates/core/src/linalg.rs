//! Integer matrix normal forms and lattice membership.
//!
//! Entries are arbitrary-precision integers. Smith normal form is computed by
//! elementary row/column operations with a magnitude-minimizing pivot choice,
//! which keeps intermediate growth tame at the matrix sizes this crate deals
//! with. `integer_solve` decides membership of a vector in the column lattice
//! of a matrix, the primitive behind linear-equivalence tests.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Dense integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have the
    /// same length; a ragged input is an input error.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in rows {
            if row.len() != c {
                return Err(Error::input("matrix rows must all have the same length"));
            }
        }
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::input("matrix dimensions incompatible for product"));
        }
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.entry(i, j) + a * rhs.entry(k, j);
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::input("matrix-vector dimensions incompatible"));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = BigInt::zero();
            for j in 0..self.cols {
                acc += self.entry(i, j) * &v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && !self.entry(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Exact determinant via Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::input("determinant requires a square matrix"));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.entry(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.entry(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.entry(i, j) * a.entry(k, k) - a.entry(i, k) * a.entry(k, j);
                    a.set(i, j, num / &prev);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.entry(k, k).clone();
        }
        Ok(a.entry(n - 1, n - 1) * BigInt::from(sign))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = self.entry(dst, j) + c * self.entry(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = self.entry(i, dst) + c * self.entry(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.entry(r, j);
            self.set(r, j, v);
        }
    }
}

/// U * M * V = S with U, V unimodular and S in Smith normal form.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form by pivoting on the entry of least magnitude.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let steps = m.rows().min(m.cols());
    for k in 0..steps {
        'pivot: loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..s.rows() {
                for j in k..s.cols() {
                    if s.entry(i, j).is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => s.entry(i, j).abs() < s.entry(pi, pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break 'pivot };
            if pi != k {
                s.swap_rows(k, pi);
                u.swap_rows(k, pi);
            }
            if pj != k {
                s.swap_cols(k, pj);
                v.swap_cols(k, pj);
            }
            let mut clean = true;
            for i in k + 1..s.rows() {
                let q = s.entry(i, k) / s.entry(k, k);
                if !q.is_zero() {
                    let c = -q;
                    s.add_row_multiple(i, k, &c);
                    u.add_row_multiple(i, k, &c);
                }
                if !s.entry(i, k).is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..s.cols() {
                let q = s.entry(k, j) / s.entry(k, k);
                if !q.is_zero() {
                    let c = -q;
                    s.add_col_multiple(j, k, &c);
                    v.add_col_multiple(j, k, &c);
                }
                if !s.entry(k, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Enforce the divisibility chain: drag a bad entry into row k and
            // keep reducing.
            let mut chain_ok = true;
            'scan: for i in k + 1..s.rows() {
                for j in k + 1..s.cols() {
                    if !(s.entry(i, j) % s.entry(k, k)).is_zero() {
                        let one = BigInt::one();
                        s.add_row_multiple(k, i, &one);
                        u.add_row_multiple(k, i, &one);
                        chain_ok = false;
                        break 'scan;
                    }
                }
            }
            if chain_ok {
                break 'pivot;
            }
        }
    }
    for k in 0..steps {
        if s.entry(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
    }
    SmithDecomposition { u, s, v }
}

/// Finds x with M * x = b, or None when b does not lie in the column lattice
/// of M. Dimensions must agree.
pub fn integer_solve(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.rows() {
        return Err(Error::input(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            m.rows()
        )));
    }
    let dec = smith_normal_form(m);
    solve_with_decomposition(&dec, m.rows(), m.cols(), b)
}

/// Same as [`integer_solve`] but reuses a precomputed decomposition of the
/// matrix, for callers solving against the same matrix many times.
pub fn solve_with_decomposition(
    dec: &SmithDecomposition,
    rows: usize,
    cols: usize,
    b: &[BigInt],
) -> Result<Option<Vec<BigInt>>> {
    if b.len() != rows {
        return Err(Error::input(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            rows
        )));
    }
    let c = dec.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); cols];
    let diag = rows.min(cols);
    for i in 0..rows {
        let s_i = if i < diag {
            dec.s.entry(i, i).clone()
        } else {
            BigInt::zero()
        };
        if s_i.is_zero() {
            if !c[i].is_zero() {
                return Ok(None);
            }
        } else if (&c[i] % &s_i).is_zero() {
            y[i] = &c[i] / &s_i;
        } else {
            return Ok(None);
        }
    }
    Ok(Some(dec.v.mul_vec(&y)?))
}

/// Invariant factors (> 1) of the torsion part of coker(M).
pub fn cokernel_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let dec = smith_normal_form(m);
    let diag = m.rows().min(m.cols());
    let mut out = Vec::new();
    for k in 0..diag {
        let d = dec.s.entry(k, k);
        if d > &BigInt::one() {
            out.push(d.clone());
        }
    }
    out
}

pub fn bigint_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
