//! Dense integer matrices and the Smith normal form with unimodular transforms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix{:?}", self.to_rows())
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*x));
            }
        }
        m
    }

    pub fn from_big_rows(rows: usize, cols: usize, entries: Vec<Vec<BigInt>>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in entries.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: &BigInt) {
        self.data[i * self.cols + j] += x;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_dst += c · row_src
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * c;
            if !v.is_zero() {
                self.add_to(dst, j, &v);
            }
        }
    }

    /// col_dst += c · col_src
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * c;
            if !v.is_zero() {
                self.add_to(i, dst, &v);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

/// `U·A·V = D` with `U`, `V` unimodular; inverses are tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    /// Diagonal of `D`, length `min(rows, cols)`, zeros last.
    pub divisors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|d| !d.is_zero()).count()
    }

    /// Rank of the matrix reduced modulo a prime.
    pub fn rank_mod(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.divisors.iter().filter(|d| !d.is_zero() && !(*d % &p).is_zero()).count()
    }
}

struct Reducer {
    d: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_row(dst, src, c);
        self.u.add_row(dst, src, c);
        self.u_inv.add_col(src, dst, &-c);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_col(dst, src, c);
        self.v.add_col(dst, src, c);
        self.v_inv.add_row(src, dst, &-c);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Smallest nonzero |entry| in the lower-right block, ties by (row, col).
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in k..self.d.rows {
            for j in k..self.d.cols {
                let x = self.d.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                if best.as_ref().map_or(true, |(b, _, _)| a < *b) {
                    best = Some((a, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Exact Smith normal form with a fixed pivot rule, so results are reproducible.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows, a.cols);
    let mut r = Reducer {
        d: a.clone(),
        u: IntegerMatrix::identity(rows),
        u_inv: IntegerMatrix::identity(rows),
        v: IntegerMatrix::identity(cols),
        v_inv: IntegerMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    'outer: for k in 0..steps {
        loop {
            let Some((pi, pj)) = r.pivot(k) else {
                break 'outer;
            };
            r.swap_rows(k, pi);
            r.swap_cols(k, pj);
            let pivot = r.d.get(k, k).clone();
            let mut dirty = false;
            for i in k + 1..rows {
                let x = r.d.get(i, k).clone();
                if x.is_zero() {
                    continue;
                }
                let (q, rem) = x.div_rem(&pivot);
                r.add_row(i, k, &-q);
                dirty |= !rem.is_zero();
            }
            for j in k + 1..cols {
                let x = r.d.get(k, j).clone();
                if x.is_zero() {
                    continue;
                }
                let (q, rem) = x.div_rem(&pivot);
                r.add_col(j, k, &-q);
                dirty |= !rem.is_zero();
            }
            if dirty {
                continue;
            }
            let offending = (k + 1..rows).find(|&i| {
                (k + 1..cols).any(|j| !r.d.get(i, j).is_multiple_of(&pivot))
            });
            match offending {
                Some(i) => r.add_row(k, i, &BigInt::one()),
                None => break,
            }
        }
        if r.d.get(k, k).is_negative() {
            r.negate_row(k);
        }
    }
    let divisors = (0..steps).map(|i| r.d.get(i, i).clone()).collect();
    SmithDecomposition { u: r.u, u_inv: r.u_inv, d: r.d, v: r.v, v_inv: r.v_inv, divisors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divisors(rows: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&IntegerMatrix::from_rows(rows))
            .divisors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(divisors(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), vec![1, 1, 1]);
        assert_eq!(divisors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(divisors(&[vec![0, 0], vec![0, 0], vec![0, 0]]), vec![0, 0]);
        assert_eq!(divisors(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn transforms_are_consistent() {
        let a = IntegerMatrix::from_rows(&[vec![4, 6, 2], vec![3, -9, 0]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(2));
        assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(3));
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
    }

    #[test]
    fn bareiss_determinant() {
        let a = IntegerMatrix::from_rows(&[vec![0, 2, 1], vec![3, 1, 4], vec![5, 9, 2]]);
        assert_eq!(a.determinant(), BigInt::from(50));
    }
}
