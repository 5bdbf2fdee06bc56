//! Two-phase primal simplex over exact rationals with Bland's rule.
//!
//! Solves `min c·z` subject to `A z = b`, `z ≥ 0`. Bland's rule (smallest
//! improving column, smallest basic index among ratio ties) rules out cycling.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, z: Vec<Rational> },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub cost: Vec<Rational>,
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; the last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn width(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over the allowed columns; `false` means unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        let obj = self.m();
        let rhs = self.width();
        loop {
            let Some(c) = (0..allowed).find(|&j| self.t[obj][j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(Rational, usize, usize)> = None;
            for r in 0..obj {
                let a = &self.t[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[r][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((best, _, var)) => ratio < *best || (ratio == *best && self.basis[r] < *var),
                };
                if better {
                    leave = Some((ratio, r, self.basis[r]));
                }
            }
            let Some((_, r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

impl LinearProgram {
    pub fn variables(&self) -> usize {
        self.cost.len()
    }

    pub fn solve(&self) -> LpOutcome {
        let (m, n) = (self.rows.len(), self.variables());
        if m == 0 {
            return if self.cost.iter().any(Signed::is_negative) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal { value: Rational::zero(), z: vec![Rational::zero(); n] }
            };
        }
        // phase one: artificial columns n..n+m, objective = their sum
        let mut t = Vec::with_capacity(m + 1);
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let flip = b.is_negative();
            let mut line: Vec<Rational> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
            line.resize(n + m + 1, Rational::zero());
            line[n + m] = if flip { -b } else { b.clone() };
            t.push(line);
        }
        for (i, line) in t.iter_mut().enumerate() {
            line[n + i] = Rational::from_integer(1.into());
        }
        let mut objective = vec![Rational::zero(); n + m + 1];
        for line in &t {
            for j in 0..n {
                objective[j] -= &line[j];
            }
            objective[n + m] -= &line[n + m];
        }
        t.push(objective);
        let mut tab = Tableau { t, basis: (n..n + m).collect() };
        tab.optimize(n + m);
        if !tab.t[m][n + m].is_zero() {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < tab.m() {
            if tab.basis[r] < n {
                r += 1;
                continue;
            }
            match (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                Some(c) => {
                    tab.pivot(r, c);
                    r += 1;
                }
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
        // phase two with the real costs
        let rows = tab.m();
        let mut objective = vec![Rational::zero(); n + m + 1];
        objective[..n].clone_from_slice(&self.cost);
        for r in 0..rows {
            let cb = self.cost[tab.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for (o, x) in objective.iter_mut().zip(&tab.t[r]) {
                *o -= &cb * x;
            }
        }
        tab.t[rows] = objective;
        if !tab.optimize(n) {
            return LpOutcome::Unbounded;
        }
        let mut z = vec![Rational::zero(); n];
        for (r, &var) in tab.basis.iter().enumerate() {
            z[var] = tab.t[r][n + m].clone();
        }
        let value = -tab.t[rows][n + m].clone();
        LpOutcome::Optimal { value, z }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn lp(rows: &[&[i64]], rhs: &[i64], cost: &[i64]) -> LinearProgram {
        LinearProgram {
            rows: rows.iter().map(|r| r.iter().map(|x| rat(*x)).collect()).collect(),
            rhs: rhs.iter().map(|x| rat(*x)).collect(),
            cost: cost.iter().map(|x| rat(*x)).collect(),
        }
    }

    #[test]
    fn small_programs() {
        // min -x - y s.t. x + 2y + s = 4, 3x + y + t = 6
        let p = lp(&[&[1, 2, 1, 0], &[3, 1, 0, 1]], &[4, 6], &[-1, -1, 0, 0]);
        match p.solve() {
            LpOutcome::Optimal { value, z } => {
                assert_eq!(value, ratio(-14, 5));
                assert_eq!((z[0].clone(), z[1].clone()), (ratio(8, 5), ratio(6, 5)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(lp(&[&[1, 1]], &[-1], &[1, 1]).solve(), LpOutcome::Infeasible);
        assert_eq!(lp(&[&[1, -1]], &[0], &[-1, 0]).solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_degeneracy() {
        let p = lp(&[&[1, 1, 0], &[2, 2, 0], &[0, 1, 1]], &[2, 4, 1], &[1, 2, 3]);
        match p.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(3)),
            other => panic!("{other:?}"),
        }
    }
}
