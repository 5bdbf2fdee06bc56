//! Support-size minimisation over `base + span(gens)` with ℤ or ℚ coefficients.
//!
//! Coordinates are visited in order and either forced to zero or left free.
//! A forced set `S` is feasible when `G_S y = −base_S` is solvable; once `G_S`
//! has full column rank the point is determined and the subtree collapses to it.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::homology::{smith_normal_form, solve_with_smith, IntegerMatrix};
use crate::rational::Rational;
use crate::rings::Scalars;

pub(crate) struct SupportSolution {
    pub support: usize,
    pub x: Vec<Rational>,
    pub optimal: bool,
    pub nodes: u64,
}

struct Search<'a> {
    base: &'a [Rational],
    gens: &'a [Vec<BigInt>],
    scalars: Scalars,
    best: (usize, Vec<Rational>),
    nodes: u64,
    budget: u64,
    exhausted: bool,
    any_witness: bool,
}

impl Search<'_> {
    fn point(&self, y: &[Rational]) -> Vec<Rational> {
        let mut x = self.base.to_vec();
        for (g, yi) in self.gens.iter().zip(y) {
            for (xj, gj) in x.iter_mut().zip(g) {
                *xj += yi * Rational::from_integer(gj.clone());
            }
        }
        x
    }

    /// A solution of `G_S y = −base_S` and whether it is unique.
    fn solve(&self, zeros: &[usize]) -> Option<(Vec<Rational>, bool)> {
        let r = self.gens.len();
        let mut a = IntegerMatrix::zeros(zeros.len(), r);
        for (row, &j) in zeros.iter().enumerate() {
            for (i, g) in self.gens.iter().enumerate() {
                a.set(row, i, g[j].clone());
            }
        }
        let b: Vec<Rational> = zeros.iter().map(|&j| -self.base[j].clone()).collect();
        let smith = smith_normal_form(&a);
        let unique = smith.rank() == r;
        solve_with_smith(&smith, &b, self.scalars).map(|y| (y, unique))
    }

    fn offer(&mut self, x: Vec<Rational>) {
        let support = x.iter().filter(|q| !q.is_zero()).count();
        let better = support < self.best.0 || (!self.any_witness && support == self.best.0 && x < self.best.1);
        if better {
            self.best = (support, x);
        }
    }

    fn prunes(&self, bound: usize) -> bool {
        if self.any_witness {
            bound >= self.best.0
        } else {
            bound > self.best.0
        }
    }

    fn visit(&mut self, j: usize, zeros: &mut Vec<usize>, free: usize) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if j == self.base.len() || self.prunes(free) {
            return;
        }
        zeros.push(j);
        if let Some((y, unique)) = self.solve(zeros) {
            let x = self.point(&y);
            self.offer(x);
            if !unique {
                self.visit(j + 1, zeros, free);
            }
        }
        zeros.pop();
        self.visit(j + 1, zeros, free + 1);
    }
}

pub(crate) fn minimize_support(
    base: &[Rational],
    gens: &[Vec<BigInt>],
    scalars: Scalars,
    budget: u64,
    any_witness: bool,
) -> SupportSolution {
    let start = base.iter().filter(|q| !q.is_zero()).count();
    let mut search = Search {
        base,
        gens,
        scalars,
        best: (start, base.to_vec()),
        nodes: 0,
        budget,
        exhausted: false,
        any_witness,
    };
    if !gens.is_empty() {
        search.visit(0, &mut Vec::new(), 0);
    }
    let (support, x) = search.best;
    SupportSolution { support, x, optimal: !search.exhausted, nodes: search.nodes.max(1) }
}
