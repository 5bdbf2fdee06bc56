//! ℓ¹ minimisation with the absolute value: an exact LP over ℚ, and
//! branch-and-bound on the lattice coordinates over ℤ using the LP bound.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::simplex::{LinearProgram, LpOutcome};
use crate::rational::Rational;

/// Optional lower and upper bounds on one lattice coordinate.
type Bounds = Vec<(Option<BigInt>, Option<BigInt>)>;

pub(crate) struct L1Solution {
    pub value: Rational,
    pub x: Vec<Rational>,
    pub optimal: bool,
    pub nodes: u64,
}

/// `min Σ_j |base_j + Σ_i y_i g_i[j]|` over real `y` within the bounds.
fn relaxation(base: &[Rational], gens: &[Vec<BigInt>], bounds: &Bounds) -> Option<(Rational, Vec<Rational>)> {
    let (n, r) = (base.len(), gens.len());
    let extra: usize = bounds.iter().map(|(lo, hi)| usize::from(lo.is_some()) + usize::from(hi.is_some())).sum();
    let width = 2 * n + 2 * r + extra;
    let zero = Rational::zero;
    let one = || Rational::from_integer(1.into());
    let mut lp = LinearProgram::default();
    for j in 0..n {
        let mut row = vec![zero(); width];
        row[j] = one();
        row[n + j] = -one();
        for (i, g) in gens.iter().enumerate() {
            let gij = Rational::from_integer(g[j].clone());
            row[2 * n + i] = -gij.clone();
            row[2 * n + r + i] = gij;
        }
        lp.rows.push(row);
        lp.rhs.push(base[j].clone());
    }
    let mut slack = 2 * n + 2 * r;
    for (i, (lo, hi)) in bounds.iter().enumerate() {
        for (limit, sign) in [(lo, -1), (hi, 1)] {
            let Some(limit) = limit else { continue };
            let mut row = vec![zero(); width];
            row[2 * n + i] = one();
            row[2 * n + r + i] = -one();
            row[slack] = Rational::from_integer(sign.into());
            slack += 1;
            lp.rows.push(row);
            lp.rhs.push(Rational::from_integer(limit.clone()));
        }
    }
    lp.cost = (0..width).map(|k| if k < 2 * n { one() } else { zero() }).collect();
    match lp.solve() {
        LpOutcome::Optimal { value, z } => {
            let y = (0..r).map(|i| &z[2 * n + i] - &z[2 * n + r + i]).collect();
            Some((value, y))
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("the ℓ¹ objective is bounded below"),
    }
}

fn point(base: &[Rational], gens: &[Vec<BigInt>], y: &[Rational]) -> Vec<Rational> {
    let mut x = base.to_vec();
    for (g, yi) in gens.iter().zip(y) {
        for (xj, gj) in x.iter_mut().zip(g) {
            *xj += yi * Rational::from_integer(gj.clone());
        }
    }
    x
}

fn l1(x: &[Rational]) -> Rational {
    x.iter().map(Signed::abs).sum()
}

/// Exact minimum over rational `y`.
pub(crate) fn minimize_rational(base: &[Rational], gens: &[Vec<BigInt>]) -> L1Solution {
    let (value, y) = relaxation(base, gens, &vec![(None, None); gens.len()]).expect("unconstrained LP is feasible");
    let x = point(base, gens, &y);
    debug_assert_eq!(l1(&x), value);
    L1Solution { value, x, optimal: true, nodes: 1 }
}

struct Search<'a> {
    base: &'a [Rational],
    gens: &'a [Vec<BigInt>],
    best: (Rational, Vec<Rational>),
    nodes: u64,
    budget: u64,
    exhausted: bool,
    any_witness: bool,
}

impl Search<'_> {
    fn offer(&mut self, y: &[Rational]) {
        let x = point(self.base, self.gens, y);
        let value = l1(&x);
        let better = value < self.best.0 || (!self.any_witness && value == self.best.0 && x < self.best.1);
        if better {
            self.best = (value, x);
        }
    }

    fn prunes(&self, bound: &Rational) -> bool {
        if self.any_witness {
            *bound >= self.best.0
        } else {
            *bound > self.best.0
        }
    }

    fn node(&mut self, bounds: &mut Bounds) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        let Some((value, y)) = relaxation(self.base, self.gens, bounds) else {
            return;
        };
        if self.prunes(&value.ceil()) {
            return;
        }
        let rounded: Vec<Rational> = y.iter().map(Rational::round).collect();
        self.offer(&rounded);
        // the most fractional coordinate, ties by index
        let mut pick: Option<(Rational, usize)> = None;
        for (i, yi) in y.iter().enumerate() {
            let f = yi - yi.floor();
            let dist = if f > Rational::new(1.into(), 2.into()) { Rational::from_integer(1.into()) - f } else { f };
            if !dist.is_zero() && pick.as_ref().map_or(true, |(d, _)| dist > *d) {
                pick = Some((dist, i));
            }
        }
        let Some((_, i)) = pick else {
            return;
        };
        let floor = y[i].floor().to_integer();
        let saved = bounds[i].clone();
        bounds[i].1 = Some(saved.1.clone().map_or(floor.clone(), |h| h.min(floor.clone())));
        self.node(bounds);
        bounds[i] = saved.clone();
        let up: BigInt = &floor + 1;
        bounds[i].0 = Some(saved.0.clone().map_or(up.clone(), |l| l.max(up.clone())));
        self.node(bounds);
        bounds[i] = saved;
    }
}

/// Minimum over integral `y` by depth-first branch-and-bound.
pub(crate) fn minimize_integral(base: &[Rational], gens: &[Vec<BigInt>], budget: u64, any_witness: bool) -> L1Solution {
    debug_assert!(base.iter().all(|q| q.is_integer()));
    let mut search = Search {
        base,
        gens,
        best: (l1(base), base.to_vec()),
        nodes: 0,
        budget,
        exhausted: false,
        any_witness,
    };
    search.node(&mut vec![(None, None); gens.len()]);
    let (value, x) = search.best;
    L1Solution { value, x, optimal: !search.exhausted, nodes: search.nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn gens(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|g| g.iter().map(|x| BigInt::from(*x)).collect()).collect()
    }

    #[test]
    fn rational_and_integral_minima() {
        // x = (1 + 2y, 1 − 2y, 2y): both minima sit at y = 0
        let base = vec![rat(1), rat(1), rat(0)];
        let g = gens(&[&[2, -2, 2]]);
        let q = minimize_rational(&base, &g);
        assert_eq!(q.value, rat(2));
        let z = minimize_integral(&base, &g, 1000, false);
        assert_eq!(z.value, rat(2));
        assert!(z.optimal);

        let base = vec![rat(3), rat(0), rat(0)];
        let g = gens(&[&[2, 1, 0], &[2, 0, 1]]);
        let q = minimize_rational(&base, &g);
        assert_eq!(q.value, ratio(3, 2));
        let z = minimize_integral(&base, &g, 1000, false);
        assert_eq!(z.value, rat(2));
        assert!(z.x == vec![rat(1), rat(-1), rat(0)] || z.x == vec![rat(1), rat(0), rat(-1)]);
    }

    #[test]
    fn tiny_budget_is_not_optimal() {
        let base = vec![rat(7), rat(0)];
        let g = gens(&[&[3, 1]]);
        assert!(!minimize_integral(&base, &g, 0, false).optimal);
        assert_eq!(minimize_integral(&base, &g, 100, false).value, rat(3));
    }
}
