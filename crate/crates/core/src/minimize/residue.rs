//! Search over a finite coset `base + Σ y_i g_i` in `(ℤ/q)^n`, `q = p^m`.
//!
//! Costs are integers: the trivial seminorm counts nonzero entries and the
//! quotient seminorm `p^{-v}` is scaled by `p^{m-1}`. Both the exhaustive
//! and the depth-first search only discard subtrees whose bound is strictly
//! above the incumbent, so every optimal point is visited and the
//! lexicographically least one wins regardless of thread scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CostKind {
    Trivial,
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SearchMode {
    Exhaustive,
    BranchAndBound,
}

#[derive(Clone, Debug)]
pub(crate) struct ResidueProblem {
    pub p: u64,
    pub m: u32,
    pub base: Vec<u64>,
    /// Generators reduced mod `q` together with their additive orders.
    pub gens: Vec<(Vec<u64>, u64)>,
    pub kind: CostKind,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct ResiduePoint {
    pub cost: u128,
    pub x: Vec<u64>,
    pub digits: Vec<u64>,
}

#[derive(Clone, Debug)]
pub(crate) struct ResidueOutcome {
    pub best: ResiduePoint,
    pub nodes: u64,
    pub complete: bool,
}

pub(crate) struct SearchLimits {
    pub nodes: u64,
    pub threads: usize,
    /// Prune ties too and keep the first optimum found.
    pub any_witness: bool,
}

impl ResidueProblem {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// The factor turning integer costs back into seminorm values.
    pub fn scale(&self) -> u128 {
        match self.kind {
            CostKind::Trivial => 1,
            CostKind::Quotient => u128::from(self.p).pow(self.m - 1),
        }
    }

    fn entry_cost(&self, x: u64) -> u128 {
        if x == 0 {
            return 0;
        }
        match self.kind {
            CostKind::Trivial => 1,
            CostKind::Quotient => {
                let mut v = 0;
                let mut y = x;
                while y % self.p == 0 {
                    y /= self.p;
                    v += 1;
                }
                u128::from(self.p).pow(self.m - 1 - v)
            }
        }
    }

    pub fn cost(&self, x: &[u64]) -> u128 {
        x.iter().map(|&v| self.entry_cost(v)).sum()
    }

    /// log₂ of the number of coset points.
    pub fn log2_size(&self) -> f64 {
        self.gens.iter().map(|(_, o)| (*o as f64).log2()).sum()
    }

    fn add(&self, x: &mut [u64], g: &[u64]) {
        let q = self.modulus();
        for (a, b) in x.iter_mut().zip(g) {
            if *b != 0 {
                *a = ((u128::from(*a) + u128::from(*b)) % u128::from(q)) as u64;
            }
        }
    }

    /// Coordinates touched by generators `i..`, for each `i`.
    fn touched_from(&self) -> Vec<Vec<bool>> {
        let n = self.base.len();
        let mut out = vec![vec![false; n]; self.gens.len() + 1];
        for i in (0..self.gens.len()).rev() {
            let mut t = out[i + 1].clone();
            for (j, g) in self.gens[i].0.iter().enumerate() {
                if *g != 0 {
                    t[j] = true;
                }
            }
            out[i] = t;
        }
        out
    }

    pub fn solve(&self, mode: SearchMode, limits: &SearchLimits) -> ResidueOutcome {
        let start = ResiduePoint { cost: self.cost(&self.base), x: self.base.clone(), digits: vec![0; self.gens.len()] };
        let shared = Shared {
            incumbent: Mutex::new(start),
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
            touched: self.touched_from(),
            limits,
        };
        if self.gens.is_empty() {
            shared.nodes.store(1, Ordering::Relaxed);
        } else {
            let threads = limits.threads.max(1).min(self.gens[0].1.min(usize::MAX as u64) as usize);
            let worker = |w: usize| {
                let mut x = self.base.clone();
                let mut digits = vec![0; self.gens.len()];
                let (g0, order) = &self.gens[0];
                for v in 0..*order {
                    if v as usize % threads == w {
                        digits[0] = v;
                        match mode {
                            SearchMode::Exhaustive => self.enumerate(1, &mut x, &mut digits, &shared),
                            SearchMode::BranchAndBound => self.branch(1, &mut x, &mut digits, &shared),
                        }
                    }
                    self.add(&mut x, g0);
                }
            };
            if threads == 1 {
                worker(0);
            } else {
                std::thread::scope(|s| {
                    for w in 0..threads {
                        let worker = &worker;
                        s.spawn(move || worker(w));
                    }
                });
            }
        }
        ResidueOutcome {
            best: shared.incumbent.into_inner().expect("incumbent lock"),
            nodes: shared.nodes.load(Ordering::Relaxed),
            complete: !shared.exhausted.load(Ordering::Relaxed),
        }
    }

    fn enumerate(&self, i: usize, x: &mut Vec<u64>, digits: &mut Vec<u64>, shared: &Shared) {
        if !shared.tick() {
            return;
        }
        if i == self.gens.len() {
            shared.offer(self.cost(x), x, digits);
            return;
        }
        let (g, order) = &self.gens[i];
        for v in 0..*order {
            digits[i] = v;
            self.enumerate(i + 1, x, digits, shared);
            self.add(x, g);
        }
        digits[i] = 0;
    }

    fn branch(&self, i: usize, x: &mut Vec<u64>, digits: &mut Vec<u64>, shared: &Shared) {
        if !shared.tick() {
            return;
        }
        if i == self.gens.len() {
            shared.offer(self.cost(x), x, digits);
            return;
        }
        let fixed: u128 = x
            .iter()
            .zip(&shared.touched[i])
            .filter(|(_, t)| !**t)
            .map(|(v, _)| self.entry_cost(*v))
            .sum();
        if shared.prunes(fixed) {
            return;
        }
        let (g, order) = &self.gens[i];
        for v in 0..*order {
            digits[i] = v;
            self.branch(i + 1, x, digits, shared);
            self.add(x, g);
        }
        digits[i] = 0;
    }
}

struct Shared<'a> {
    incumbent: Mutex<ResiduePoint>,
    nodes: AtomicU64,
    exhausted: AtomicBool,
    touched: Vec<Vec<bool>>,
    limits: &'a SearchLimits,
}

impl Shared<'_> {
    /// Counts a node; `false` once the budget is spent.
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.limits.nodes {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn prunes(&self, bound: u128) -> bool {
        let best = self.incumbent.lock().expect("incumbent lock").cost;
        if self.limits.any_witness {
            bound >= best
        } else {
            bound > best
        }
    }

    fn offer(&self, cost: u128, x: &[u64], digits: &[u64]) {
        let mut best = self.incumbent.lock().expect("incumbent lock");
        let better = cost < best.cost || (!self.limits.any_witness && cost == best.cost && x < best.x.as_slice());
        if better {
            *best = ResiduePoint { cost, x: x.to_vec(), digits: digits.to_vec() };
        }
    }
}
