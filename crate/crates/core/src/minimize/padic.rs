//! The ℓ¹ minimum with `|·|_p` over `ℤ_(p)` and over `ℚ`.
//!
//! Over `ℤ_(p)` the quotient minima `L_K` over `ℤ/p^K` are lower bounds that
//! never decrease in `K`. Each level-`K` minimiser is lifted to an honest
//! point, and the entries it sends to `0 mod p^K` are then zeroed exactly by
//! moving inside `p^K`-multiples of the image, which leaves every other
//! entry's valuation untouched. Once a lift attains `L_K` the value is proved.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::residue::{CostKind, ResidueProblem, SearchLimits, SearchMode};
use crate::homology::{solve_linear, IntegerMatrix};
use crate::rational::{self, int_valuation, reduce_mod, Rational};
use crate::rings::{p_power, padic_valuation, Scalars};

pub(crate) struct PadicSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    pub optimal: bool,
    pub nodes: u64,
}

pub(crate) struct PadicLimits {
    pub nodes: u64,
    pub threads: usize,
    pub any_witness: bool,
    /// log₂ of the largest coset searched exhaustively.
    pub exhaustive_log2: f64,
}

fn padic_norm(x: &Rational, p: u64) -> Rational {
    match padic_valuation(x, p) {
        None => Rational::zero(),
        Some(v) => p_power(p, -v),
    }
}

pub(crate) fn padic_l1(x: &[Rational], p: u64) -> Rational {
    x.iter().map(|q| padic_norm(q, p)).sum()
}

fn to_u64(x: &BigInt) -> u64 {
    u64::try_from(x).expect("residue fits in u64")
}

/// The largest `K` with `p^K` comfortably inside `u64`.
fn max_level(p: u64) -> u32 {
    let mut k = 1;
    while (p as u128).pow(k + 1) < (1u128 << 62) {
        k += 1;
    }
    k
}

/// Minimum of `Σ_j |x_j|_p` over `x ∈ base + Σ ℤ_(p)·gens`; `base` must lie in `ℤ_(p)^n`.
pub(crate) fn minimize_localized(base: &[Rational], gens: &[Vec<BigInt>], p: u64, limits: &PadicLimits) -> PadicSolution {
    let mut best = (padic_l1(base, p), base.to_vec());
    let mut nodes = 0u64;
    let offer = |best: &mut (Rational, Vec<Rational>), x: Vec<Rational>| {
        let value = padic_l1(&x, p);
        if value < best.0 || (!limits.any_witness && value == best.0 && x < best.1) {
            *best = (value, x);
        }
    };
    if gens.is_empty() || best.0.is_zero() {
        return PadicSolution { value: best.0, x: best.1, optimal: true, nodes: 1 };
    }
    let valuations: Vec<u32> = gens.iter().map(|g| g.iter().filter(|x| !x.is_zero()).map(|x| int_valuation(x, p)).min().unwrap_or(0)).collect();
    for k in 1..=max_level(p) {
        let q = rational::pow(p, k);
        let residue = |x: &Rational| to_u64(&reduce_mod(x, &q).expect("p-integral"));
        let mut kept = Vec::new();
        let mut lifts = Vec::new();
        for (g, &e) in gens.iter().zip(&valuations) {
            let e = e.min(k);
            let step = rational::pow(p, k - e);
            if e < k {
                kept.push((g.clone(), (g.iter().map(|x| residue(&Rational::from_integer(x.clone()))).collect(), to_u64(&step))));
            }
            lifts.push(g.iter().map(|x| x * &step).collect::<Vec<BigInt>>());
        }
        let problem = ResidueProblem {
            p,
            m: k,
            base: base.iter().map(residue).collect(),
            gens: kept.iter().map(|(_, r)| r.clone()).collect(),
            kind: CostKind::Quotient,
        };
        let mode = if problem.log2_size() <= limits.exhaustive_log2 { SearchMode::Exhaustive } else { SearchMode::BranchAndBound };
        let search = SearchLimits {
            nodes: limits.nodes.saturating_sub(nodes),
            threads: limits.threads,
            any_witness: limits.any_witness,
        };
        let out = problem.solve(mode, &search);
        nodes += out.nodes;
        if !out.complete {
            break;
        }
        let lower = Rational::new(BigInt::from(out.best.cost), BigInt::from(problem.scale()));
        // lift the digits to an honest point
        let mut x = base.to_vec();
        for ((g, _), digit) in kept.iter().zip(&out.best.digits) {
            for (xj, gj) in x.iter_mut().zip(g) {
                *xj += Rational::from_integer(gj * BigInt::from(*digit));
            }
        }
        offer(&mut best, x.clone());
        let zeros: Vec<usize> = (0..x.len()).filter(|&j| out.best.x[j] == 0 && !x[j].is_zero()).collect();
        if !zeros.is_empty() {
            let mut a = IntegerMatrix::zeros(zeros.len(), lifts.len());
            for (row, &j) in zeros.iter().enumerate() {
                for (i, h) in lifts.iter().enumerate() {
                    a.set(row, i, h[j].clone());
                }
            }
            let rhs: Vec<Rational> = zeros.iter().map(|&j| -x[j].clone()).collect();
            if let Some(w) = solve_linear(&a, &rhs, Scalars::Localized(p)) {
                let mut exact = x.clone();
                for (h, wi) in lifts.iter().zip(&w) {
                    for (xj, hj) in exact.iter_mut().zip(h) {
                        *xj += wi * Rational::from_integer(hj.clone());
                    }
                }
                debug_assert!(zeros.iter().all(|&j| exact[j].is_zero()));
                offer(&mut best, exact);
            }
        }
        if best.0 == lower {
            return PadicSolution { value: best.0, x: best.1, optimal: true, nodes };
        }
        if nodes >= limits.nodes {
            break;
        }
    }
    PadicSolution { value: best.0, x: best.1, optimal: false, nodes }
}

/// The scaling exponent beyond which `p^{-m}`-multiples of the image contain a
/// rational minimiser: every entry of a minimiser has norm at most the
/// starting value, which bounds the denominators of its lattice coordinates.
pub(crate) fn rational_exponent(base: &[Rational], divisors: &[BigInt], p: u64) -> u32 {
    let start = padic_l1(base, p);
    let mut norm_exp = 0u32;
    while p_power(p, i64::from(norm_exp)) < start {
        norm_exp += 1;
    }
    let denominators = base
        .iter()
        .filter_map(|q| padic_valuation(q, p))
        .map(|v| u32::try_from(-v).unwrap_or(0))
        .max()
        .unwrap_or(0);
    let divisor_exp = divisors.iter().filter(|d| !d.is_zero()).map(|d| int_valuation(d, p)).max().unwrap_or(0);
    divisor_exp + norm_exp.max(denominators)
}

/// Minimum of `Σ_j |x_j|_p` over `x ∈ base + Σ ℚ·gens`, computed over `ℤ_(p)` after scaling by `p^{m*}`.
pub(crate) fn minimize_rational_padic(
    base: &[Rational],
    gens: &[Vec<BigInt>],
    divisors: &[BigInt],
    p: u64,
    limits: &PadicLimits,
) -> (PadicSolution, u32) {
    let m = rational_exponent(base, divisors, p);
    let scale = Rational::from_integer(rational::pow(p, m));
    let scaled: Vec<Rational> = base.iter().map(|q| q * &scale).collect();
    let inner = minimize_localized(&scaled, gens, p, limits);
    let x: Vec<Rational> = inner.x.iter().map(|q| q / &scale).collect();
    let value = &inner.value * &scale;
    debug_assert_eq!(padic_l1(&x, p), value);
    debug_assert!(value.is_positive() || x.iter().all(Zero::is_zero));
    (PadicSolution { value, x, optimal: inner.optimal, nodes: inner.nodes }, m)
}
