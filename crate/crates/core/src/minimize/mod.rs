//! Exact minimisation of the ring-weighted ℓ¹-norm over the representatives
//! `class_rep + im ∂_{d+1}` of a relative class inside a model.

mod coset;
mod integer;
mod padic;
mod residue;
mod sequences;
mod simplex;
mod support;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::complex::{verify_relative_cycle, Chain, Model};
use crate::error::{Result, SvolError};
use crate::homology::solve_boundary;
use crate::rational::{format_rational, int_valuation, Rational};
use crate::rings::{RingSpec, Scalars, SeminormKind};

use coset::Coset;
use residue::{CostKind, ResidueProblem, SearchLimits, SearchMode};

pub use sequences::{
    crt_coefficients, scaling_sequence, simultaneous_cycle, upper_bound_stream, ScalingSequence, ScalingTerm,
    SimultaneousCycle, StreamItem, UpperBoundStream, DEFAULT_STREAM_BUDGET, stream_item_json,
};
pub use simplex::{LinearProgram, LpOutcome};

/// Cosets with at most `2^22` points are searched exhaustively.
pub const EXHAUSTIVE_LOG2: f64 = 22.0;

pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Auto,
    Exhaustive,
    BranchAndBound,
    LpExact,
}

impl FromStr for Strategy {
    type Err = SvolError;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "exhaustive" => Ok(Strategy::Exhaustive),
            "bnb" => Ok(Strategy::BranchAndBound),
            "lp" => Ok(Strategy::LpExact),
            other => Err(SvolError::Unsupported(format!("strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Exhaustive => "exhaustive",
            Strategy::BranchAndBound => "bnb",
            Strategy::LpExact => "lp",
        })
    }
}

/// Worker count from `SVOL_THREADS`, defaulting to one.
pub fn threads_from_env() -> usize {
    std::env::var("SVOL_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

#[derive(Clone, Debug)]
pub struct MinimizationProblem<'a> {
    pub model: &'a Model,
    pub class_rep: Chain,
    pub ring: RingSpec,
    pub strategy: Strategy,
    pub node_budget: u64,
    pub any_witness: bool,
    pub threads: usize,
}

impl<'a> MinimizationProblem<'a> {
    /// The model's reference class with default settings.
    pub fn new(model: &'a Model, ring: RingSpec) -> Self {
        MinimizationProblem {
            model,
            class_rep: model.reference().clone(),
            ring,
            strategy: Strategy::Auto,
            node_budget: DEFAULT_NODE_BUDGET,
            any_witness: false,
            threads: threads_from_env(),
        }
    }

    pub fn with_class(mut self, class_rep: Chain) -> Self {
        self.class_rep = class_rep;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.node_budget = nodes;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimizationResult {
    pub ring: RingSpec,
    pub value: Rational,
    pub witness: Chain,
    /// `false` when the budget ran out and `value` is only an upper bound.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub method: &'static str,
}

impl MinimizationResult {
    pub fn to_json(&self) -> Value {
        json!({
            "svol-schema": crate::complex::SCHEMA_VERSION,
            "ring": self.ring.to_string(),
            "value": format_rational(&self.value),
            "witness": self.witness.to_json(),
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
            "method": self.method,
        })
    }
}

fn strategy_error(strategy: Strategy, ring: &RingSpec) -> SvolError {
    SvolError::Unsupported(format!("strategy `{strategy}` for {ring}"))
}

fn residue_problem(coset: &Coset, class: &[Rational], p: u64, m: u32, kind: CostKind) -> ResidueProblem {
    let q = crate::rational::pow(p, m);
    let to_u64 = |x: &BigInt| u64::try_from(x).expect("modulus fits in u64");
    let residue = |x: &Rational| to_u64(&crate::rational::reduce_mod(x, &q).expect("element of the residue ring"));
    let mut gens = Vec::new();
    for (g, d) in coset.integral_generators().iter().zip(&coset.divisors) {
        let e = int_valuation(d, p).min(m);
        if e < m {
            let reduced = g.iter().map(|x| residue(&Rational::from_integer(x.clone()))).collect();
            gens.push((reduced, to_u64(&crate::rational::pow(p, m - e))));
        }
    }
    ResidueProblem { p, m, base: class.iter().map(residue).collect(), gens, kind }
}

/// Minimises `|x|_{1,R}` over the representatives of the class of `class_rep`.
pub fn minimal_norm(problem: &MinimizationProblem) -> Result<MinimizationResult> {
    let (model, ring) = (problem.model, problem.ring);
    let class = &problem.class_rep;
    if class.dimension() != model.dim() {
        return Err(SvolError::DimensionMismatch { id: "<class>".into(), expected: model.dim(), actual: class.dimension() });
    }
    if !verify_relative_cycle(model, class, &ring)? {
        return Err(SvolError::Infeasible(format!("class representative is not a relative cycle over {ring}")));
    }
    let class = class.reduce(&ring)?;
    let coset = Coset::new(model, &class);
    let done = |value: Rational, x: Vec<Rational>, optimal: bool, nodes: u64, method: &'static str| {
        let witness = coset.chain(model.dim(), &x).reduce(&ring)?;
        Ok(MinimizationResult { ring, value, witness, optimal, nodes_explored: nodes, method })
    };
    if class.is_zero() || coset.len() == 0 {
        return done(Rational::zero(), Vec::new(), true, 0, "trivial");
    }
    let strategy = problem.strategy;
    let budget = problem.node_budget;
    match (ring.scalars(), ring.seminorm) {
        (Scalars::Residues { p, m }, seminorm) => {
            let kind = if seminorm == SeminormKind::Trivial { CostKind::Trivial } else { CostKind::Quotient };
            let rp = residue_problem(&coset, &coset.base, p, m, kind);
            let mode = match strategy {
                Strategy::Auto if rp.log2_size() <= EXHAUSTIVE_LOG2 => SearchMode::Exhaustive,
                Strategy::Auto | Strategy::BranchAndBound => SearchMode::BranchAndBound,
                Strategy::Exhaustive => SearchMode::Exhaustive,
                Strategy::LpExact => return Err(strategy_error(strategy, &ring)),
            };
            let limits = SearchLimits { nodes: budget, threads: problem.threads, any_witness: problem.any_witness };
            let out = rp.solve(mode, &limits);
            let value = Rational::new(BigInt::from(out.best.cost), BigInt::from(rp.scale()));
            let x = out.best.x.iter().map(|v| Rational::from_integer(BigInt::from(*v))).collect::<Vec<_>>();
            let method = if mode == SearchMode::Exhaustive { "exhaustive" } else { "residue-bnb" };
            done(value, x, out.complete, out.nodes, method)
        }
        (scalars @ (Scalars::Integers | Scalars::Rationals), SeminormKind::Trivial) => {
            if !matches!(strategy, Strategy::Auto | Strategy::BranchAndBound) {
                return Err(strategy_error(strategy, &ring));
            }
            let gens = match scalars {
                Scalars::Integers => coset.integral_generators(),
                _ => coset.directions.clone(),
            };
            let s = support::minimize_support(&coset.base, &gens, scalars, budget, problem.any_witness);
            done(Rational::from_integer(s.support.into()), s.x, s.optimal, s.nodes, "support-bnb")
        }
        (Scalars::Rationals, SeminormKind::Archimedean) => {
            if !matches!(strategy, Strategy::Auto | Strategy::LpExact) {
                return Err(strategy_error(strategy, &ring));
            }
            let s = integer::minimize_rational(&coset.base, &coset.directions);
            done(s.value, s.x, s.optimal, s.nodes, "lp")
        }
        (Scalars::Integers, SeminormKind::Archimedean) => {
            if !matches!(strategy, Strategy::Auto | Strategy::BranchAndBound) {
                return Err(strategy_error(strategy, &ring));
            }
            let s = integer::minimize_integral(&coset.base, &coset.integral_generators(), budget, problem.any_witness);
            done(s.value, s.x, s.optimal, s.nodes, "lp-bnb")
        }
        (Scalars::Localized(p), _) => {
            if !matches!(strategy, Strategy::Auto | Strategy::BranchAndBound) {
                return Err(strategy_error(strategy, &ring));
            }
            let limits = padic_limits(problem);
            let s = padic::minimize_localized(&coset.base, &coset.integral_generators(), p, &limits);
            done(s.value, s.x, s.optimal, s.nodes, "padic-levels")
        }
        (Scalars::Rationals, SeminormKind::PAdic(p)) => {
            if !matches!(strategy, Strategy::Auto | Strategy::BranchAndBound) {
                return Err(strategy_error(strategy, &ring));
            }
            let limits = padic_limits(problem);
            let gens = coset.integral_generators();
            let (s, _) = padic::minimize_rational_padic(&coset.base, &gens, &coset.divisors, p, &limits);
            done(s.value, s.x, s.optimal, s.nodes, "padic-scaled")
        }
        (scalars, seminorm) => Err(SvolError::Unsupported(format!("minimisation over {scalars:?} with {seminorm:?}"))),
    }
}

fn padic_limits(problem: &MinimizationProblem) -> padic::PadicLimits {
    padic::PadicLimits {
        nodes: problem.node_budget,
        threads: problem.threads,
        any_witness: problem.any_witness,
        exhaustive_log2: EXHAUSTIVE_LOG2,
    }
}

/// Checks that the witness is homologous to `class_rep` over the ring and
/// that its norm equals the reported value.
pub fn verify_witness(model: &Model, class_rep: &Chain, result: &MinimizationResult) -> Result<bool> {
    let ring = result.ring;
    if result.witness.norm(&ring)? != result.value {
        return Ok(false);
    }
    let difference = result.witness.minus(class_rep);
    let n = model.dim();
    if !verify_relative_cycle(model, &result.witness, &ring)? {
        return Ok(false);
    }
    let target = if difference.is_zero() { Chain::zero(n) } else { difference };
    Ok(solve_boundary(model, &target, &ring)?.is_some())
}

#[cfg(test)]
mod tests;
