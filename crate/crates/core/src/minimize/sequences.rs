//! Scaling sequences, CRT combination of per-prime cycles, and the anytime
//! upper-bound stream.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use super::coset::Coset;
use super::{minimal_norm, MinimizationProblem};
use crate::complex::{verify_fundamental_cycle, verify_relative_cycle, Chain, Model, SCHEMA_VERSION};
use crate::error::{Result, SvolError};
use crate::rational::{self, format_rational, Rational};
use crate::rings::{RingSpec, Scalars};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingTerm {
    pub m: u32,
    /// `p^m · min |x|_{1,p}` over representatives of `p^m · class` with ℤ_(p) coefficients.
    pub value: Rational,
    pub optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingSequence {
    pub p: u64,
    pub terms: Vec<ScalingTerm>,
}

impl ScalingSequence {
    pub fn is_non_increasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[1].value <= w[0].value)
    }

    /// The last term, which bounds the ℚ_p minimum from above.
    pub fn limit(&self) -> Option<&Rational> {
        self.terms.last().map(|t| &t.value)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| json!({"m": t.m, "value": format_rational(&t.value), "optimal": t.optimal}))
            .collect();
        json!({
            "svol-schema": SCHEMA_VERSION,
            "p": self.p,
            "terms": terms,
            "non_increasing": self.is_non_increasing(),
        })
    }
}

/// The terms for `m = 0..=m_max`.
pub fn scaling_sequence(model: &Model, class_rep: &Chain, p: u64, m_max: u32) -> Result<ScalingSequence> {
    if !class_rep.is_integral() {
        return Err(SvolError::NotRepresentable { value: "class representative".into(), ring: "Z".into() });
    }
    let ring = RingSpec::new(crate::rings::Carrier::Int, crate::rings::SeminormKind::PAdic(p))?;
    let mut terms = Vec::new();
    for m in 0..=m_max {
        let factor = Rational::from_integer(rational::pow(p, m));
        let problem = MinimizationProblem::new(model, ring).with_class(class_rep.scaled(&factor));
        let result = minimal_norm(&problem)?;
        terms.push(ScalingTerm { m, value: &factor * &result.value, optimal: result.optimal });
    }
    let sequence = ScalingSequence { p, terms };
    debug_assert!(sequence.is_non_increasing() || sequence.terms.iter().any(|t| !t.optimal));
    Ok(sequence)
}

/// Integers `a_p ≡ 1 mod p^n`, `a_p ≡ 0 mod q^n` for the other primes, summing to 1.
pub fn crt_coefficients(primes: &[u64], n: u32) -> Result<BTreeMap<u64, BigInt>> {
    let primes: Vec<u64> = primes.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let Some(&last) = primes.last() else {
        return Err(SvolError::InvalidModel("simultaneous approximation needs at least one prime".into()));
    };
    for &p in &primes {
        if !rational::is_prime(p) {
            return Err(SvolError::NotPrime(p));
        }
    }
    let total: BigInt = primes.iter().map(|&p| rational::pow(p, n)).product();
    let mut out = BTreeMap::new();
    for &p in &primes {
        let pn = rational::pow(p, n);
        let rest = &total / &pn;
        let inverse = rational::mod_inverse(&rest, &pn).expect("coprime prime powers");
        out.insert(p, (rest * inverse).mod_floor(&total));
    }
    let excess: BigInt = out.values().sum::<BigInt>() - 1;
    *out.get_mut(&last).expect("last prime present") -= excess;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimultaneousCycle {
    pub coefficients: BTreeMap<u64, BigInt>,
    pub cycle: Chain,
}

impl SimultaneousCycle {
    pub fn to_json(&self) -> Value {
        let coefficients: BTreeMap<String, String> =
            self.coefficients.iter().map(|(p, a)| (p.to_string(), a.to_string())).collect();
        json!({
            "svol-schema": SCHEMA_VERSION,
            "coefficients": coefficients,
            "cycle": self.cycle.to_json(),
        })
    }
}

/// `Σ a_p c_p` for integral fundamental cycles `c_p`, one per prime.
pub fn simultaneous_cycle(model: &Model, witnesses: &BTreeMap<u64, Chain>, n: u32) -> Result<SimultaneousCycle> {
    let primes: Vec<u64> = witnesses.keys().copied().collect();
    let coefficients = crt_coefficients(&primes, n)?;
    let mut cycle = Chain::zero(model.dim());
    for (p, c) in witnesses {
        c.validate(model)?;
        if !c.is_integral() || !verify_fundamental_cycle(model, c, &RingSpec::Z)? {
            return Err(SvolError::NotFundamental(format!("witness for p = {p}")));
        }
        cycle = cycle.plus(&c.scaled(&Rational::from_integer(coefficients[p].clone())));
    }
    Ok(SimultaneousCycle { coefficients, cycle })
}

pub const DEFAULT_STREAM_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamItem {
    pub bound: Rational,
    pub witness: Chain,
    /// Representatives evaluated before this item was emitted.
    pub evaluated: u64,
}

/// Lazily enumerates `class_rep + Σ y_i g_i` by growing height of `y`,
/// yielding every strict improvement of the incumbent.
///
/// The height of `y = k/den` is `max(den, |k|_∞)`; denominators other than 1
/// are used only for rings whose scalars admit them, so every representative
/// in the ring's coset is eventually reached.
pub struct UpperBoundStream {
    ring: RingSpec,
    dim: usize,
    coset: Coset,
    gens: Vec<Vec<BigInt>>,
    budget: u64,
    evaluated: u64,
    best: Option<Rational>,
    started: bool,
    finished: bool,
    height: u64,
    den: u64,
    k: Vec<i64>,
}

pub fn upper_bound_stream(model: &Model, class_rep: &Chain, ring: RingSpec, budget: u64) -> Result<UpperBoundStream> {
    if !verify_relative_cycle(model, class_rep, &ring)? {
        return Err(SvolError::Infeasible(format!("class representative is not a relative cycle over {ring}")));
    }
    let class = class_rep.reduce(&ring)?;
    let coset = Coset::new(model, &class);
    let gens = match ring.scalars() {
        Scalars::Rationals => coset.directions.clone(),
        _ => coset.integral_generators(),
    };
    let r = gens.len();
    Ok(UpperBoundStream {
        ring,
        dim: model.dim(),
        coset,
        gens,
        budget,
        evaluated: 0,
        best: None,
        started: false,
        finished: r == 0,
        height: 1,
        den: 1,
        k: vec![-1; r],
    })
}

impl UpperBoundStream {
    fn max_height(&self) -> Option<u64> {
        match self.ring.scalars() {
            Scalars::Residues { p, m } => Some(p.pow(m)),
            _ => None,
        }
    }

    fn allows_denominator(&self, den: u64) -> bool {
        match self.ring.scalars() {
            Scalars::Rationals => true,
            Scalars::Localized(p) => den % p != 0,
            Scalars::Integers | Scalars::Residues { .. } => den == 1,
        }
    }

    fn evaluate(&self, y: &[Rational]) -> (Rational, Chain) {
        let x = self.coset.point(&self.gens, y);
        let chain = self.coset.chain(self.dim, &x).reduce(&self.ring).expect("coset point lies in the carrier");
        (chain.norm(&self.ring).expect("reduced chain"), chain)
    }

    /// Moves to the next `(den, k)` of the current height, or the next height.
    fn advance(&mut self) {
        let h = self.height as i64;
        for entry in self.k.iter_mut().rev() {
            if *entry < h {
                *entry += 1;
                return;
            }
            *entry = -h;
        }
        loop {
            self.den += 1;
            if self.den > self.height {
                self.height += 1;
                self.den = 1;
                if self.max_height().is_some_and(|cap| self.height > cap) {
                    self.finished = true;
                    return;
                }
            }
            if self.allows_denominator(self.den) {
                break;
            }
        }
        let h = self.height as i64;
        self.k.iter_mut().for_each(|e| *e = -h);
    }

    fn on_shell(&self) -> bool {
        let top = self.k.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0);
        self.den.max(top) == self.height && self.k.iter().any(|e| *e != 0)
    }
}

impl Iterator for UpperBoundStream {
    type Item = StreamItem;

    fn next(&mut self) -> Option<StreamItem> {
        if !self.started {
            self.started = true;
            let (bound, witness) = self.evaluate(&vec![Rational::zero(); self.gens.len()]);
            if bound.is_zero() {
                self.finished = true;
            }
            self.best = Some(bound.clone());
            return Some(StreamItem { bound, witness, evaluated: 0 });
        }
        while !self.finished && self.evaluated < self.budget {
            let current = self.on_shell().then(|| {
                let den = BigInt::from(self.den);
                self.k.iter().map(|e| Rational::new(BigInt::from(*e), den.clone())).collect::<Vec<_>>()
            });
            self.advance();
            let Some(y) = current else { continue };
            self.evaluated += 1;
            let (bound, witness) = self.evaluate(&y);
            if self.best.as_ref().is_some_and(|b| bound < *b) {
                self.best = Some(bound.clone());
                if bound.is_zero() {
                    self.finished = true;
                }
                return Some(StreamItem { bound, witness, evaluated: self.evaluated });
            }
        }
        None
    }
}

pub fn stream_item_json(item: &StreamItem) -> Value {
    json!({
        "bound": format_rational(&item.bound),
        "witness": item.witness.to_json(),
        "evaluated": item.evaluated,
    })
}
