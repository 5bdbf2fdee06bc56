//! The comparison rules and the fixpoint loop.
//!
//! Most rules are linear inequalities `v(a) ≤ λ·v(b)` between two keys; each
//! such edge lowers `hi(a)` to `λ·hi(b)` and raises `lo(b)` to `lo(a)/λ`.
//! The remaining rules are constant lower bounds, the product upper bound,
//! and the conditional `ℚ_p`/`ℤ_p` comparison.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::trace::{Derivation, Guard, Rule, Side};
use super::{canonical, Key, KnowledgeBase, Relation};
use crate::error::Result;
use crate::rational::{binomial, Rational};
use crate::rings::{Carrier, RingSpec, Scalars, SeminormKind};

/// Passes after which propagation stops even if intervals still move.
pub const MAX_PASSES: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationSummary {
    pub passes: usize,
    pub steps_added: usize,
    pub converged: bool,
}

/// `v(small) ≤ factor · v(big)`.
struct Edge {
    small: Key,
    big: Key,
    factor: Rational,
    rule: Rule,
    guard: Option<Guard>,
    note: String,
}

fn int(n: u64) -> Rational {
    Rational::from_integer(n.into())
}

fn key(space: &str, ring: RingSpec) -> Key {
    (space.to_string(), canonical(ring))
}

fn zmod_trivial(p: u64, m: u32) -> RingSpec {
    RingSpec::zmod(p, m).trivial()
}

/// `|deg|_R` when `deg` is a unit of `R`.
fn degree_factor(ring: RingSpec, degree: i64) -> Option<Rational> {
    let d = Rational::from_integer(degree.into());
    let unit = match ring.scalars() {
        Scalars::Integers => degree.abs() == 1,
        Scalars::Localized(p) | Scalars::Residues { p, .. } => degree.unsigned_abs() % p != 0,
        Scalars::Rationals => degree != 0,
    };
    if unit {
        ring.norm_of(&d).ok().filter(|f| !f.is_zero())
    } else {
        None
    }
}

impl KnowledgeBase {
    fn has(&self, space: &str, check: impl Fn(&Relation) -> bool) -> bool {
        self.relations.iter().any(|r| r.spaces().first() == Some(&space) && check(r))
    }

    fn is_even_closed(&self, space: &str) -> bool {
        self.has(space, |r| matches!(r, Relation::EvenClosed { .. }))
    }

    fn is_closed(&self, space: &str) -> bool {
        self.is_even_closed(space) || self.has(space, |r| matches!(r, Relation::Closed { .. }))
    }

    fn dimension(&self, space: &str) -> Option<usize> {
        self.relations.iter().find_map(|r| match r {
            Relation::Dim { space: s, d } if s == space => Some(*d),
            _ => None,
        })
    }

    /// The rings tracked for a space.
    fn rings_for(&self, space: &str) -> BTreeSet<RingSpec> {
        let mut out: BTreeSet<RingSpec> = [RingSpec::Z, RingSpec::Q, RingSpec::Q.trivial()].into();
        for &p in &self.primes {
            out.extend([RingSpec::fp(p), RingSpec::zp(p), RingSpec::qp(p)]);
        }
        for (s, ring) in self.intervals.keys() {
            if s == space {
                out.insert(*ring);
                if let Carrier::ModPrimePower(p, m) = ring.carrier {
                    out.extend([RingSpec::zmod(p, m), zmod_trivial(p, m)]);
                }
            }
        }
        out
    }

    fn space_edges(&self, space: &str, rings: &BTreeSet<RingSpec>) -> Vec<Edge> {
        let mut edges = Vec::new();
        let mut push = |small: RingSpec, big: RingSpec, factor: Rational, rule: Rule, note: &str| {
            edges.push(Edge { small: key(space, small), big: key(space, big), factor, rule, guard: None, note: note.to_string() });
        };
        for &r in rings {
            if r != RingSpec::Z {
                push(r, RingSpec::Z, int(1), Rule::Universal, "Z -> R");
            }
        }
        for &p in &self.primes {
            push(RingSpec::fp(p), RingSpec::zp(p), int(1), Rule::Sandwich, "Zp -> Fp");
            push(RingSpec::qp(p), RingSpec::zp(p), int(1), Rule::Sandwich, "Zp -> Qp");
        }
        for &r in rings {
            let (Carrier::ModPrimePower(p, m), SeminormKind::QuotientPAdic(..)) = (r.carrier, r.seminorm) else {
                continue;
            };
            push(RingSpec::fp(p), r, int(1), Rule::Sandwich, "Z/p^m -> Fp");
            push(r, RingSpec::zp(p), int(1), Rule::Sandwich, "Zp -> Z/p^m");
            if rings.contains(&RingSpec::zmod(p, m + 1)) {
                push(r, RingSpec::zmod(p, m + 1), int(1), Rule::Sandwich, "Z/p^(m+1) -> Z/p^m");
            }
            push(r, zmod_trivial(p, m), int(1), Rule::Sandwich, "|.|_p <= trivial on Z/p^m");
            let scale = Rational::from_integer(crate::rational::pow(p, m - 1));
            push(zmod_trivial(p, m), r, scale, Rule::Sandwich, "trivial <= p^(m-1)|.|_p on Z/p^m");
        }
        edges
    }

    fn relation_edges(&self, rings: &dyn Fn(&str) -> BTreeSet<RingSpec>) -> Vec<Edge> {
        let mut edges = Vec::new();
        let mut degree_edges = |source: &str, target: &str, degree: i64, rule: Rule| {
            let all: BTreeSet<RingSpec> = rings(source).union(&rings(target)).copied().collect();
            for r in all {
                if let Some(f) = degree_factor(r, degree) {
                    edges.push(Edge {
                        small: key(target, r),
                        big: key(source, r),
                        factor: f.recip(),
                        rule,
                        guard: None,
                        note: format!("|{degree}|_R = {}", crate::rational::format_rational(&f)),
                    });
                }
            }
        };
        for rel in &self.relations {
            match rel {
                Relation::DegreeMap { source, target, degree } => degree_edges(source, target, *degree, Rule::Degree),
                Relation::Covering { total, base, sheets } => {
                    degree_edges(total, base, *sheets as i64, Rule::Degree);
                }
                _ => {}
            }
        }
        for rel in &self.relations {
            match rel {
                Relation::Covering { total, base, sheets } => {
                    let all: BTreeSet<RingSpec> = rings(total).union(&rings(base)).copied().collect();
                    for r in all {
                        edges.push(Edge {
                            small: key(total, r),
                            big: key(base, r),
                            factor: int(*sheets),
                            rule: Rule::Covering,
                            guard: None,
                            note: format!("{sheets} sheets"),
                        });
                    }
                }
                Relation::Product { product, left, right } if self.is_closed(left) && self.is_closed(right) => {
                    for factor_space in [left, right] {
                        for r in rings(product).into_iter().filter(RingSpec::norms_bounded_by_one) {
                            edges.push(Edge {
                                small: key(factor_space, r),
                                big: key(product, r),
                                factor: int(1),
                                rule: Rule::Product,
                                guard: None,
                                note: "factor embeds isometrically".into(),
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        edges
    }

    /// Applies an edge; returns whether an endpoint moved.
    fn apply_edge(&mut self, e: &Edge) -> Result<bool> {
        let small = self.intervals.get(&e.small).cloned().unwrap_or_default();
        let big = self.intervals.get(&e.big).cloned().unwrap_or_default();
        let mut moved = false;
        if let (Some(hi), Some(step)) = (&big.hi, big.hi_step) {
            let value = &e.factor * hi;
            let d = Derivation::Scaled { factor: e.factor.clone(), premise: step };
            moved |= self.tighten(&e.small.0, e.small.1, Side::Upper, value, e.rule, d, e.guard.clone(), e.note.clone())?;
        }
        if let Some(step) = small.lo_step {
            let factor = e.factor.recip();
            let value = &factor * &small.lo;
            let d = Derivation::Scaled { factor, premise: step };
            moved |= self.tighten(&e.big.0, e.big.1, Side::Lower, value, e.rule, d, e.guard.clone(), e.note.clone())?;
        }
        Ok(moved)
    }

    fn constant(&mut self, space: &str, ring: RingSpec, value: Rational, rule: Rule, note: String) -> Result<bool> {
        self.tighten(space, canonical(ring), Side::Lower, value, rule, Derivation::Constant, None, note)
    }

    fn apply_constants(&mut self) -> Result<bool> {
        let mut moved = false;
        let primes: Vec<u64> = self.primes.iter().copied().collect();
        for rel in self.relations.clone() {
            match rel {
                Relation::Betti { space, n, field, value } => {
                    let note = format!("b_{n}({field}) = {value}");
                    if field == RingSpec::Q {
                        for &p in &primes {
                            moved |= self.constant(&space, RingSpec::qp(p), int(value), Rule::Betti, note.clone())?;
                        }
                    } else if let Some(p) = field.prime() {
                        moved |= self.constant(&space, RingSpec::fp(p), int(value), Rule::Betti, note.clone())?;
                        moved |= self.constant(&space, RingSpec::zp(p), int(value), Rule::Betti, note)?;
                    }
                }
                Relation::Closed { space } | Relation::EvenClosed { space } => {
                    let bound = if self.is_even_closed(&space) { 2 } else { 1 };
                    let note = if bound == 2 { "closed, even-dimensional" } else { "closed" };
                    for &p in &primes {
                        moved |= self.constant(&space, RingSpec::qp(p), int(bound), Rule::Closed, note.into())?;
                    }
                }
                _ => {}
            }
        }
        Ok(moved)
    }

    fn apply_products(&mut self, rings: &dyn Fn(&str) -> BTreeSet<RingSpec>) -> Result<bool> {
        let mut moved = false;
        for rel in self.relations.clone() {
            let Relation::Product { product, left, right } = rel else { continue };
            if !(self.is_closed(&left) && self.is_closed(&right)) {
                continue;
            }
            let (Some(dl), Some(dr)) = (self.dimension(&left), self.dimension(&right)) else { continue };
            let factor = Rational::from_integer(binomial((dl + dr) as u64, dl as u64));
            for r in rings(&product).into_iter().filter(RingSpec::norms_bounded_by_one) {
                let (a, b) = (self.interval(&left, r), self.interval(&right, r));
                let (Some(ha), Some(hb), Some(sa), Some(sb)) = (&a.hi, &b.hi, a.hi_step, b.hi_step) else { continue };
                let value = &factor * ha * hb;
                let d = Derivation::Product { factor: factor.clone(), left: sa, right: sb };
                let note = format!("C({}, {dl}) cross product", dl + dr);
                moved |= self.tighten(&product, canonical(r), Side::Upper, value, Rule::Product, d, None, note)?;
            }
        }
        Ok(moved)
    }

    /// The conditional `ℚ_p`/`ℤ_p` comparison and the almost-all-primes equalities.
    fn trigger_edges(&self, spaces: &BTreeSet<String>) -> (Vec<Edge>, Vec<(String, u64, Rational)>) {
        let mut edges = Vec::new();
        let mut caps = Vec::new();
        for space in spaces {
            let threshold = |p: u64| int(if self.is_even_closed(space) { 2 * p } else { p });
            for &p in &self.primes {
                let qp = self.interval(space, RingSpec::qp(p));
                let t = threshold(p);
                if let (Some(hi), Some(step)) = (&qp.hi, qp.hi_step) {
                    if *hi < t {
                        edges.push(Edge {
                            small: key(space, RingSpec::zp(p)),
                            big: key(space, RingSpec::qp(p)),
                            factor: int(1),
                            rule: Rule::Trigger,
                            guard: Some(Guard { premise: step, below: t.clone() }),
                            note: "every near-minimal Qp cycle is p-integral".into(),
                        });
                    }
                }
                caps.push((space.clone(), p, t));
            }
            if let Some(bad) = self.certificates.get(space) {
                for &p in self.primes.iter().filter(|p| !bad.contains(p)) {
                    let group = [RingSpec::fp(p), RingSpec::zp(p), RingSpec::qp(p), RingSpec::Q.trivial()];
                    for a in group {
                        for b in group {
                            if a != b {
                                edges.push(Edge {
                                    small: key(space, a),
                                    big: key(space, b),
                                    factor: int(1),
                                    rule: Rule::AlmostAllPrimes,
                                    guard: None,
                                    note: format!("{p} divides no elementary divisor of the certified model"),
                                });
                            }
                        }
                    }
                }
            }
        }
        (edges, caps)
    }

    /// `lo(ℚ_p) ≥ min(T, lo(ℤ_p))`: below the threshold `T` the two values agree.
    fn apply_cap(&mut self, space: &str, p: u64, threshold: Rational) -> Result<bool> {
        let zp = self.interval(space, RingSpec::zp(p));
        let Some(step) = zp.lo_step else { return Ok(false) };
        let value = zp.lo.clone().min(threshold.clone());
        let d = Derivation::Capped { cap: threshold.clone(), premise: step };
        let note = format!("either ||.||_Qp >= {} or it equals ||.||_Zp", crate::rational::format_rational(&threshold));
        self.tighten(space, RingSpec::qp(p), Side::Lower, value, Rule::Trigger, d, None, note)
    }

    /// Applies all rules until no endpoint moves.
    pub fn propagate(&mut self) -> Result<PropagationSummary> {
        let start = self.steps.len();
        let spaces = self.spaces();
        for space in &spaces {
            for ring in self.rings_for(space) {
                self.intervals.entry(key(space, ring)).or_default();
            }
        }
        let ring_sets: std::collections::BTreeMap<String, BTreeSet<RingSpec>> =
            spaces.iter().map(|s| (s.clone(), self.rings_for(s))).collect();
        let rings = |s: &str| ring_sets.get(s).cloned().unwrap_or_default();
        let mut static_edges = Vec::new();
        for space in &spaces {
            static_edges.extend(self.space_edges(space, &ring_sets[space]));
        }
        static_edges.extend(self.relation_edges(&rings));
        let mut passes = 0;
        let mut converged = false;
        while passes < MAX_PASSES {
            passes += 1;
            let mut moved = self.apply_constants()?;
            for e in &static_edges {
                moved |= self.apply_edge(e)?;
            }
            moved |= self.apply_products(&rings)?;
            let (edges, caps) = self.trigger_edges(&spaces);
            for e in &edges {
                moved |= self.apply_edge(e)?;
            }
            for (space, p, t) in caps {
                moved |= self.apply_cap(&space, p, t)?;
            }
            if !moved {
                converged = true;
                break;
            }
        }
        Ok(PropagationSummary { passes, steps_added: self.steps.len() - start, converged })
    }
}
