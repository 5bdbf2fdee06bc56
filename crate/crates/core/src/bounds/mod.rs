//! Interval propagation over a knowledge base of spaces, maps and
//! ring-indexed values.
//!
//! A value `‖M, ∂M‖_R` is stored as an interval keyed by a space id and a
//! canonical [`RingSpec`]. Since `Zp:p` and `Qp:p` are the integers and the
//! rationals with `|·|_p`, the density identifications are built into the
//! keys. Rules are applied until no interval shrinks.

mod rules;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::complex::{verify_fundamental_cycle, Chain, Model, SCHEMA_VERSION};
use crate::error::{Result, SvolError};
use crate::homology::elementary_divisor_primes;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::rings::{parse_ring_spec, Carrier, RingSpec};

pub use rules::PropagationSummary;
pub use trace::{describe, replay, Derivation, Guard, Rule, Side, Step, StepId};

pub const DEFAULT_PRIMES: [u64; 4] = [2, 3, 5, 7];

pub type Key = (String, RingSpec);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// A map `source → target` of the given degree.
    DegreeMap { source: String, target: String, degree: i64 },
    /// An `ℓ`-sheeted covering `total → base`.
    Covering { total: String, base: String, sheets: u64 },
    Product { product: String, left: String, right: String },
    EvenClosed { space: String },
    Closed { space: String },
    /// `b_n(space; field) = value` for `field` one of `Q` or `Fp:p`.
    Betti { space: String, n: usize, field: RingSpec, value: u64 },
    Dim { space: String, d: usize },
}

impl Relation {
    pub fn spaces(&self) -> Vec<&str> {
        match self {
            Relation::DegreeMap { source, target, .. } => vec![source, target],
            Relation::Covering { total, base, .. } => vec![total, base],
            Relation::Product { product, left, right } => vec![product, left, right],
            Relation::EvenClosed { space }
            | Relation::Closed { space }
            | Relation::Betti { space, .. }
            | Relation::Dim { space, .. } => vec![space],
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Relation::DegreeMap { source, target, degree } => {
                json!({"kind": "degree", "source": source, "target": target, "degree": degree})
            }
            Relation::Covering { total, base, sheets } => {
                json!({"kind": "covering", "total": total, "base": base, "sheets": sheets})
            }
            Relation::Product { product, left, right } => {
                json!({"kind": "product", "product": product, "left": left, "right": right})
            }
            Relation::EvenClosed { space } => json!({"kind": "even_closed", "space": space}),
            Relation::Closed { space } => json!({"kind": "closed", "space": space}),
            Relation::Betti { space, n, field, value } => {
                json!({"kind": "betti", "space": space, "n": n, "field": field.to_string(), "value": value})
            }
            Relation::Dim { space, d } => json!({"kind": "dim", "space": space, "d": d}),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    /// `None` is `+∞`.
    pub hi: Option<Rational>,
    pub lo_step: Option<StepId>,
    pub hi_step: Option<StepId>,
}

impl Default for Interval {
    fn default() -> Self {
        Interval { lo: Rational::from_integer(0.into()), hi: None, lo_step: None, hi_step: None }
    }
}

impl Interval {
    pub fn width(&self) -> Option<Rational> {
        self.hi.as_ref().map(|h| h - &self.lo)
    }

    pub fn is_exact(&self) -> bool {
        self.hi.as_ref() == Some(&self.lo)
    }

    fn is_informative(&self) -> bool {
        self.lo_step.is_some() || self.hi_step.is_some()
    }
}

/// Facts, relations and certificates, with every derived endpoint traced.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    primes: BTreeSet<u64>,
    intervals: BTreeMap<Key, Interval>,
    relations: Vec<Relation>,
    /// Elementary divisor primes of certified models, by space id.
    certificates: BTreeMap<String, BTreeSet<u64>>,
    steps: Vec<Step>,
}

impl KnowledgeBase {
    /// An empty knowledge base instantiating prime-indexed rings for `primes`.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut kb = KnowledgeBase::default();
        for p in primes {
            kb.add_prime(p)?;
        }
        Ok(kb)
    }

    pub fn with_default_primes() -> Self {
        KnowledgeBase::new(DEFAULT_PRIMES).expect("default primes are prime")
    }

    pub fn add_prime(&mut self, p: u64) -> Result<()> {
        if !crate::rational::is_prime(p) {
            return Err(SvolError::NotPrime(p));
        }
        self.primes.insert(p);
        Ok(())
    }

    pub fn primes(&self) -> &BTreeSet<u64> {
        &self.primes
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn interval(&self, space: &str, ring: RingSpec) -> Interval {
        self.intervals.get(&(space.to_string(), canonical(ring))).cloned().unwrap_or_default()
    }

    /// Seeds an external fact `lo ≤ ‖space‖_ring ≤ hi`.
    pub fn add_fact(&mut self, space: &str, ring: RingSpec, lo: Option<Rational>, hi: Option<Rational>, source: &str) -> Result<()> {
        let ring = canonical(ring);
        if let Some(p) = ring.prime() {
            self.add_prime(p)?;
        }
        self.intervals.entry((space.to_string(), ring)).or_default();
        let cited = || Derivation::Cited { source: source.to_string() };
        if let Some(lo) = lo {
            self.tighten(space, ring, Side::Lower, lo, Rule::Seed, cited(), None, source.to_string())?;
        }
        if let Some(hi) = hi {
            self.tighten(space, ring, Side::Upper, hi, Rule::Seed, cited(), None, source.to_string())?;
        }
        Ok(())
    }

    /// Seeds `‖space‖_ring ≤ |class|_{1,ring}` from a checked fundamental cycle of a model.
    pub fn add_witness(&mut self, space: &str, ring: RingSpec, model: &Model, class: Option<&Chain>) -> Result<Rational> {
        let class = class.unwrap_or_else(|| model.reference());
        if !verify_fundamental_cycle(model, class, &ring)? {
            return Err(SvolError::NotFundamental(ring.to_string()));
        }
        let norm = class.reduce(&ring)?.norm(&ring)?;
        let source = format!("witness {}", model.content_hash());
        self.add_fact(space, ring, None, Some(norm.clone()), &source)?;
        Ok(norm)
    }

    pub fn add_relation(&mut self, relation: Relation) -> Result<()> {
        match &relation {
            Relation::Covering { sheets: 0, .. } => {
                return Err(SvolError::InvalidCovering("a covering has at least one sheet".into()))
            }
            Relation::Betti { field, .. } => {
                let ok = *field == RingSpec::Q || matches!(field.carrier, Carrier::FiniteField(_));
                if !ok {
                    return Err(SvolError::Unsupported(format!("Betti numbers over {field}")));
                }
                if let Some(p) = field.prime() {
                    self.add_prime(p)?;
                }
            }
            _ => {}
        }
        if !self.relations.contains(&relation) {
            self.relations.push(relation);
        }
        Ok(())
    }

    /// Attaches the elementary divisor primes of a model to its content-hash space id.
    pub fn add_certificate(&mut self, model: &Model) -> BTreeSet<u64> {
        let primes = elementary_divisor_primes(model);
        self.certificates.insert(model.content_hash(), primes.clone());
        primes
    }

    pub fn certificate(&self, space: &str) -> Option<&BTreeSet<u64>> {
        self.certificates.get(space)
    }

    /// All spaces mentioned by facts, relations or certificates, sorted.
    pub fn spaces(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.intervals.keys().map(|(s, _)| s.clone()).collect();
        for r in &self.relations {
            out.extend(r.spaces().into_iter().map(str::to_string));
        }
        out.extend(self.certificates.keys().cloned());
        out
    }

    fn push_step(&mut self, step: Step) -> StepId {
        self.steps.push(step);
        self.steps.len() - 1
    }

    /// Moves one endpoint inward if `value` improves it; reports whether it did.
    #[allow(clippy::too_many_arguments)]
    fn tighten(
        &mut self,
        space: &str,
        ring: RingSpec,
        side: Side,
        value: Rational,
        rule: Rule,
        derivation: Derivation,
        guard: Option<Guard>,
        note: String,
    ) -> Result<bool> {
        let key = (space.to_string(), ring);
        let current = self.intervals.get(&key).cloned().unwrap_or_default();
        let improves = match side {
            Side::Lower => value > current.lo,
            Side::Upper => current.hi.as_ref().map_or(true, |h| value < *h),
        };
        if !improves {
            return Ok(false);
        }
        let id = self.push_step(Step { space: space.to_string(), ring, side, value: value.clone(), rule, derivation, guard, note });
        let entry = self.intervals.entry(key).or_default();
        match side {
            Side::Lower => {
                entry.lo = value;
                entry.lo_step = Some(id);
            }
            Side::Upper => {
                entry.hi = Some(value);
                entry.hi_step = Some(id);
            }
        }
        if let Some(hi) = &entry.hi {
            if entry.lo > *hi {
                let (lo_step, hi_step) = (entry.lo_step.expect("positive lower bound"), entry.hi_step.expect("finite"));
                return Err(SvolError::Contradiction {
                    space: space.to_string(),
                    ring: ring.to_string(),
                    lo: format_rational(&entry.lo),
                    hi: format_rational(hi),
                    trace: format!("lower: {}; upper: {}", describe(&self.steps, lo_step), describe(&self.steps, hi_step)),
                });
            }
        }
        Ok(true)
    }

    /// Pairs where computed intervals prove a strict inequality between
    /// `ℚ_p` and `ℤ_p`, or between `(𝔽_p)` and `ℤ_p`.
    pub fn separations(&self) -> Vec<Separation> {
        let mut out = Vec::new();
        for space in self.spaces() {
            for &p in &self.primes {
                let zp = self.interval(&space, RingSpec::zp(p));
                for (smaller, kind) in [(RingSpec::qp(p), "Qp<Zp"), (RingSpec::fp(p), "Fp<Zp")] {
                    let other = self.interval(&space, smaller);
                    if let Some(hi) = &other.hi {
                        if *hi < zp.lo {
                            out.push(Separation { space: space.clone(), p, kind, gap: &zp.lo - hi });
                        }
                    }
                }
            }
        }
        out
    }

    /// Rows with a nontrivial endpoint, sorted by space and ring tag.
    pub fn export_table(&self) -> Table {
        let mut rows: Vec<Row> = self
            .intervals
            .iter()
            .filter(|(_, iv)| iv.is_informative())
            .map(|((space, ring), iv)| Row { space: space.clone(), ring: *ring, interval: iv.clone() })
            .collect();
        rows.sort_by(|a, b| (&a.space, a.ring.to_string()).cmp(&(&b.space, b.ring.to_string())));
        Table { rows, steps: self.steps.clone(), separations: self.separations() }
    }

    /// Reads a facts document; `path` names the source in error messages.
    pub fn from_json(value: &Value) -> Result<KnowledgeBase> {
        let at = |path: &str, message: String| SvolError::Input { path: PathBuf::from(path), message };
        let obj = value.as_object().ok_or_else(|| at("$", "expected an object".into()))?;
        let primes = match obj.get("primes") {
            None => DEFAULT_PRIMES.to_vec(),
            Some(v) => {
                let list = v.as_array().ok_or_else(|| at("$.primes", "expected an array".into()))?;
                list.iter()
                    .enumerate()
                    .map(|(i, p)| p.as_u64().ok_or_else(|| at(&format!("$.primes[{i}]"), "expected an integer".into())))
                    .collect::<Result<_>>()?
            }
        };
        let mut kb = KnowledgeBase::new(primes)?;
        for (i, fact) in array(obj, "facts")?.iter().enumerate() {
            let path = format!("$.facts[{i}]");
            kb.read_fact(fact).map_err(|e| nest(&path, e))?;
        }
        for (i, rel) in array(obj, "relations")?.iter().enumerate() {
            let path = format!("$.relations[{i}]");
            let relation = read_relation(rel).map_err(|e| nest(&path, e))?;
            kb.add_relation(relation).map_err(|e| nest(&path, e))?;
        }
        for (i, cert) in array(obj, "certificates")?.iter().enumerate() {
            let path = format!("$.certificates[{i}]");
            let model = Model::from_json(cert).map_err(|e| nest(&path, e))?;
            kb.add_certificate(&model);
        }
        Ok(kb)
    }

    fn read_fact(&mut self, fact: &Value) -> Result<()> {
        let space = field_str(fact, "space").ok();
        let ring = parse_ring_spec(field_str(fact, "ring")?).map_err(|e| nest("ring", e))?;
        if let Some(w) = fact.get("witness") {
            let model = Model::from_json(w).map_err(|e| nest("witness", e))?;
            let class = match fact.get("class") {
                Some(c) => Some(Chain::from_json(c).map_err(|e| nest("class", e))?),
                None => None,
            };
            let space = space.map_or_else(|| model.content_hash(), str::to_string);
            self.add_witness(&space, ring, &model, class.as_ref())?;
            return Ok(());
        }
        let space = space.ok_or_else(|| SvolError::Input { path: "space".into(), message: "missing".into() })?;
        let endpoint = |name: &str| -> Result<Option<Rational>> {
            match fact.get(name) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => parse_rational(s).map(Some).map_err(|e| nest(name, e)),
                Some(Value::Number(n)) => parse_rational(&n.to_string()).map(Some).map_err(|e| nest(name, e)),
                Some(_) => Err(SvolError::Input { path: name.into(), message: "expected a rational".into() }),
            }
        };
        let value = endpoint("value")?;
        let lo = endpoint("lo")?.or_else(|| value.clone());
        let hi = endpoint("hi")?.or(value);
        let source = fact.get("source").and_then(Value::as_str).unwrap_or("cited");
        self.add_fact(space, ring, lo, hi, source)
    }

    /// The facts document equivalent to the seeds of this knowledge base.
    pub fn to_json(&self) -> Value {
        let facts: Vec<Value> = self
            .steps
            .iter()
            .filter(|s| s.rule == Rule::Seed)
            .map(|s| {
                let source = match &s.derivation {
                    Derivation::Cited { source } => source.clone(),
                    _ => String::new(),
                };
                let side = if s.side == Side::Lower { "lo" } else { "hi" };
                let mut m = Map::new();
                m.insert("space".into(), json!(s.space));
                m.insert("ring".into(), json!(s.ring.to_string()));
                m.insert(side.into(), json!(format_rational(&s.value)));
                m.insert("source".into(), json!(source));
                Value::Object(m)
            })
            .collect();
        json!({
            "svol-schema": SCHEMA_VERSION,
            "primes": self.primes,
            "facts": facts,
            "relations": self.relations.iter().map(Relation::to_json).collect::<Vec<_>>(),
        })
    }
}

fn nest(path: &str, e: SvolError) -> SvolError {
    match e {
        SvolError::Input { path: inner, message } => {
            let inner = inner.to_string_lossy();
            let joined = if inner.starts_with('$') { inner.to_string() } else { format!("{path}.{inner}") };
            SvolError::Input { path: PathBuf::from(joined), message }
        }
        other => SvolError::Input { path: PathBuf::from(path), message: other.to_string() },
    }
}

fn array<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a [Value]> {
    match obj.get(name) {
        None => Ok(&[]),
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(SvolError::Input { path: format!("$.{name}").into(), message: "expected an array".into() }),
    }
}

fn field_str<'a>(v: &'a Value, name: &str) -> Result<&'a str> {
    v.get(name)
        .and_then(Value::as_str)
        .ok_or_else(|| SvolError::Input { path: name.into(), message: "expected a string".into() })
}

fn field_u64(v: &Value, name: &str) -> Result<u64> {
    v.get(name)
        .and_then(Value::as_u64)
        .ok_or_else(|| SvolError::Input { path: name.into(), message: "expected a nonnegative integer".into() })
}

fn read_relation(v: &Value) -> Result<Relation> {
    let s = |name: &str| field_str(v, name).map(str::to_string);
    let kind = field_str(v, "kind")?;
    Ok(match kind {
        "degree" => Relation::DegreeMap {
            source: s("source")?,
            target: s("target")?,
            degree: v
                .get("degree")
                .and_then(Value::as_i64)
                .ok_or_else(|| SvolError::Input { path: "degree".into(), message: "expected an integer".into() })?,
        },
        "covering" => Relation::Covering { total: s("total")?, base: s("base")?, sheets: field_u64(v, "sheets")? },
        "product" => Relation::Product { product: s("product")?, left: s("left")?, right: s("right")? },
        "even_closed" => Relation::EvenClosed { space: s("space")? },
        "closed" => Relation::Closed { space: s("space")? },
        "betti" => Relation::Betti {
            space: s("space")?,
            n: field_u64(v, "n")? as usize,
            field: parse_ring_spec(field_str(v, "field")?).map_err(|e| nest("field", e))?,
            value: field_u64(v, "value")?,
        },
        "dim" => Relation::Dim { space: s("space")?, d: field_u64(v, "d")? as usize },
        other => {
            return Err(SvolError::Input { path: "kind".into(), message: format!("unknown relation kind `{other}`") })
        }
    })
}

/// The key under which a ring's value is stored: finite fields and
/// `ℤ/p^m` with the trivial seminorm are already canonical, and the
/// weightless rationals and integers keep their own keys.
pub fn canonical(ring: RingSpec) -> RingSpec {
    match (ring.carrier, ring.seminorm) {
        (Carrier::FiniteField(p), _) => RingSpec::fp(p),
        _ => ring,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub space: String,
    pub p: u64,
    pub kind: &'static str,
    pub gap: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub space: String,
    pub ring: RingSpec,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub rows: Vec<Row>,
    pub steps: Vec<Step>,
    pub separations: Vec<Separation>,
}

impl Table {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "space": r.space,
                    "ring": r.ring.to_string(),
                    "lo": format_rational(&r.interval.lo),
                    "hi": r.interval.hi.as_ref().map_or_else(|| "inf".to_string(), format_rational),
                    "lo_step": r.interval.lo_step,
                    "hi_step": r.interval.hi_step,
                    "exact": r.interval.is_exact(),
                })
            })
            .collect();
        let separations: Vec<Value> = self
            .separations
            .iter()
            .map(|s| json!({"space": s.space, "p": s.p, "kind": s.kind, "gap": format_rational(&s.gap)}))
            .collect();
        json!({
            "svol-schema": SCHEMA_VERSION,
            "rows": rows,
            "steps": self.steps.iter().enumerate().map(|(i, s)| s.to_json(i)).collect::<Vec<_>>(),
            "separations": separations,
        })
    }

    /// Replays the derivation of every endpoint in the table.
    pub fn replay_all(&self) -> Result<()> {
        for row in &self.rows {
            for (step, value) in [(row.interval.lo_step, Some(&row.interval.lo)), (row.interval.hi_step, row.interval.hi.as_ref())] {
                if let (Some(id), Some(value)) = (step, value) {
                    if replay(&self.steps, id)? != *value {
                        return Err(SvolError::InvalidModel(format!("row {} {} does not replay", row.space, row.ring)));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
