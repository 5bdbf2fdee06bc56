//! Derivation steps. Every interval endpoint other than the defaults `0` and
//! `∞` points at a step, and a step's value is a function of earlier steps,
//! so any endpoint can be recomputed from its seeds.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Result, SvolError};
use crate::rational::{format_rational, Rational};
use crate::rings::RingSpec;

pub type StepId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Seed,
    Universal,
    Sandwich,
    Trigger,
    Degree,
    Covering,
    Product,
    Betti,
    Closed,
    AlmostAllPrimes,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Seed => "seed",
            Rule::Universal => "universal-integral",
            Rule::Sandwich => "sandwich",
            Rule::Trigger => "qp-zp-trigger",
            Rule::Degree => "degree",
            Rule::Covering => "covering",
            Rule::Product => "product",
            Rule::Betti => "betti",
            Rule::Closed => "closed-lower",
            Rule::AlmostAllPrimes => "almost-all-primes",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// An external value: a cited fact or a checked witness norm.
    Cited { source: String },
    /// A constant lower bound attached to a relation.
    Constant,
    /// `factor · premise`.
    Scaled { factor: Rational, premise: StepId },
    /// `factor · left · right`.
    Product { factor: Rational, left: StepId, right: StepId },
    /// `min(cap, premise)`.
    Capped { cap: Rational, premise: StepId },
}

/// A side condition `value(premise) < below` under which the step is valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub premise: StepId,
    pub below: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub space: String,
    pub ring: RingSpec,
    pub side: Side,
    pub value: Rational,
    pub rule: Rule,
    pub derivation: Derivation,
    pub guard: Option<Guard>,
    pub note: String,
}

impl Step {
    pub fn premises(&self) -> Vec<StepId> {
        let mut out = match &self.derivation {
            Derivation::Cited { .. } | Derivation::Constant => vec![],
            Derivation::Scaled { premise, .. } | Derivation::Capped { premise, .. } => vec![*premise],
            Derivation::Product { left, right, .. } => vec![*left, *right],
        };
        if let Some(g) = &self.guard {
            out.push(g.premise);
        }
        out
    }

    pub fn to_json(&self, id: StepId) -> Value {
        let derivation = match &self.derivation {
            Derivation::Cited { source } => json!({"kind": "cited", "source": source}),
            Derivation::Constant => json!({"kind": "constant"}),
            Derivation::Scaled { factor, premise } => {
                json!({"kind": "scaled", "factor": format_rational(factor), "premise": premise})
            }
            Derivation::Product { factor, left, right } => {
                json!({"kind": "product", "factor": format_rational(factor), "left": left, "right": right})
            }
            Derivation::Capped { cap, premise } => {
                json!({"kind": "capped", "cap": format_rational(cap), "premise": premise})
            }
        };
        let guard = self
            .guard
            .as_ref()
            .map(|g| json!({"premise": g.premise, "below": format_rational(&g.below)}));
        json!({
            "id": id,
            "space": self.space,
            "ring": self.ring.to_string(),
            "side": self.side.to_string(),
            "value": format_rational(&self.value),
            "rule": self.rule.name(),
            "derivation": derivation,
            "guard": guard,
            "note": self.note,
        })
    }
}

/// Recomputes a step from its premises and checks the stored value and guard.
pub fn replay(steps: &[Step], id: StepId) -> Result<Rational> {
    let step = steps.get(id).ok_or_else(|| SvolError::InvalidModel(format!("unknown step {id}")))?;
    let fail = |what: &str| SvolError::InvalidModel(format!("step {id} ({}) does not replay: {what}", step.rule.name()));
    if step.premises().iter().any(|&p| p >= id) {
        return Err(fail("premise recorded after the step"));
    }
    let value = match &step.derivation {
        Derivation::Cited { .. } | Derivation::Constant => step.value.clone(),
        Derivation::Scaled { factor, premise } => factor * replay(steps, *premise)?,
        Derivation::Product { factor, left, right } => factor * replay(steps, *left)? * replay(steps, *right)?,
        Derivation::Capped { cap, premise } => replay(steps, *premise)?.min(cap.clone()),
    };
    if value != step.value {
        return Err(fail(&format!("recomputed {} but recorded {}", format_rational(&value), format_rational(&step.value))));
    }
    if let Some(g) = &step.guard {
        if replay(steps, g.premise)? >= g.below {
            return Err(fail("guard does not hold"));
        }
    }
    Ok(value)
}

/// The rule names along a derivation, outermost first, for error reports.
pub fn describe(steps: &[Step], id: StepId) -> String {
    let step = &steps[id];
    let inner: Vec<String> = step.premises().into_iter().map(|p| describe(steps, p)).collect();
    let head = format!("{}[{} {} {}]", step.rule.name(), step.space, step.ring, format_rational(&step.value));
    if inner.is_empty() {
        head
    } else {
        format!("{head} <- ({})", inner.join(", "))
    }
}
