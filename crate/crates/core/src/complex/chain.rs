use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use super::{parse_coefficient, Model, SCHEMA_VERSION};
use crate::error::{Result, SvolError};
use crate::rational::{format_rational, Rational};
use crate::rings::RingSpec;

/// A finitely supported chain in one dimension; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    dimension: usize,
    coefficients: BTreeMap<String, Rational>,
}

impl Chain {
    pub fn zero(dimension: usize) -> Chain {
        Chain { dimension, coefficients: BTreeMap::new() }
    }

    pub fn from_terms<I, S>(dimension: usize, terms: I) -> Chain
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut c = Chain::zero(dimension);
        for (id, q) in terms {
            c.add_term(&id.into(), &q);
        }
        c
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coefficients(&self) -> &BTreeMap<String, Rational> {
        &self.coefficients
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.coefficients.iter()
    }

    pub fn get(&self, id: &str) -> Rational {
        self.coefficients.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.coefficients.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.coefficients.keys().map(String::as_str)
    }

    pub fn add_term(&mut self, id: &str, q: &Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.coefficients.entry(id.to_string()).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.coefficients.remove(id);
        }
    }

    pub fn scaled(&self, q: &Rational) -> Chain {
        Chain::from_terms(self.dimension, self.iter().map(|(id, a)| (id.clone(), a * q)))
    }

    pub fn plus(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (id, q) in other.iter() {
            out.add_term(id, q);
        }
        out
    }

    pub fn minus(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (id, q) in other.iter() {
            out.add_term(id, &-q);
        }
        out
    }

    /// Applies a coefficient map, dropping terms that become zero.
    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Chain {
        Chain::from_terms(self.dimension, self.iter().map(|(id, q)| (id.clone(), f(q))))
    }

    /// Brings every coefficient into the ring's carrier.
    pub fn reduce(&self, ring: &RingSpec) -> Result<Chain> {
        let mut out = Chain::zero(self.dimension);
        for (id, q) in self.iter() {
            out.add_term(id, ring.element(q)?.value());
        }
        Ok(out)
    }

    /// The ring-weighted ℓ¹-norm `Σ |a_j|`.
    pub fn norm(&self, ring: &RingSpec) -> Result<Rational> {
        let mut total = Rational::zero();
        for q in self.coefficients.values() {
            total += ring.norm_of(q)?;
        }
        Ok(total)
    }

    /// Plain archimedean ℓ¹-mass `Σ |a_j|`.
    pub fn mass(&self) -> Rational {
        self.coefficients.values().map(|q| q.abs()).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients.values().all(Rational::is_integer)
    }

    /// Checks that every keyed simplex exists in the model at this dimension.
    pub fn validate(&self, model: &Model) -> Result<()> {
        for id in self.coefficients.keys() {
            match model.dim_of(id) {
                None => return Err(SvolError::UnknownSimplex(id.clone())),
                Some(d) if d != self.dimension => {
                    return Err(SvolError::DimensionMismatch {
                        id: id.clone(),
                        expected: self.dimension,
                        actual: d,
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let coefficients: Map<String, Value> = self
            .iter()
            .map(|(id, q)| (id.clone(), json!(format_rational(q))))
            .collect();
        json!({
            "svol-schema": SCHEMA_VERSION,
            "dimension": self.dimension,
            "coefficients": coefficients,
        })
    }

    pub fn from_json(value: &Value) -> Result<Chain> {
        let bad = |m: &str| SvolError::InvalidModel(format!("chain: {m}"));
        let dimension = value
            .get("dimension")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing `dimension`"))? as usize;
        let mut chain = Chain::zero(dimension);
        let coefficients = value
            .get("coefficients")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing `coefficients` object"))?;
        for (id, q) in coefficients {
            chain.add_term(id, &parse_coefficient(q)?);
        }
        Ok(chain)
    }
}
