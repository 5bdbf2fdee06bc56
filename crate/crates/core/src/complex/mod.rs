//! Finite semi-simplicial models and chains with exact coefficients.

mod chain;
mod cover;
mod ops;
mod product;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Result, SvolError};
use crate::rational::{format_rational, parse_rational};

pub use chain::Chain;
pub use cover::{transfer, voltage_cover, CoveringData};
pub use ops::{
    boundary, generated_complex, verify_fundamental_cycle, verify_relative_cycle,
};
pub use product::cross_product;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug)]
struct Entry {
    dim: usize,
    index: usize,
    faces: Vec<String>,
}

/// A finite semi-simplicial set with a face-closed boundary subcomplex and
/// a reference relative fundamental cycle in dimension `dim`.
///
/// Simplices of dimension `dim + 1` are allowed; they only contribute
/// boundaries to the chain lattice.
#[derive(Clone, Debug)]
pub struct Model {
    dim: usize,
    label: Option<String>,
    levels: Vec<Vec<String>>,
    entries: HashMap<String, Entry>,
    boundary: BTreeSet<String>,
    reference: Chain,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = Some(label.into());
    }

    /// Highest dimension holding a simplex, or `None` for the empty model.
    pub fn top_dim(&self) -> Option<usize> {
        self.levels.iter().rposition(|l| !l.is_empty())
    }

    pub fn ids(&self, n: usize) -> &[String] {
        self.levels.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, n: usize) -> usize {
        self.ids(n).len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn dim_of(&self, id: &str) -> Option<usize> {
        self.entries.get(id).map(|e| e.dim)
    }

    /// Position of a simplex within its dimension.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.entries.get(id).map(|e| e.index)
    }

    pub fn faces(&self, id: &str) -> &[String] {
        self.entries.get(id).map(|e| e.faces.as_slice()).unwrap_or(&[])
    }

    pub fn face(&self, id: &str, i: usize) -> &str {
        &self.faces(id)[i]
    }

    /// Applies the face maps `d_{n}, d_{n-1}, …, d_{k+1}`: the front k-face.
    pub fn front_face<'a>(&'a self, id: &'a str, k: usize) -> &'a str {
        let mut cur = id;
        let n = self.dim_of(id).expect("known simplex");
        for i in ((k + 1)..=n).rev() {
            cur = self.face(cur, i);
        }
        cur
    }

    /// Applies `d_0` repeatedly: the back k-face.
    pub fn back_face<'a>(&'a self, id: &'a str, k: usize) -> &'a str {
        let mut cur = id;
        let n = self.dim_of(id).expect("known simplex");
        for _ in k..n {
            cur = self.face(cur, 0);
        }
        cur
    }

    pub fn is_boundary(&self, id: &str) -> bool {
        self.boundary.contains(id)
    }

    pub fn boundary_ids(&self) -> &BTreeSet<String> {
        &self.boundary
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn reference(&self) -> &Chain {
        &self.reference
    }

    /// Ids of dimension `n` not in the boundary subcomplex.
    pub fn interior_ids(&self, n: usize) -> Vec<&str> {
        self.ids(n).iter().filter(|s| !self.is_boundary(s)).map(String::as_str).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, l)| if n % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Euler characteristic of the boundary subcomplex.
    pub fn boundary_euler_characteristic(&self) -> i64 {
        self.boundary
            .iter()
            .map(|s| if self.entries[s].dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn to_builder(&self) -> ModelBuilder {
        let mut b = ModelBuilder::new(self.dim);
        b.label = self.label.clone();
        for level in &self.levels {
            for id in level {
                b.simplex(id.clone(), &self.entries[id].faces);
            }
        }
        for id in &self.boundary {
            b.mark_boundary(id.clone());
        }
        b.reference = self.reference.coefficients().clone();
        b
    }

    pub fn to_json(&self) -> Value {
        let mut simplices = Map::new();
        for (n, level) in self.levels.iter().enumerate() {
            let items: Vec<Value> = if n == 0 {
                level.iter().map(|id| json!(id)).collect()
            } else {
                level
                    .iter()
                    .map(|id| json!({"id": id, "faces": self.entries[id].faces}))
                    .collect()
            };
            simplices.insert(n.to_string(), Value::Array(items));
        }
        let reference: Map<String, Value> = self
            .reference
            .iter()
            .map(|(id, q)| (id.clone(), json!(format_rational(q))))
            .collect();
        let mut out = json!({
            "svol-schema": SCHEMA_VERSION,
            "dim": self.dim,
            "simplices": simplices,
            "boundary": self.boundary.iter().collect::<Vec<_>>(),
            "reference_cycle": reference,
        });
        if let Some(label) = &self.label {
            out["label"] = json!(label);
        }
        out
    }

    pub fn from_json(value: &Value) -> Result<Model> {
        let bad = |m: &str| SvolError::InvalidModel(m.to_string());
        let dim = value
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing or non-integer `dim`"))? as usize;
        let mut b = ModelBuilder::new(dim);
        if let Some(label) = value.get("label").and_then(Value::as_str) {
            b.label(label);
        }
        let simplices = value
            .get("simplices")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing `simplices` object"))?;
        let mut levels: Vec<(usize, &Vec<Value>)> = Vec::new();
        for (key, items) in simplices {
            let n: usize = key.parse().map_err(|_| bad("simplex level keys must be integers"))?;
            let items = items.as_array().ok_or_else(|| bad("simplex levels must be arrays"))?;
            levels.push((n, items));
        }
        levels.sort_by_key(|(n, _)| *n);
        for (n, items) in levels {
            for item in items {
                if n == 0 {
                    let id = item
                        .as_str()
                        .or_else(|| item.get("id").and_then(Value::as_str))
                        .ok_or_else(|| bad("vertex ids must be strings"))?;
                    b.vertex(id);
                    continue;
                }
                let id = item
                    .get("id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("simplex entries need an `id`"))?;
                let faces: Vec<String> = item
                    .get("faces")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("simplex entries need `faces`"))?
                    .iter()
                    .map(|f| f.as_str().map(str::to_string).ok_or_else(|| bad("face ids must be strings")))
                    .collect::<Result<_>>()?;
                if faces.len() != n + 1 {
                    return Err(SvolError::InvalidModel(format!(
                        "simplex `{id}` at level {n} has {} faces",
                        faces.len()
                    )));
                }
                b.simplex(id, &faces);
            }
        }
        if let Some(bd) = value.get("boundary") {
            for id in bd.as_array().ok_or_else(|| bad("`boundary` must be an array"))? {
                b.mark_boundary(id.as_str().ok_or_else(|| bad("boundary ids must be strings"))?);
            }
        }
        if let Some(reference) = value.get("reference_cycle") {
            let obj = reference.as_object().ok_or_else(|| bad("`reference_cycle` must be an object"))?;
            for (id, q) in obj {
                b.reference_term(id, parse_coefficient(q)?);
            }
        }
        b.build()
    }

    /// Stable content hash of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let mut v = self.to_json();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("label");
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        format!("model:{}", &hex::encode(digest)[..16])
    }

    /// The label if present, otherwise the content hash.
    pub fn space_id(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.content_hash())
    }
}

pub(crate) fn parse_coefficient(v: &Value) -> Result<crate::rational::Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(crate::rational::rat(n.as_i64().unwrap_or_default())),
        other => Err(SvolError::MalformedRational(other.to_string())),
    }
}

/// Incremental construction with validation at [`ModelBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    dim: usize,
    label: Option<String>,
    order: Vec<(String, Vec<String>)>,
    boundary: BTreeSet<String>,
    reference: BTreeMap<String, crate::rational::Rational>,
    unchecked_reference: bool,
}

impl ModelBuilder {
    pub fn new(dim: usize) -> Self {
        ModelBuilder { dim, ..Default::default() }
    }

    pub fn label(&mut self, label: impl Into<String>) -> &mut Self {
        self.label = Some(label.into());
        self
    }

    pub fn vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.order.push((id.into(), Vec::new()));
        self
    }

    pub fn simplex<S: AsRef<str>>(&mut self, id: impl Into<String>, faces: &[S]) -> &mut Self {
        self.order.push((id.into(), faces.iter().map(|f| f.as_ref().to_string()).collect()));
        self
    }

    pub fn mark_boundary(&mut self, id: impl Into<String>) -> &mut Self {
        self.boundary.insert(id.into());
        self
    }

    pub fn reference_term(&mut self, id: impl Into<String>, q: crate::rational::Rational) -> &mut Self {
        let id = id.into();
        let entry = self.reference.entry(id).or_default();
        *entry += q;
        self
    }

    /// Keeps the reference chain even when it is a cycle only over a finite field.
    pub(crate) fn allow_any_reference(&mut self) -> &mut Self {
        self.unchecked_reference = true;
        self
    }

    pub fn build(&self) -> Result<Model> {
        let invalid = |m: String| Err(SvolError::InvalidModel(m));
        let mut levels: Vec<Vec<String>> = Vec::new();
        let mut entries: HashMap<String, Entry> = HashMap::new();
        for (id, faces) in &self.order {
            if entries.contains_key(id) {
                return invalid(format!("duplicate simplex id `{id}`"));
            }
            let dim = if faces.is_empty() { 0 } else { faces.len() - 1 };
            if dim > 0 || !faces.is_empty() {
                if faces.len() < 2 {
                    return invalid(format!("simplex `{id}` needs at least two faces"));
                }
                for f in faces {
                    match entries.get(f) {
                        None => return invalid(format!("face `{f}` of `{id}` is not defined before it")),
                        Some(e) if e.dim + 1 != dim => {
                            return invalid(format!("face `{f}` of `{id}` has dimension {}", e.dim))
                        }
                        _ => {}
                    }
                }
            }
            if levels.len() <= dim {
                levels.resize(dim + 1, Vec::new());
            }
            let index = levels[dim].len();
            levels[dim].push(id.clone());
            entries.insert(id.clone(), Entry { dim, index, faces: faces.clone() });
        }
        if levels.len() > self.dim + 2 {
            return invalid(format!("simplices above dimension {} are not allowed", self.dim + 1));
        }
        levels.resize(levels.len().max(self.dim + 1), Vec::new());
        for (id, e) in &entries {
            for j in 0..e.faces.len() {
                for i in 0..j {
                    if e.dim < 2 {
                        continue;
                    }
                    let lhs = &entries[&e.faces[j]].faces[i];
                    let rhs = &entries[&e.faces[i]].faces[j - 1];
                    if lhs != rhs {
                        return invalid(format!("face identity d{i}d{j} = d{}d{i} fails at `{id}`", j - 1));
                    }
                }
            }
        }
        for id in &self.boundary {
            let Some(e) = entries.get(id) else {
                return invalid(format!("boundary simplex `{id}` is not defined"));
            };
            if let Some(f) = e.faces.iter().find(|f| !self.boundary.contains(*f)) {
                return invalid(format!("boundary is not face-closed: `{f}` is a face of `{id}`"));
            }
        }
        let mut reference = Chain::zero(self.dim);
        for (id, q) in &self.reference {
            match entries.get(id) {
                None => return Err(SvolError::UnknownSimplex(id.clone())),
                Some(e) if e.dim != self.dim => {
                    return Err(SvolError::DimensionMismatch { id: id.clone(), expected: self.dim, actual: e.dim })
                }
                _ => reference.add_term(id, q),
            }
        }
        let model = Model {
            dim: self.dim,
            label: self.label.clone(),
            levels,
            entries,
            boundary: self.boundary.clone(),
            reference,
        };
        if !self.unchecked_reference && !ops::is_relative_cycle_exact(&model, &model.reference)? {
            return invalid("reference cycle has boundary off the boundary subcomplex".into());
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests;
