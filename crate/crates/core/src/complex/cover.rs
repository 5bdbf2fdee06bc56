use std::collections::BTreeMap;

use super::{Chain, Model, ModelBuilder};
use crate::error::{Result, SvolError};

/// A finite ℓ-sheeted covering between two models, given simplexwise.
#[derive(Clone, Debug)]
pub struct CoveringData {
    pub total: Model,
    pub base: Model,
    pub projection: BTreeMap<String, String>,
    pub sheets: usize,
}

impl CoveringData {
    /// Checks that the projection commutes with faces, preserves the
    /// boundary and has exactly `sheets` preimages over every simplex.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SvolError::InvalidCovering(m));
        if self.sheets == 0 {
            return bad("a covering needs at least one sheet".into());
        }
        for n in 0..=self.total.top_dim().unwrap_or(0) {
            for id in self.total.ids(n) {
                let Some(image) = self.projection.get(id) else {
                    return bad(format!("`{id}` has no image"));
                };
                if self.base.dim_of(image) != Some(n) {
                    return bad(format!("`{id}` maps to `{image}` of the wrong dimension"));
                }
                if self.total.is_boundary(id) != self.base.is_boundary(image) {
                    return bad(format!("`{id}` and `{image}` disagree on the boundary"));
                }
                for (i, f) in self.total.faces(id).iter().enumerate() {
                    if self.projection.get(f).map(String::as_str) != Some(self.base.face(image, i)) {
                        return bad(format!("projection does not commute with d{i} at `{id}`"));
                    }
                }
            }
        }
        let preimages = self.preimages();
        for n in 0..=self.base.top_dim().unwrap_or(0) {
            for id in self.base.ids(n) {
                let count = preimages.get(id.as_str()).map_or(0, Vec::len);
                if count != self.sheets {
                    return bad(format!("`{id}` has {count} preimages, expected {}", self.sheets));
                }
            }
        }
        if self.total.euler_characteristic() != self.sheets as i64 * self.base.euler_characteristic() {
            return bad("Euler characteristic is not multiplicative".into());
        }
        Ok(())
    }

    /// Base simplex → its preimages in total-model order.
    pub fn preimages(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for n in 0..=self.total.top_dim().unwrap_or(0) {
            for id in self.total.ids(n) {
                if let Some(image) = self.projection.get(id) {
                    out.entry(image.as_str()).or_default().push(id.as_str());
                }
            }
        }
        out
    }
}

/// Lifts a base chain by summing all preimages of each simplex.
pub fn transfer(cov: &CoveringData, chain: &Chain) -> Result<Chain> {
    chain.validate(&cov.base)?;
    let preimages = cov.preimages();
    let mut out = Chain::zero(chain.dimension());
    for (id, q) in chain.iter() {
        let lifts = preimages.get(id.as_str()).ok_or_else(|| {
            SvolError::InvalidCovering(format!("`{id}` has no preimages"))
        })?;
        for lift in lifts {
            out.add_term(lift, q);
        }
    }
    Ok(out)
}

fn lift_id(id: &str, sheet: i64) -> String {
    format!("{id}@{sheet}")
}

/// The cyclic k-sheeted cover defined by integer voltages on edges.
///
/// A lifted simplex `(σ, s)` has its leading vertex on sheet `s`; the face
/// `d_0` moves to sheet `s + w(front edge of σ)`, every other face stays on
/// sheet `s`. Edges without a voltage carry 0. The voltages must sum
/// consistently around every triangle, which the model validation enforces.
pub fn voltage_cover(base: &Model, voltages: &BTreeMap<String, i64>, k: usize) -> Result<CoveringData> {
    if k == 0 {
        return Err(SvolError::InvalidCovering("a covering needs at least one sheet".into()));
    }
    let k_i = k as i64;
    let mut b = ModelBuilder::new(base.dim());
    b.label(match base.label() {
        Some(l) => format!("{l}~{k}"),
        None => format!("cover~{k}"),
    });
    let mut projection = BTreeMap::new();
    for n in 0..=base.top_dim().unwrap_or(0) {
        for id in base.ids(n) {
            let shift = if n == 0 {
                0
            } else {
                voltages.get(base.front_face(id, 1)).copied().unwrap_or(0)
            };
            for s in 0..k_i {
                let faces: Vec<String> = base
                    .faces(id)
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let sheet = if i == 0 { (s + shift).rem_euclid(k_i) } else { s };
                        lift_id(f, sheet)
                    })
                    .collect();
                let lifted = lift_id(id, s);
                b.simplex(lifted.clone(), &faces);
                if base.is_boundary(id) {
                    b.mark_boundary(lifted.clone());
                }
                projection.insert(lifted, id.clone());
            }
        }
    }
    for (id, q) in base.reference().iter() {
        for s in 0..k_i {
            b.reference_term(lift_id(id, s), q.clone());
        }
    }
    let total = b.build().map_err(|e| SvolError::InvalidCovering(e.to_string()))?;
    let cov = CoveringData { total, base: base.clone(), projection, sheets: k };
    cov.validate()?;
    Ok(cov)
}
