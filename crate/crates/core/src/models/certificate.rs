//! The lower-bound certificate for fundamental cycles of surfaces.
//!
//! On the complex `X` generated by a cycle `c` with support size `k`:
//! if the relative top boundary has a one-dimensional kernel, every
//! interior edge is hit at least twice, so `2·dim C_1(X,∂X) ≤ 3k − b`;
//! combined with `dim C_1(X,∂X) ≥ dim H_1(X,∂X) + k − 1` and the rank
//! bound `dim H_1(X,∂X) ≥ 2g + b − 1 + [b = 0]` this gives
//! `k ≥ 4g + 3b − 4 + 2·[b = 0]`.

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use super::boundary_components;
use crate::complex::{generated_complex, verify_fundamental_cycle, Chain, Model};
use crate::error::{Result, SvolError};
use crate::homology::{homology, ChainComplex, Field, IntegerMatrix};
use crate::rational::Rational;
use crate::rings::RingSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateStatus {
    Certified,
    /// The kernel is too large and a fundamental cycle of smaller support was found.
    Reducible,
    /// Some step failed without a reduction being available.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateStep {
    pub name: &'static str,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct SurfaceCertificate {
    pub status: CertificateStatus,
    pub genus: usize,
    pub boundary_components: usize,
    pub ring: RingSpec,
    pub k: usize,
    pub kernel_dim: usize,
    pub interior_edges: usize,
    pub interior_face_bound: i64,
    pub h1_rank: usize,
    pub derived_lower_bound: Option<i64>,
    pub steps: Vec<CertificateStep>,
    pub reduced_witness: Option<Chain>,
}

impl SurfaceCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status,
            "genus": self.genus,
            "boundary_components": self.boundary_components,
            "ring": self.ring.to_string(),
            "k": self.k,
            "kernel_dim": self.kernel_dim,
            "interior_edges": self.interior_edges,
            "interior_face_bound": self.interior_face_bound,
            "h1_rank": self.h1_rank,
            "derived_lower_bound": self.derived_lower_bound,
            "steps": self.steps,
            "reduced_witness": self.reduced_witness.as_ref().map(Chain::to_json),
        })
    }
}

/// `4g + 3b − 4 + 2·[b = 0]`, with the disk giving 1 and the sphere at least 1.
pub fn surface_bound(g: usize, b: usize) -> i64 {
    let (gi, bi) = (g as i64, b as i64);
    match (g, b) {
        (0, 1) => 1,
        _ => {
            let f = 4 * gi + 3 * bi - 4 + if b == 0 { 2 } else { 0 };
            f.max(1)
        }
    }
}

fn field_rows(m: &IntegerMatrix, field: &Field) -> Vec<Vec<Rational>> {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|x| field.reduce(&Rational::from_integer(x))).collect())
        .collect()
}

/// Relative boundaries of the model supported on the chain's support, over the field.
fn boundary_directions(model: &Model, chain: &Chain, field: &Field) -> Vec<Chain> {
    let d = model.dim();
    let cc = ChainComplex::from_model(model, true);
    let rows = cc.basis(d).unwrap_or(&[]).to_vec();
    let top = cc.rank(d + 1);
    if top == 0 {
        return Vec::new();
    }
    let m = field_rows(&cc.boundary_matrix(d + 1), field);
    let outside: Vec<Vec<Rational>> = rows
        .iter()
        .zip(&m)
        .filter(|(id, _)| chain.get(id).is_zero())
        .map(|(_, r)| r.clone())
        .collect();
    field
        .kernel_basis(&outside, top)
        .into_iter()
        .filter_map(|y| {
            let terms = rows.iter().zip(&m).map(|(id, r)| {
                let v: Rational = r.iter().zip(&y).map(|(a, b)| a * b).sum();
                (id.clone(), field.reduce(&v))
            });
            let z = Chain::from_terms(d, terms);
            (!z.is_zero()).then_some(z)
        })
        .collect()
}

/// The smallest-support chain `c − (c_j / z_j)·z` over directions `z` and positions `j`.
fn reduce_support(chain: &Chain, directions: &[Chain], field: &Field) -> Option<Chain> {
    let mut best: Option<Chain> = None;
    for z in directions {
        for (id, zj) in z.iter() {
            let cj = chain.get(id);
            if cj.is_zero() {
                continue;
            }
            let t = field.reduce(&(&cj * field.inverse(zj)));
            let candidate = chain.minus(&z.scaled(&t)).map_coefficients(|q| field.reduce(q));
            if best.as_ref().map_or(true, |b| candidate.support_size() < b.support_size()) {
                best = Some(candidate);
            }
        }
    }
    best.filter(|b| b.support_size() < chain.support_size())
}

/// Runs the surface lower-bound argument on the complex generated by `chain`.
pub fn surface_minimality_certificate(
    model: &Model,
    chain: &Chain,
    g: usize,
    b: usize,
    field_spec: &RingSpec,
) -> Result<SurfaceCertificate> {
    let field = Field::new(field_spec.scalars())?;
    if !verify_fundamental_cycle(model, chain, field_spec)? {
        return Err(SvolError::NotFundamental(field_spec.to_string()));
    }
    let components = boundary_components(model).len();
    let h1_model = homology(model, &RingSpec::Q, false)?.rank(1);
    let expected_h1 = 2 * g + b.saturating_sub(1);
    if model.dim() != 2 || components != b || h1_model != expected_h1 {
        return Err(SvolError::InvalidModel(format!(
            "(g, b) = ({g}, {b}) is inconsistent with the model: {components} boundary circles, rank H_1 = {h1_model}"
        )));
    }
    let chain = chain.reduce(field_spec)?;
    let (x, _) = generated_complex(model, &chain)?;
    let k = chain.support_size();
    let cc = ChainComplex::from_model(&x, true);
    let d2 = field_rows(&cc.boundary_matrix(2), &field);
    let kernel_dim = cc.rank(2) - field.rank(&d2);
    let mut steps = Vec::new();
    steps.push(CertificateStep {
        name: "kernel",
        statement: format!("dim ker ∂_2(X, ∂X) = {kernel_dim} = 1"),
        holds: kernel_dim == 1,
    });
    let interior_edges = cc.rank(1);
    let face_bound = 3 * k as i64 - b as i64;
    steps.push(CertificateStep {
        name: "interior_faces",
        statement: format!("2·dim C_1(X, ∂X) = {} ≤ 3k − b = {face_bound}", 2 * interior_edges),
        holds: 2 * interior_edges as i64 <= face_bound,
    });
    let h1 = homology(&x, field_spec, true)?.rank(1);
    let h1_needed = 2 * g + b + usize::from(b == 0) - 1;
    steps.push(CertificateStep {
        name: "h1_rank",
        statement: format!("dim H_1(X, ∂X) = {h1} ≥ 2g + b − 1 + [b = 0] = {h1_needed}"),
        holds: h1 >= h1_needed,
    });
    let bound = surface_bound(g, b);
    let counting = 2 * h1 as i64 + b as i64 - 2;
    steps.push(CertificateStep {
        name: "support_bound",
        statement: format!("k = {k} ≥ max(2·dim H_1 + b − 2, {bound}) = {}", counting.max(bound)),
        holds: k as i64 >= counting.max(bound),
    });
    let all_hold = steps.iter().all(|s| s.holds);
    let (status, reduced_witness) = if all_hold {
        (CertificateStatus::Certified, None)
    } else if kernel_dim >= 2 {
        let directions = boundary_directions(model, &chain, &field);
        match reduce_support(&chain, &directions, &field) {
            Some(w) if verify_fundamental_cycle(model, &w, field_spec)? => (CertificateStatus::Reducible, Some(w)),
            _ => (CertificateStatus::Failed, None),
        }
    } else {
        (CertificateStatus::Failed, None)
    };
    Ok(SurfaceCertificate {
        status,
        genus: g,
        boundary_components: b,
        ring: *field_spec,
        k,
        kernel_dim,
        interior_edges,
        interior_face_bound: face_bound,
        h1_rank: h1,
        derived_lower_bound: (status == CertificateStatus::Certified).then_some(bound),
        steps,
        reduced_witness,
    })
}
