use std::collections::{BTreeMap, BTreeSet};

use super::{Chain, Model, ModelBuilder};
use crate::error::{Result, SvolError};
use crate::homology::solve_boundary;
use crate::rings::RingSpec;

/// `∂ Σ a_j σ_j = Σ_j a_j Σ_i (−1)^i d_i σ_j`, with cancellation.
pub fn boundary(model: &Model, chain: &Chain) -> Result<Chain> {
    chain.validate(model)?;
    let n = chain.dimension();
    if n == 0 {
        return Ok(Chain::zero(0));
    }
    let mut out = Chain::zero(n - 1);
    for (id, a) in chain.iter() {
        for (i, f) in model.faces(id).iter().enumerate() {
            if i % 2 == 0 {
                out.add_term(f, a);
            } else {
                out.add_term(f, &-a);
            }
        }
    }
    Ok(out)
}

/// Relative cycle test over ℚ, used while validating models.
pub(crate) fn is_relative_cycle_exact(model: &Model, chain: &Chain) -> Result<bool> {
    if chain.dimension() == 0 {
        return Ok(true);
    }
    let bd = boundary(model, chain)?;
    let ok = bd.support().all(|id| model.is_boundary(id));
    Ok(ok)
}

/// True iff `∂(chain)`, reduced into the ring's carrier, lies on the boundary subcomplex.
pub fn verify_relative_cycle(model: &Model, chain: &Chain, spec: &RingSpec) -> Result<bool> {
    if chain.dimension() != model.dim() {
        return Err(SvolError::DimensionMismatch {
            id: "<chain>".into(),
            expected: model.dim(),
            actual: chain.dimension(),
        });
    }
    let reduced = chain.reduce(spec)?;
    if reduced.dimension() == 0 {
        return Ok(true);
    }
    let bd = boundary(model, &reduced)?.reduce(spec)?;
    let ok = bd.support().all(|id| model.is_boundary(id));
    Ok(ok)
}

/// True iff the chain is a relative cycle homologous to the reference cycle over the ring.
pub fn verify_fundamental_cycle(model: &Model, chain: &Chain, spec: &RingSpec) -> Result<bool> {
    if !verify_relative_cycle(model, chain, spec)? {
        return Ok(false);
    }
    let diff = chain.reduce(spec)?.minus(&model.reference().reduce(spec)?);
    Ok(solve_boundary(model, &diff, spec)?.is_some())
}

/// The sub-semi-simplicial set of all iterated faces of the chain's support.
///
/// Simplex ids are preserved, so the returned id map is the inclusion.
pub fn generated_complex(model: &Model, chain: &Chain) -> Result<(Model, BTreeMap<String, String>)> {
    chain.validate(model)?;
    let mut keep: BTreeSet<&str> = BTreeSet::new();
    let mut frontier: Vec<&str> = chain.support().collect();
    while let Some(id) = frontier.pop() {
        if keep.insert(id) {
            frontier.extend(model.faces(id).iter().map(String::as_str));
        }
    }
    let mut b = ModelBuilder::new(chain.dimension());
    b.allow_any_reference();
    if let Some(label) = model.label() {
        b.label(format!("{label}[generated]"));
    }
    for n in 0..=chain.dimension() {
        for id in model.ids(n) {
            if keep.contains(id.as_str()) {
                b.simplex(id.clone(), model.faces(id));
                if model.is_boundary(id) {
                    b.mark_boundary(id.clone());
                }
            }
        }
    }
    for (id, q) in chain.iter() {
        b.reference_term(id.clone(), q.clone());
    }
    let sub = b.build()?;
    let map = keep.iter().map(|id| (id.to_string(), id.to_string())).collect();
    Ok((sub, map))
}
