use num_traits::Zero;
use serde::Serialize;

use super::homology;
use crate::complex::{generated_complex, verify_fundamental_cycle, Chain, Model};
use crate::error::{Result, SvolError};
use crate::rational::Rational;
use crate::rings::RingSpec;

/// Sign applied to the front-face/back-face formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CapSign {
    /// `(−1)^{n(d−n)}`.
    #[default]
    Alternating,
    /// No sign at all.
    Plain,
}

/// `f ⌢ c = ± Σ_j a_j · f(back (d−n)-face of σ_j) · (front n-face of σ_j)`.
///
/// The cochain is passed as a finitely supported map on `(d−n)`-simplices
/// and must vanish on the boundary subcomplex.
pub fn cap_product(model: &Model, cochain: &Chain, chain: &Chain, sign: CapSign) -> Result<Chain> {
    cochain.validate(model)?;
    chain.validate(model)?;
    if let Some(id) = cochain.support().find(|id| model.is_boundary(id)) {
        return Err(SvolError::CochainOnBoundary(id.to_string()));
    }
    let (d, k) = (chain.dimension(), cochain.dimension());
    if k > d {
        return Err(SvolError::DimensionMismatch { id: "<cochain>".into(), expected: d, actual: k });
    }
    let n = d - k;
    let negate = sign == CapSign::Alternating && (n * k) % 2 == 1;
    let mut out = Chain::zero(n);
    for (id, a) in chain.iter() {
        let value = cochain.get(model.back_face(id, k));
        if value.is_zero() {
            continue;
        }
        let term: Rational = a * value;
        out.add_term(model.front_face(id, n), &if negate { -term } else { term });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub ring: String,
    pub degree: usize,
    pub relative_generated: usize,
    pub relative_model: usize,
    pub absolute_generated: usize,
    pub absolute_model: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub support_size: usize,
    pub rows: Vec<ComparisonRow>,
    pub all_hold: bool,
}

/// Compares the homology ranks of the complex generated by a fundamental
/// cycle with those of the ambient model, over ℚ and the requested 𝔽_p.
pub fn comparison_certificate(model: &Model, chain: &Chain, primes: &[u64]) -> Result<ComparisonReport> {
    if !verify_fundamental_cycle(model, chain, &RingSpec::Q)? {
        return Err(SvolError::NotFundamental(RingSpec::Q.to_string()));
    }
    let (generated, _) = generated_complex(model, chain)?;
    let mut rings = vec![RingSpec::Q];
    for &p in primes {
        rings.push(RingSpec::new(crate::rings::Carrier::FiniteField(p), crate::rings::SeminormKind::Trivial)?);
    }
    let mut rows = Vec::new();
    for ring in rings {
        let rel_x = homology(&generated, &ring, true)?;
        let rel_m = homology(model, &ring, true)?;
        let abs_x = homology(&generated, &ring, false)?;
        let abs_m = homology(model, &ring, false)?;
        for n in 0..=model.dim() {
            let row = ComparisonRow {
                ring: ring.to_string(),
                degree: n,
                relative_generated: rel_x.rank(n),
                relative_model: rel_m.rank(n),
                absolute_generated: abs_x.rank(n),
                absolute_model: abs_m.rank(n),
                holds: rel_x.rank(n) >= rel_m.rank(n) && abs_x.rank(n) >= abs_m.rank(n),
            };
            rows.push(row);
        }
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(ComparisonReport { support_size: chain.support_size(), rows, all_hold })
}
