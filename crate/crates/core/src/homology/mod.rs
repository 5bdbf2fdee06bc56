//! Homology of models and raw integer chain complexes via the Smith normal form.

mod cap;
mod field;
mod snf;
mod solve;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::complex::Model;
use crate::error::{Result, SvolError};
use crate::rational::{int_valuation, prime_factors};
use crate::rings::{RingSpec, Scalars};

pub use cap::{cap_product, comparison_certificate, CapSign, ComparisonReport, ComparisonRow};
pub use field::Field;
pub use snf::{smith_normal_form, IntegerMatrix, SmithDecomposition};
pub use solve::{lift_cycle_mod_p, residue_divide, solve_boundary, solve_linear, solve_with_smith};

/// A finite chain complex of free abelian groups, `∂_n : C_n → C_{n−1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    /// `ranks[n] = rank C_n`.
    ranks: Vec<usize>,
    /// `boundaries[n]` is `∂_n` as a `ranks[n−1] × ranks[n]` matrix; index 0 is unused.
    boundaries: Vec<IntegerMatrix>,
    /// Simplex ids per degree when the complex comes from a model.
    basis: Option<Vec<Vec<String>>>,
}

impl ChainComplex {
    /// Cellular chains of a model; the relative version drops boundary-marked simplices.
    pub fn from_model(model: &Model, relative: bool) -> ChainComplex {
        let top = model.top_dim().unwrap_or(0);
        let basis: Vec<Vec<String>> = (0..=top)
            .map(|n| {
                model
                    .ids(n)
                    .iter()
                    .filter(|id| !(relative && model.is_boundary(id)))
                    .cloned()
                    .collect()
            })
            .collect();
        let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
        let mut boundaries = vec![IntegerMatrix::zeros(0, ranks[0])];
        for n in 1..=top {
            let row_of: std::collections::HashMap<&str, usize> =
                basis[n - 1].iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
            let mut m = IntegerMatrix::zeros(ranks[n - 1], ranks[n]);
            for (j, id) in basis[n].iter().enumerate() {
                for (i, f) in model.faces(id).iter().enumerate() {
                    if let Some(&r) = row_of.get(f.as_str()) {
                        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                        m.add_to(r, j, &sign);
                    }
                }
            }
            boundaries.push(m);
        }
        ChainComplex { ranks, boundaries, basis: Some(basis) }
    }

    /// Builds a complex from `(degree n, ∂_n)` pairs; missing degrees are zero maps.
    pub fn from_boundaries(maps: Vec<(usize, IntegerMatrix)>) -> Result<ChainComplex> {
        let top = maps.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let mut ranks: Vec<Option<usize>> = vec![None; top + 1];
        let mut set_rank = |n: usize, r: usize| -> Result<()> {
            match ranks[n] {
                Some(old) if old != r => Err(SvolError::InvalidModel(format!(
                    "raw complex: inconsistent rank {r} vs {old} for C_{n}"
                ))),
                _ => {
                    ranks[n] = Some(r);
                    Ok(())
                }
            }
        };
        for (n, m) in &maps {
            if *n == 0 {
                return Err(SvolError::InvalidModel("raw complex: degrees start at 1".into()));
            }
            set_rank(*n, m.cols())?;
            set_rank(n - 1, m.rows())?;
        }
        let ranks: Vec<usize> = ranks.into_iter().map(|r| r.unwrap_or(0)).collect();
        let mut boundaries: Vec<IntegerMatrix> =
            (0..=top).map(|n| IntegerMatrix::zeros(if n == 0 { 0 } else { ranks[n - 1] }, ranks[n])).collect();
        for (n, m) in maps {
            boundaries[n] = m;
        }
        let cc = ChainComplex { ranks, boundaries, basis: None };
        for n in 2..=top {
            if !cc.boundaries[n - 1].mul(&cc.boundaries[n]).is_zero() {
                return Err(SvolError::InvalidModel(format!("raw complex: ∂_{} ∘ ∂_{n} ≠ 0", n - 1)));
            }
        }
        Ok(cc)
    }

    /// Parses `{"boundaries": [{"degree", "rows", "cols", "entries"}]}`.
    pub fn from_json(value: &Value) -> Result<ChainComplex> {
        let bad = |m: &str| SvolError::InvalidModel(format!("raw complex: {m}"));
        let list = value
            .get("boundaries")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `boundaries` array"))?;
        let mut maps = Vec::new();
        for item in list {
            let field = |k: &str| item.get(k).and_then(Value::as_u64).ok_or_else(|| bad(&format!("missing `{k}`")));
            let (n, rows, cols) = (field("degree")? as usize, field("rows")? as usize, field("cols")? as usize);
            let entries = item.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing `entries`"))?;
            if entries.len() != rows {
                return Err(bad("row count does not match `rows`"));
            }
            let mut m = IntegerMatrix::zeros(rows, cols);
            for (i, row) in entries.iter().enumerate() {
                let row = row.as_array().ok_or_else(|| bad("rows must be arrays"))?;
                if row.len() != cols {
                    return Err(bad("column count does not match `cols`"));
                }
                for (j, x) in row.iter().enumerate() {
                    let v: BigInt = match x {
                        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("entries must be integers"))?,
                        Value::String(s) => s.parse().map_err(|_| bad("entries must be integers"))?,
                        _ => return Err(bad("entries must be integers")),
                    };
                    m.set(i, j, v);
                }
            }
            maps.push((n, m));
        }
        ChainComplex::from_boundaries(maps)
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    /// `∂_n`, with the zero map outside the stored range.
    pub fn boundary_matrix(&self, n: usize) -> IntegerMatrix {
        if n >= 1 && n < self.boundaries.len() {
            self.boundaries[n].clone()
        } else {
            IntegerMatrix::zeros(if n == 0 { 0 } else { self.rank(n - 1) }, self.rank(n))
        }
    }

    pub fn basis(&self, n: usize) -> Option<&[String]> {
        self.basis.as_ref().and_then(|b| b.get(n)).map(Vec::as_slice)
    }

    /// Smith forms of `∂_0 … ∂_{top+1}` (the outer two are zero maps).
    fn smith_forms(&self) -> Vec<SmithDecomposition> {
        (0..=self.top_degree() + 1).map(|n| smith_normal_form(&self.boundary_matrix(n))).collect()
    }

    /// Elementary divisors > 1 of `∂_{n+1}`: the torsion of `H_n(C; ℤ)`.
    pub fn torsion(&self, n: usize) -> Vec<BigInt> {
        smith_normal_form(&self.boundary_matrix(n + 1))
            .divisors
            .into_iter()
            .filter(|d| *d > BigInt::one())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub degree: usize,
    /// Free rank over ℤ, or the dimension over a field.
    pub rank: usize,
    /// Torsion divisors (integral and local coefficients only).
    pub torsion: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub ring: String,
    pub relative: bool,
    pub degrees: Vec<DegreeHomology>,
}

impl HomologySummary {
    pub fn rank(&self, n: usize) -> usize {
        self.degrees.get(n).map_or(0, |d| d.rank)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.rank).collect()
    }
}

/// Homology of a chain complex with coefficients in `ℤ`, `ℤ_(p)`, `ℚ` or `𝔽_p`.
pub fn complex_homology(cc: &ChainComplex, spec: &RingSpec, relative: bool) -> Result<HomologySummary> {
    let forms = cc.smith_forms();
    let scalars = spec.scalars();
    let mut degrees = Vec::new();
    for n in 0..=cc.top_degree() {
        let (out_form, in_form) = (&forms[n], &forms[n + 1]);
        let (rank, torsion) = match scalars {
            Scalars::Integers | Scalars::Rationals => {
                let rank = cc.rank(n) - out_form.rank() - in_form.rank();
                let torsion = if scalars == Scalars::Integers {
                    in_form.divisors.iter().filter(|d| **d > BigInt::one()).map(BigInt::to_string).collect()
                } else {
                    Vec::new()
                };
                (rank, torsion)
            }
            Scalars::Localized(p) => {
                let rank = cc.rank(n) - out_form.rank() - in_form.rank();
                let pb = BigInt::from(p);
                let torsion = in_form
                    .divisors
                    .iter()
                    .filter(|d| !d.is_zero() && (*d % &pb).is_zero())
                    .map(|d| crate::rational::pow(p, int_valuation(d, p)).to_string())
                    .collect();
                (rank, torsion)
            }
            Scalars::Residues { p, m: 1 } => (cc.rank(n) - out_form.rank_mod(p) - in_form.rank_mod(p), Vec::new()),
            Scalars::Residues { .. } => {
                return Err(SvolError::Unsupported(format!(
                    "homology over {spec}; use pm_torsion_dimension for ℤ/p^m coefficients"
                )))
            }
        };
        degrees.push(DegreeHomology { degree: n, rank, torsion });
    }
    Ok(HomologySummary { ring: spec.to_string(), relative, degrees })
}

/// Absolute or relative homology of a model, in degrees up to its dimension.
pub fn homology(model: &Model, spec: &RingSpec, relative: bool) -> Result<HomologySummary> {
    let cc = ChainComplex::from_model(model, relative);
    let mut summary = complex_homology(&cc, spec, relative)?;
    summary.degrees.truncate(model.dim() + 1);
    Ok(summary)
}

/// Primes dividing a nonzero elementary divisor of a matrix.
pub fn matrix_divisor_primes(m: &IntegerMatrix) -> BTreeSet<u64> {
    smith_normal_form(m)
        .divisors
        .iter()
        .filter(|d| !d.is_zero())
        .flat_map(prime_factors)
        .collect()
}

/// Primes dividing an elementary divisor of the relative top boundary `∂_d` of `(X, ∂X)`.
pub fn elementary_divisor_primes(model: &Model) -> BTreeSet<u64> {
    let cc = ChainComplex::from_model(model, true);
    matrix_divisor_primes(&cc.boundary_matrix(model.dim()))
}

/// `dim_{𝔽_p} p^m · H_n(C ⊗ ℤ/p^{m+1})`.
///
/// By the universal coefficient theorem each free summand contributes one
/// dimension, and each cyclic summand `ℤ/d` of `H_n(C)` or `H_{n−1}(C)`
/// contributes one exactly when `v_p(d) ≥ m + 1`.
pub fn pm_torsion_dimension(cc: &ChainComplex, p: u64, m: u32, n: usize) -> usize {
    let free = complex_homology(cc, &RingSpec::Q, false).expect("rational homology").rank(n);
    let deep = |degree: usize| {
        cc.torsion(degree).iter().filter(|d| int_valuation(d, p) > m).count()
    };
    let lower = if n == 0 { 0 } else { deep(n - 1) };
    free + deep(n) + lower
}

#[cfg(test)]
mod tests;
