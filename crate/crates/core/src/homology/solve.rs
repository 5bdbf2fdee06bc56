use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{smith_normal_form, ChainComplex, IntegerMatrix, SmithDecomposition};
use crate::complex::{verify_relative_cycle, Chain, Model};
use crate::error::{Result, SvolError};
use crate::rational::{self, int_valuation, Rational};
use crate::rings::{RingSpec, Scalars};

/// The unique reduced solution `y` of `d·y ≡ c (mod p^m)`, when one exists.
///
/// With `e = min(v_p(d), m)`, solvability means `p^e | c`; the solution set
/// is then `y_0 + p^{m−e}ℤ` and `y_0 ∈ [0, p^{m−e})` is returned.
pub fn residue_divide(c: &BigInt, d: &BigInt, p: u64, m: u32) -> Option<BigInt> {
    let modulus = rational::pow(p, m);
    let c = c.mod_floor(&modulus);
    let d = d.mod_floor(&modulus);
    if d.is_zero() {
        return c.is_zero().then(BigInt::zero);
    }
    let e = int_valuation(&d, p).min(m);
    if !c.is_zero() && int_valuation(&c, p) < e {
        return None;
    }
    let pe = rational::pow(p, e);
    let reduced = rational::pow(p, m - e);
    if reduced.is_one() {
        return Some(BigInt::zero());
    }
    let inv = rational::mod_inverse(&(&d / &pe), &reduced).expect("unit after removing p");
    Some(((&c / &pe) * inv).mod_floor(&reduced))
}

fn reduce_entry(q: &Rational, scalars: Scalars) -> Option<Rational> {
    scalars.reduce(q)
}

/// Solves `A·x = b` over the given scalars using a precomputed Smith form of `A`.
pub fn solve_with_smith(smith: &SmithDecomposition, b: &[Rational], scalars: Scalars) -> Option<Vec<Rational>> {
    let rows = smith.u.rows();
    let cols = smith.v.rows();
    assert_eq!(b.len(), rows, "right-hand side has the wrong length");
    let b: Vec<Rational> = b.iter().map(|q| reduce_entry(q, scalars)).collect::<Option<_>>()?;
    let mut c = vec![Rational::zero(); rows];
    for (i, ci) in c.iter_mut().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let u = smith.u.get(i, j);
            if !u.is_zero() && !bj.is_zero() {
                *ci += bj * Rational::from_integer(u.clone());
            }
        }
    }
    let mut y = vec![Rational::zero(); cols];
    for (i, ci) in c.iter().enumerate() {
        let d = smith.divisors.get(i).cloned().unwrap_or_else(BigInt::zero);
        match scalars {
            Scalars::Residues { p, m } => {
                let ci = reduce_entry(ci, scalars)?.to_integer();
                let yi = residue_divide(&ci, &d, p, m)?;
                if i < cols {
                    y[i] = Rational::from_integer(yi);
                }
            }
            _ if d.is_zero() => {
                if !ci.is_zero() {
                    return None;
                }
            }
            Scalars::Integers => {
                let (q, r) = ci.to_integer().div_rem(&d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = Rational::from_integer(q);
            }
            Scalars::Localized(_) => {
                let q = ci / Rational::from_integer(d.clone());
                y[i] = scalars.reduce(&q)?;
            }
            Scalars::Rationals => y[i] = ci / Rational::from_integer(d.clone()),
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, xi) in x.iter_mut().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let v = smith.v.get(i, j);
            if !v.is_zero() && !yj.is_zero() {
                *xi += yj * Rational::from_integer(v.clone());
            }
        }
        *xi = reduce_entry(xi, scalars).expect("solution stays in the carrier");
    }
    Some(x)
}

/// Solves `A·x = b` over the given scalars, returning any solution.
pub fn solve_linear(a: &IntegerMatrix, b: &[Rational], scalars: Scalars) -> Option<Vec<Rational>> {
    solve_with_smith(&smith_normal_form(a), b, scalars)
}

/// A relative chain `x` with `∂x = target` modulo the boundary subcomplex, if one exists.
pub fn solve_boundary(model: &Model, target: &Chain, spec: &RingSpec) -> Result<Option<Chain>> {
    target.validate(model)?;
    let target = target.reduce(spec)?;
    let n = target.dimension();
    let cc = ChainComplex::from_model(model, true);
    let rows = cc.basis(n).unwrap_or(&[]).to_vec();
    let b: Vec<Rational> = rows.iter().map(|id| target.get(id)).collect();
    let a = cc.boundary_matrix(n + 1);
    let Some(x) = solve_linear(&a, &b, spec.scalars()) else {
        return Ok(None);
    };
    let cols = cc.basis(n + 1).unwrap_or(&[]);
    Ok(Some(Chain::from_terms(n + 1, cols.iter().cloned().zip(x))))
}

/// Lifts a relative 𝔽_p-cycle of top dimension to an integral relative cycle
/// reducing to it, or `None` when the mod-p cycle is not such a reduction.
pub fn lift_cycle_mod_p(model: &Model, cycle: &Chain, p: u64) -> Result<Option<Chain>> {
    let field = RingSpec::fp(p);
    if !verify_relative_cycle(model, cycle, &field)? {
        return Err(SvolError::NotACycle(field.to_string()));
    }
    let cycle = cycle.reduce(&field)?;
    if cycle.is_zero() {
        return Ok(Some(Chain::zero(cycle.dimension())));
    }
    let d = model.dim();
    let cc = ChainComplex::from_model(model, true);
    let ids = cc.basis(d).unwrap_or(&[]).to_vec();
    let smith = smith_normal_form(&cc.boundary_matrix(d));
    let rank = smith.rank();
    let kernel: Vec<Vec<BigInt>> = (rank..ids.len()).map(|j| smith.v.column(j)).collect();
    let mut k = IntegerMatrix::zeros(ids.len(), kernel.len());
    for (j, col) in kernel.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            k.set(i, j, x.clone());
        }
    }
    let b: Vec<Rational> = ids.iter().map(|id| cycle.get(id)).collect();
    let Some(w) = solve_linear(&k, &b, field.scalars()) else {
        return Ok(None);
    };
    let mut lift = Chain::zero(d);
    for (i, id) in ids.iter().enumerate() {
        let mut acc = BigInt::zero();
        for (j, wj) in w.iter().enumerate() {
            acc += k.get(i, j) * wj.to_integer();
        }
        lift.add_term(id, &Rational::from_integer(acc));
    }
    debug_assert_eq!(lift.reduce(&field)?, cycle);
    Ok(Some(lift))
}
