//! The affine lattice `class_rep + im ∂_{d+1}` in the relative top chains.
//!
//! A Smith decomposition `U·∂·V = D` gives the image basis `d_i · U⁻¹e_i`
//! for `i < rank`; the columns `U⁻¹e_i` are part of a unimodular basis, so
//! coordinates along them are unique over every scalar ring.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::{Chain, Model};
use crate::homology::{smith_normal_form, ChainComplex};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub(crate) struct Coset {
    /// Relative top-dimensional simplex ids, in model order.
    pub ids: Vec<String>,
    /// The class representative as a coefficient vector.
    pub base: Vec<Rational>,
    /// Unimodular directions `U⁻¹e_i` spanning the image over ℚ.
    pub directions: Vec<Vec<BigInt>>,
    /// Nonzero elementary divisors `d_i` matching the directions.
    pub divisors: Vec<BigInt>,
}

impl Coset {
    pub fn new(model: &Model, class_rep: &Chain) -> Coset {
        let d = model.dim();
        let cc = ChainComplex::from_model(model, true);
        let ids = cc.basis(d).unwrap_or(&[]).to_vec();
        let base = ids.iter().map(|id| class_rep.get(id)).collect();
        let smith = smith_normal_form(&cc.boundary_matrix(d + 1));
        let rank = smith.rank();
        let directions = (0..rank).map(|i| smith.u_inv.column(i)).collect();
        let divisors = smith.divisors[..rank].to_vec();
        Coset { ids, base, directions, divisors }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// The integral image generators `d_i · U⁻¹e_i`.
    pub fn integral_generators(&self) -> Vec<Vec<BigInt>> {
        self.directions
            .iter()
            .zip(&self.divisors)
            .map(|(u, d)| u.iter().map(|x| x * d).collect())
            .collect()
    }

    /// `base + Σ y_i g_i` for the given generators.
    pub fn point(&self, generators: &[Vec<BigInt>], y: &[Rational]) -> Vec<Rational> {
        let mut x = self.base.clone();
        for (g, yi) in generators.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (xj, gj) in x.iter_mut().zip(g) {
                if !gj.is_zero() {
                    *xj += yi * Rational::from_integer(gj.clone());
                }
            }
        }
        x
    }

    pub fn chain(&self, dimension: usize, x: &[Rational]) -> Chain {
        Chain::from_terms(dimension, self.ids.iter().cloned().zip(x.iter().cloned()))
    }
}
