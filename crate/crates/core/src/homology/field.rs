//! Gaussian elimination over ℚ and 𝔽_p with rational-valued entries.

use num_traits::{One, Zero};

use crate::error::{Result, SvolError};
use crate::rational::{self, Rational};
use crate::rings::Scalars;

/// Arithmetic in a field given by its scalars kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    scalars: Scalars,
}

impl Field {
    pub fn new(scalars: Scalars) -> Result<Field> {
        if !scalars.is_field() {
            return Err(SvolError::Unsupported(format!("{scalars:?} is not a field")));
        }
        Ok(Field { scalars })
    }

    pub fn rationals() -> Field {
        Field { scalars: Scalars::Rationals }
    }

    pub fn scalars(&self) -> Scalars {
        self.scalars
    }

    pub fn reduce(&self, q: &Rational) -> Rational {
        self.scalars.reduce(q).expect("field element")
    }

    pub fn inverse(&self, q: &Rational) -> Rational {
        match self.scalars {
            Scalars::Residues { p, .. } => {
                let r = self.reduce(q).to_integer();
                let inv = rational::mod_inverse(&r, &num_bigint::BigInt::from(p)).expect("nonzero residue");
                Rational::from_integer(inv)
            }
            _ => q.recip(),
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&self, rows: &mut [Vec<Rational>]) -> Vec<usize> {
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                *x = self.reduce(x);
            }
        }
        let ncols = rows.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = self.inverse(&rows[r][c]);
            for x in rows[r].iter_mut() {
                *x = self.reduce(&(&*x * &inv));
            }
            for i in 0..rows.len() {
                if i == r || rows[i][c].is_zero() {
                    continue;
                }
                let factor = rows[i][c].clone();
                for j in 0..ncols {
                    if !rows[r][j].is_zero() {
                        let v = &rows[i][j] - &factor * &rows[r][j];
                        rows[i][j] = self.reduce(&v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self, rows: &[Vec<Rational>]) -> usize {
        let mut copy = rows.to_vec();
        self.rref(&mut copy).len()
    }

    /// A basis of `{x : A x = 0}` for `A` given by rows with `ncols` columns.
    pub fn kernel_basis(&self, rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
        let mut m = rows.to_vec();
        let pivots = self.rref(&mut m);
        let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); ncols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = self.reduce(&-&m[r][f]);
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn kernel_over_rationals_and_f2() {
        let rows = vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(2), rat(2)]];
        let q = Field::rationals();
        let k = q.kernel_basis(&rows, 3);
        assert_eq!(k, vec![vec![rat(1), rat(-1), rat(1)]]);
        let f2 = Field::new(Scalars::Residues { p: 2, m: 1 }).unwrap();
        assert_eq!(f2.rank(&rows), 1);
        assert_eq!(f2.kernel_basis(&rows, 3).len(), 2);
        assert!(Field::new(Scalars::Integers).is_err());
    }
}
