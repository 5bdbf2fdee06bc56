//! Products of semi-simplicial models.
//!
//! A nondegenerate simplex of the product of `σ ∈ A_a` and `τ ∈ B_b` is a
//! lattice path from `(0,0)` to `(a,b)` whose steps move in `A`, in `B` or
//! in both. Its id records the pair and the path as a word over
//! `{a, b, c}`; the top-dimensional paths are the shuffles.

use num_bigint::BigInt;

use super::{Chain, Model, ModelBuilder};
use crate::error::Result;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    A,
    B,
    Both,
}

impl Step {
    fn delta(self) -> (usize, usize) {
        match self {
            Step::A => (1, 0),
            Step::B => (0, 1),
            Step::Both => (1, 1),
        }
    }

    fn letter(self) -> char {
        match self {
            Step::A => 'a',
            Step::B => 'b',
            Step::Both => 'c',
        }
    }
}

fn product_id(sigma: &str, tau: &str, path: &[Step]) -> String {
    let word: String = path.iter().map(|s| s.letter()).collect();
    format!("({sigma},{tau})[{word}]")
}

/// All paths from `(0,0)` to `(a,b)` with exactly `n` steps.
fn paths(a: usize, b: usize, n: usize) -> Vec<Vec<Step>> {
    fn go(a: usize, b: usize, n: usize, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if n == 0 {
            if a == 0 && b == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if a + b < n || a.max(b) > n {
            return;
        }
        for step in [Step::A, Step::B, Step::Both] {
            let (da, db) = step.delta();
            if da <= a && db <= b {
                cur.push(step);
                go(a - da, b - db, n - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(a, b, n, &mut Vec::new(), &mut out);
    out
}

fn vertices(path: &[Step]) -> Vec<(usize, usize)> {
    let mut v = vec![(0, 0)];
    for s in path {
        let (x, y) = *v.last().expect("nonempty");
        let (dx, dy) = s.delta();
        v.push((x + dx, y + dy));
    }
    v
}

/// The i-th face of the product simplex `(σ, τ, path)`.
fn product_face(a: &Model, b: &Model, sigma: &str, tau: &str, path: &[Step], i: usize) -> String {
    let v = vertices(path);
    let (si, ti) = v[i];
    let unique = |proj: fn(&(usize, usize)) -> usize, value: usize| {
        v.iter().enumerate().filter(|(j, p)| *j != i && proj(p) == value).count() == 0
    };
    let drop_s = unique(|p| p.0, si);
    let drop_t = unique(|p| p.1, ti);
    let sigma2 = if drop_s { a.face(sigma, si) } else { sigma };
    let tau2 = if drop_t { b.face(tau, ti) } else { tau };
    let w: Vec<(usize, usize)> = v
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, &(x, y))| {
            let x = if drop_s && x > si { x - 1 } else { x };
            let y = if drop_t && y > ti { y - 1 } else { y };
            (x, y)
        })
        .collect();
    let path2: Vec<Step> = w
        .windows(2)
        .map(|pair| match (pair[1].0 - pair[0].0, pair[1].1 - pair[0].1) {
            (1, 0) => Step::A,
            (0, 1) => Step::B,
            (1, 1) => Step::Both,
            other => unreachable!("face of a product path has step {other:?}"),
        })
        .collect();
    product_id(sigma2, tau2, &path2)
}

/// Signed shuffles of a `p`-simplex with a `q`-simplex.
fn shuffles(p: usize, q: usize) -> Vec<(Vec<Step>, i64)> {
    paths(p, q, p + q)
        .into_iter()
        .map(|path| {
            // positions (1-based) of the A-steps, μ_1 < … < μ_p
            let inversions: usize = path
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == Step::A)
                .enumerate()
                .map(|(k, (pos, _))| pos - k)
                .sum();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (path, sign)
        })
        .collect()
}

fn cross_chain(a: &Chain, b: &Chain) -> Chain {
    let (p, q) = (a.dimension(), b.dimension());
    let signed = shuffles(p, q);
    let mut out = Chain::zero(p + q);
    for (sigma, x) in a.iter() {
        for (tau, y) in b.iter() {
            let xy = x * y;
            for (path, sign) in &signed {
                out.add_term(&product_id(sigma, tau, path), &(&xy * Rational::from_integer(BigInt::from(*sign))));
            }
        }
    }
    out
}

/// The product model of `A` and `B` together with the shuffle cross
/// product of the two chains. The model's reference cycle is the cross
/// product of the two reference cycles.
pub fn cross_product(model_a: &Model, chain_a: &Chain, model_b: &Model, chain_b: &Chain) -> Result<(Model, Chain)> {
    chain_a.validate(model_a)?;
    chain_b.validate(model_b)?;
    let (da, db) = (model_a.dim(), model_b.dim());
    let mut builder = ModelBuilder::new(da + db);
    if let (Some(la), Some(lb)) = (model_a.label(), model_b.label()) {
        builder.label(format!("{la}x{lb}"));
    }
    for n in 0..=(da + db) {
        for a in 0..=da.min(n) {
            for b in n.saturating_sub(a)..=db.min(n) {
                let shapes = paths(a, b, n);
                if shapes.is_empty() {
                    continue;
                }
                for sigma in model_a.ids(a) {
                    for tau in model_b.ids(b) {
                        for path in &shapes {
                            let id = product_id(sigma, tau, path);
                            let faces: Vec<String> = if n == 0 {
                                Vec::new()
                            } else {
                                (0..=n).map(|i| product_face(model_a, model_b, sigma, tau, path, i)).collect()
                            };
                            builder.simplex(id.clone(), &faces);
                            if model_a.is_boundary(sigma) || model_b.is_boundary(tau) {
                                builder.mark_boundary(id);
                            }
                        }
                    }
                }
            }
        }
    }
    for (id, q) in cross_chain(model_a.reference(), model_b.reference()).iter() {
        builder.reference_term(id.clone(), q.clone());
    }
    let product = builder.build()?;
    let chain = cross_chain(chain_a, chain_b);
    chain.validate(&product)?;
    Ok((product, chain))
}
