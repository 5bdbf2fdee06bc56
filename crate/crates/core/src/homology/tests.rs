use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::complex::{boundary, Chain, Model, ModelBuilder};
use crate::models::{sphere_model, sphere_with_ball, surface_cycle, torus_model};
use crate::rational::rat;
use crate::rings::RingSpec;

/// One vertex, loops `a` and `e`, triangles `t` (∂ = 2a − e) and `u` (∂ = e).
/// Its first homology is ℤ/2 and its top 𝔽_2-cycle `t + u` has no integral lift.
fn projective_like() -> Model {
    let mut b = ModelBuilder::new(2);
    b.vertex("v").simplex("a", &["v", "v"]).simplex("e", &["v", "v"]);
    b.simplex("t", &["a", "e", "a"]).simplex("u", &["e", "e", "e"]);
    b.build().unwrap()
}

fn z4_complex() -> ChainComplex {
    ChainComplex::from_boundaries(vec![(2, IntegerMatrix::from_rows(&[vec![4]]))]).unwrap()
}

#[test]
fn torus_betti_numbers() {
    let t = torus_model();
    for tag in ["Q", "Z", "Zp:3", "Fp:2"] {
        let h = homology(&t, &tag.parse().unwrap(), false).unwrap();
        assert_eq!(h.betti_numbers(), vec![1, 2, 1], "{tag}");
        assert!(h.degrees.iter().all(|d| d.torsion.is_empty()));
    }
}

#[test]
fn genus_two_and_spheres() {
    let (s, _) = surface_cycle(2, 0).unwrap();
    assert_eq!(homology(&s, &RingSpec::fp(2), false).unwrap().betti_numbers(), vec![1, 4, 1]);
    let s3 = sphere_model(3).unwrap();
    assert_eq!(homology(&s3, &RingSpec::Z, false).unwrap().betti_numbers(), vec![1, 0, 0, 1]);
    let s2 = sphere_model(2).unwrap();
    assert_eq!(homology(&s2, &RingSpec::Q, false).unwrap().betti_numbers(), vec![1, 0, 1]);
    let ball = sphere_with_ball();
    assert_eq!(homology(&ball, &RingSpec::Q, false).unwrap().betti_numbers(), vec![1, 0, 1]);
}

#[test]
fn relative_homology_of_surfaces_with_boundary() {
    let (disk, _) = surface_cycle(0, 1).unwrap();
    assert_eq!(homology(&disk, &RingSpec::Z, true).unwrap().betti_numbers(), vec![0, 0, 1]);
    assert_eq!(homology(&disk, &RingSpec::Z, false).unwrap().betti_numbers(), vec![1, 0, 0]);
    let (s, _) = surface_cycle(1, 2).unwrap();
    assert_eq!(homology(&s, &RingSpec::Q, true).unwrap().betti_numbers(), vec![0, 3, 1]);
    assert_eq!(homology(&s, &RingSpec::Q, false).unwrap().betti_numbers(), vec![1, 3, 0]);
}

#[test]
fn torsion_is_detected() {
    let h = complex_homology(&z4_complex(), &RingSpec::Z, false).unwrap();
    assert_eq!(h.degrees[1].torsion, vec!["4".to_string()]);
    assert_eq!(h.betti_numbers(), vec![0, 0, 0]);
    let f2 = complex_homology(&z4_complex(), &RingSpec::fp(2), false).unwrap();
    assert_eq!(f2.betti_numbers(), vec![0, 1, 1]);
    let z2 = complex_homology(&z4_complex(), &RingSpec::zp(2), false).unwrap();
    assert_eq!(z2.degrees[1].torsion, vec!["4".to_string()]);
    assert!(complex_homology(&z4_complex(), &RingSpec::zp(3), false).unwrap().degrees[1].torsion.is_empty());

    let m = projective_like();
    let h = homology(&m, &RingSpec::Z, false).unwrap();
    assert_eq!(h.degrees[1].torsion, vec!["2".to_string()]);
    assert_eq!(homology(&m, &RingSpec::fp(2), false).unwrap().betti_numbers(), vec![1, 1, 1]);
    assert!(homology(&m, &RingSpec::zmod(3, 2), false).is_err());
}

#[test]
fn raw_complex_from_json() {
    let json = serde_json::json!({"boundaries": [{"degree": 2, "rows": 1, "cols": 1, "entries": [[4]]}]});
    let cc = ChainComplex::from_json(&json).unwrap();
    assert_eq!(cc.torsion(1), vec![BigInt::from(4)]);
    let bad = serde_json::json!({"boundaries": [
        {"degree": 1, "rows": 1, "cols": 1, "entries": [[1]]},
        {"degree": 2, "rows": 1, "cols": 1, "entries": [[1]]}
    ]});
    assert!(ChainComplex::from_json(&bad).is_err());
}

#[test]
fn elementary_divisor_primes_examples() {
    assert!(elementary_divisor_primes(&torus_model()).is_empty());
    assert_eq!(elementary_divisor_primes(&projective_like()), BTreeSet::from([2]));
    assert!(elementary_divisor_primes(&sphere_with_ball()).is_empty());
    let m = IntegerMatrix::from_rows(&[vec![6, 0], vec![0, 10]]);
    assert_eq!(matrix_divisor_primes(&m), BTreeSet::from([2, 3, 5]));
}

#[test]
fn pm_torsion_examples() {
    let cc = z4_complex();
    assert_eq!(pm_torsion_dimension(&cc, 2, 0, 1), 1);
    assert_eq!(pm_torsion_dimension(&cc, 2, 1, 1), 1);
    assert_eq!(pm_torsion_dimension(&cc, 2, 2, 1), 0);
    assert_eq!(pm_torsion_dimension(&cc, 2, 1, 2), 1);
    assert_eq!(pm_torsion_dimension(&cc, 3, 0, 1), 0);
    let t = ChainComplex::from_model(&torus_model(), false);
    assert_eq!(pm_torsion_dimension(&t, 5, 3, 1), 2);
}

#[test]
fn solve_boundary_examples() {
    let ball = sphere_with_ball();
    let cell = Chain::from_terms(3, [("[0,1,2,4]", rat(1))]);
    let sphere = boundary(&ball, &cell).unwrap();
    let x = solve_boundary(&ball, &sphere, &RingSpec::Z).unwrap().unwrap();
    assert_eq!(boundary(&ball, &x).unwrap(), sphere);
    assert!(solve_boundary(&ball, ball.reference(), &RingSpec::Z).unwrap().is_none());
    assert!(solve_boundary(&ball, ball.reference(), &RingSpec::fp(2)).unwrap().is_none());

    let circle = crate::models::circle_model();
    let e = Chain::from_terms(1, [("e", rat(1))]);
    assert!(solve_boundary(&circle, &e, &RingSpec::Q).unwrap().is_none());
    assert_eq!(solve_boundary(&circle, &Chain::zero(1), &RingSpec::Z).unwrap(), Some(Chain::zero(2)));

    // 2a is a boundary over ℤ but a is only one over ℚ
    let m = projective_like();
    let a = Chain::from_terms(1, [("a", rat(1))]);
    assert!(solve_boundary(&m, &a, &RingSpec::Z).unwrap().is_none());
    assert!(solve_boundary(&m, &a, &RingSpec::zp(3)).unwrap().is_some());
    assert!(solve_boundary(&m, &a.scaled(&rat(2)), &RingSpec::Z).unwrap().is_some());
}

#[test]
fn residue_division() {
    assert_eq!(residue_divide(&BigInt::from(6), &BigInt::from(3), 3, 2), Some(BigInt::from(2)));
    assert_eq!(residue_divide(&BigInt::from(1), &BigInt::from(3), 3, 2), None);
    assert_eq!(residue_divide(&BigInt::from(4), &BigInt::from(7), 3, 2), Some(BigInt::from(7)));
    assert_eq!(residue_divide(&BigInt::zero(), &BigInt::from(9), 3, 2), Some(BigInt::zero()));
}

#[test]
fn lifting_mod_p_cycles() {
    let t = torus_model();
    let c = t.reference().scaled(&rat(2));
    let lift = lift_cycle_mod_p(&t, &c, 3).unwrap().unwrap();
    assert!(boundary(&t, &lift).unwrap().is_zero());
    assert_eq!(lift.reduce(&RingSpec::fp(3)).unwrap(), c.reduce(&RingSpec::fp(3)).unwrap());

    let m = projective_like();
    let tu = Chain::from_terms(2, [("t", rat(1)), ("u", rat(1))]);
    assert_eq!(lift_cycle_mod_p(&m, &tu, 2).unwrap(), None);
    assert!(lift_cycle_mod_p(&m, &tu, 3).is_err());
}

#[test]
fn cap_with_point_and_unit_cochains() {
    let t = torus_model();
    let r = t.reference();
    let dual = Chain::from_terms(2, [("T1", rat(1))]);
    let point = cap_product(&t, &dual, r, CapSign::Alternating).unwrap();
    assert_eq!(point, Chain::from_terms(0, [("v", r.get("T1"))]));
    let unit = Chain::from_terms(0, [("v", rat(1))]);
    assert_eq!(&cap_product(&t, &unit, r, CapSign::Alternating).unwrap(), r);

    let a = Chain::from_terms(1, [("a1", rat(1))]);
    let alt = cap_product(&t, &a, r, CapSign::Alternating).unwrap();
    let plain = cap_product(&t, &a, r, CapSign::Plain).unwrap();
    assert_eq!(alt, plain.scaled(&rat(-1)));

    let (disk, c) = surface_cycle(0, 1).unwrap();
    let on_boundary = Chain::from_terms(1, [("e01", rat(1))]);
    assert!(cap_product(&disk, &on_boundary, &c, CapSign::Alternating).is_err());
}

#[test]
fn comparison_on_genus_two() {
    let (s, c) = surface_cycle(2, 0).unwrap();
    let report = comparison_certificate(&s, &c, &[2, 3]).unwrap();
    assert_eq!(report.rows.len(), 9);
    assert!(report.all_hold);
    assert_eq!(report.support_size, 6);
    assert!(comparison_certificate(&s, &c.scaled(&rat(2)), &[]).is_err());
    assert!(comparison_certificate(&s, &Chain::zero(2), &[]).is_err());
}

/// Coboundary of a 1-cochain evaluated on every top simplex.
fn coboundary(model: &Model, f: &Chain) -> Vec<crate::rational::Rational> {
    model
        .ids(2)
        .iter()
        .map(|id| {
            model.faces(id).iter().enumerate().map(|(i, e)| if i % 2 == 0 { f.get(e) } else { -f.get(e) }).sum()
        })
        .collect()
}

fn det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = choose(n - 1, k);
    for mut c in choose(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> i64 {
    let (r, c) = (m.len(), m[0].len());
    let mut g = 0i64;
    for rows in choose(r, k) {
        for cols in choose(c, k) {
            let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

/// Size of the subgroup of `(ℤ/q)^n` generated by the given vectors.
fn span_size(gens: &[Vec<i64>], n: usize, q: i64) -> usize {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::from([vec![0; n]]);
    let mut frontier: Vec<Vec<i64>> = vec![vec![0; n]];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w: Vec<i64> = v.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(q)).collect();
            if seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    seen.len()
}

/// `dim p^m H_1` for `ℤ² —B→ ℤ² —A→ ℤ²` with coefficients in `ℤ/p^{m+1}`, by enumeration.
fn brute_pm_h1(a: &[Vec<i64>], b: &[Vec<i64>], p: i64, m: u32) -> usize {
    let q = p.pow(m + 1);
    let apply = |mat: &[Vec<i64>], v: &[i64]| -> Vec<i64> {
        mat.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum::<i64>().rem_euclid(q)).collect()
    };
    let mut kernel = Vec::new();
    for x in 0..q {
        for y in 0..q {
            if apply(a, &[x, y]).iter().all(|z| *z == 0) {
                kernel.push(vec![x, y]);
            }
        }
    }
    let image: Vec<Vec<i64>> = [[1, 0], [0, 1]].iter().map(|e| apply(b, e)).collect();
    let pm = p.pow(m);
    let mut gens: Vec<Vec<i64>> = kernel.iter().map(|v| v.iter().map(|x| (x * pm).rem_euclid(q)).collect()).collect();
    gens.extend(image.iter().cloned());
    let ratio = span_size(&gens, 2, q) / span_size(&image, 2, q);
    let mut dim = 0;
    let mut r = ratio;
    while r > 1 {
        r /= p as usize;
        dim += 1;
    }
    dim
}

fn to_matrix(rows: &[Vec<i64>]) -> IntegerMatrix {
    IntegerMatrix::from_rows(rows)
}

proptest! {
    #[test]
    fn smith_divisors_match_minors(r in 1usize..4, c in 1usize..4, seed in proptest::collection::vec(-6i64..=6, 9)) {
        let rows: Vec<Vec<i64>> = (0..r).map(|i| (0..c).map(|j| seed[i * 3 + j]).collect()).collect();
        let a = to_matrix(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(r));
        prop_assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(c));
        let mut product = BigInt::one();
        for k in 1..=r.min(c) {
            product *= &s.divisors[k - 1];
            prop_assert_eq!(product.clone(), BigInt::from(determinantal_divisor(&rows, k)));
            if k >= 2 && !s.divisors[k - 1].is_zero() {
                prop_assert!((&s.divisors[k - 1] % &s.divisors[k - 2]).is_zero());
            }
        }
    }

    #[test]
    fn universal_coefficients_match_enumeration(
        seed in proptest::collection::vec(-4i64..=4, 4),
        outgoing in any::<bool>(),
        p in prop::sample::select(vec![2i64, 3]),
        m in 0u32..2,
    ) {
        let random = vec![vec![seed[0], seed[1]], vec![seed[2], seed[3]]];
        let zero = vec![vec![0, 0], vec![0, 0]];
        let (a, b) = if outgoing { (random, zero) } else { (zero, random) };
        let cc = ChainComplex::from_boundaries(vec![(1, to_matrix(&a)), (2, to_matrix(&b))]).unwrap();
        prop_assert_eq!(pm_torsion_dimension(&cc, p as u64, m, 1), brute_pm_h1(&a, &b, p, m));
    }

    #[test]
    fn cap_with_cocycle_is_cycle(seed in proptest::collection::vec(-3i64..=3, 16)) {
        let (s, c) = surface_cycle(2, 0).unwrap();
        let cc = ChainComplex::from_model(&s, false);
        let edges = cc.basis(1).unwrap().to_vec();
        let field = Field::rationals();
        let d2t: Vec<Vec<crate::rational::Rational>> = cc
            .boundary_matrix(2)
            .transpose()
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(crate::rational::Rational::from_integer).collect())
            .collect();
        let cocycles = field.kernel_basis(&d2t, edges.len());
        let mut f = Chain::zero(1);
        for (z, w) in cocycles.iter().zip(&seed) {
            for (id, x) in edges.iter().zip(z) {
                f.add_term(id, &(x * rat(*w)));
            }
        }
        prop_assert!(coboundary(&s, &f).iter().all(Zero::is_zero));
        let capped = cap_product(&s, &f, &c, CapSign::Alternating).unwrap();
        prop_assert!(boundary(&s, &capped).unwrap().is_zero());
    }
}
