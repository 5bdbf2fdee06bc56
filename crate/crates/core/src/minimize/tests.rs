use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};

use super::*;
use crate::complex::boundary;
use crate::models::{circle_model, sphere_model, sphere_with_ball, surface_cycle, torus_model};
use crate::rational::{rat, ratio};
use crate::rings::parse_ring_spec;

fn ring(tag: &str) -> RingSpec {
    parse_ring_spec(tag).unwrap()
}

fn solve(model: &Model, class: &Chain, tag: &str) -> MinimizationResult {
    let problem = MinimizationProblem::new(model, ring(tag)).with_class(class.clone());
    let result = minimal_norm(&problem).unwrap();
    assert!(verify_witness(model, class, &result).unwrap(), "witness check failed over {tag}");
    result
}

/// `∂` of the solid tetrahedron in the sphere-with-ball model.
fn ball_boundary(model: &Model) -> Chain {
    let cell = &model.ids(3)[0];
    boundary(model, &Chain::from_terms(3, [(cell.clone(), rat(1))])).unwrap()
}

fn shifted_class(model: &Model, t: i64) -> Chain {
    model.reference().plus(&ball_boundary(model).scaled(&rat(t)))
}

#[test]
fn documented_minima() {
    let torus = torus_model();
    assert_eq!(solve(&torus, torus.reference(), "triv:Fp:2").value, rat(2));
    let circle = circle_model();
    assert_eq!(solve(&circle, circle.reference(), "Z").value, rat(1));
    let s2 = sphere_model(2).unwrap();
    assert_eq!(solve(&s2, s2.reference(), "Zp:3").value, rat(2));
    let (sigma2, c) = surface_cycle(2, 0).unwrap();
    let r = solve(&sigma2, &c, "triv:Q");
    assert_eq!(r.value, rat(6));
    assert!(r.optimal);
}

#[test]
fn ball_shift_is_undone_over_every_ring() {
    let model = sphere_with_ball();
    let class = shifted_class(&model, 3);
    for tag in ["Z", "Q", "Zp:2", "Zp:3", "Qp:2", "triv:Z", "triv:Q", "Fp:2", "Fp:5", "Zmod:3^2", "triv:Zmod:2^2"] {
        let r = solve(&model, &class, tag);
        assert!(r.optimal, "{tag}");
        assert_eq!(r.value, rat(4), "{tag}");
    }
}

#[test]
fn rational_shifts_are_undone() {
    let model = sphere_with_ball();
    let class = shifted_class(&model, 0).plus(&ball_boundary(&model).scaled(&ratio(1, 2)));
    let over_q = solve(&model, &class, "Qp:2");
    assert_eq!(over_q.value, rat(4));
    let over_arch = solve(&model, &class, "Q");
    assert_eq!(over_arch.value, rat(4));
}

#[test]
fn zero_class_and_errors() {
    let model = sphere_with_ball();
    let zero = ball_boundary(&model);
    let r = solve(&model, &zero, "Z");
    assert_eq!(r.value, rat(0));
    assert!(r.witness.is_zero());

    let torus = torus_model();
    let half = Chain::from_terms(2, [(torus.ids(2)[0].clone(), rat(1))]);
    let problem = MinimizationProblem::new(&torus, RingSpec::Z).with_class(half);
    assert!(matches!(minimal_norm(&problem), Err(SvolError::Infeasible(_))));

    let problem = MinimizationProblem::new(&torus, RingSpec::fp(2)).with_strategy(Strategy::LpExact);
    assert!(matches!(minimal_norm(&problem), Err(SvolError::Unsupported(_))));
    assert_eq!("bnb".parse::<Strategy>().unwrap(), Strategy::BranchAndBound);
    assert!("simplex".parse::<Strategy>().is_err());
}

#[test]
fn exhausted_budget_is_reported() {
    let model = sphere_with_ball();
    let class = shifted_class(&model, 5);
    let problem = MinimizationProblem::new(&model, RingSpec::Z).with_class(class.clone()).with_budget(0);
    let r = minimal_norm(&problem).unwrap();
    assert!(!r.optimal);
    assert!(r.value >= rat(4));
    assert_eq!(r.witness.norm(&RingSpec::Z).unwrap(), r.value);
}

#[test]
fn results_do_not_depend_on_threads() {
    let model = sphere_with_ball();
    let class = shifted_class(&model, 2);
    let mut problem = MinimizationProblem::new(&model, ring("Zmod:2^3")).with_class(class);
    problem.threads = 1;
    let a = minimal_norm(&problem).unwrap();
    problem.threads = 4;
    let b = minimal_norm(&problem).unwrap();
    problem.strategy = Strategy::BranchAndBound;
    let c = minimal_norm(&problem).unwrap();
    assert_eq!(a.witness, b.witness);
    assert_eq!(a.witness, c.witness);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn torus_scaling_is_constant() {
    let torus = torus_model();
    for p in [2, 3] {
        let s = scaling_sequence(&torus, torus.reference(), p, 4).unwrap();
        assert_eq!(s.terms.len(), 5);
        assert!(s.terms.iter().all(|t| t.value == rat(2) && t.optimal));
        assert!(s.is_non_increasing());
    }
}

#[test]
fn crt_coefficients_match_congruences() {
    let a = crt_coefficients(&[2, 3], 2).unwrap();
    assert_eq!(a[&2], BigInt::from(9));
    assert_eq!(a[&3], BigInt::from(-8));
    assert_eq!(crt_coefficients(&[7], 3).unwrap()[&7], BigInt::from(1));
    assert!(crt_coefficients(&[], 2).is_err());
    let a = crt_coefficients(&[2, 3, 5], 3).unwrap();
    assert_eq!(a.values().sum::<BigInt>(), BigInt::from(1));
    for (&p, ap) in &a {
        for &q in &[2u64, 3, 5] {
            let qn = BigInt::from(q.pow(3));
            let expected = BigInt::from(u8::from(p == q));
            assert_eq!(crate::rational::modulo(ap, &qn), expected, "a_{p} mod {q}^3");
        }
    }
}

#[test]
fn simultaneous_cycle_of_equal_inputs() {
    let torus = torus_model();
    let witnesses: BTreeMap<u64, Chain> = [(2, torus.reference().clone()), (3, torus.reference().clone())].into();
    let c = simultaneous_cycle(&torus, &witnesses, 4).unwrap();
    assert_eq!(&c.cycle, torus.reference());
    let doubled: BTreeMap<u64, Chain> = [(2, torus.reference().scaled(&rat(2)))].into();
    assert!(matches!(simultaneous_cycle(&torus, &doubled, 2), Err(SvolError::NotFundamental(_))));
}

#[test]
fn streams_descend_to_the_minimum() {
    let torus = torus_model();
    let items: Vec<StreamItem> = upper_bound_stream(&torus, torus.reference(), RingSpec::fp(2), 1000).unwrap().collect();
    assert_eq!(items.last().unwrap().bound, rat(2));

    let model = sphere_with_ball();
    let class = shifted_class(&model, -3);
    let only = upper_bound_stream(&model, &class, RingSpec::Z, 0).unwrap().collect::<Vec<_>>();
    assert_eq!(only.len(), 1);
    assert_eq!(only[0].bound, class.norm(&RingSpec::Z).unwrap());
    for tag in ["Z", "Q", "Zp:2", "Fp:3", "Zmod:2^2"] {
        let items: Vec<StreamItem> =
            upper_bound_stream(&model, &class, ring(tag), 400).unwrap().collect();
        assert!(items.windows(2).all(|w| w[1].bound < w[0].bound), "{tag}");
        let last = items.last().unwrap();
        assert_eq!(last.bound, solve(&model, &class, tag).value, "{tag}");
        assert_eq!(last.witness.norm(&ring(tag)).unwrap(), last.bound);
    }
}

fn brute_force_shift(model: &Model, class: &Chain, tag: &str, range: i64) -> Rational {
    // the ball boundary spans the image, so integral shifts cover every coset point mod p^m
    let r = ring(tag);
    let b = ball_boundary(model);
    (-range..=range).map(|t| class.plus(&b.scaled(&rat(t))).reduce(&r).unwrap().norm(&r).unwrap()).min().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_inequalities_hold(t in -4i64..=4, p in prop::sample::select(vec![2u64, 3, 5]), m in 1u32..=3) {
        let model = sphere_with_ball();
        let class = shifted_class(&model, t);
        let v = |tag: String| solve(&model, &class, &tag).value;
        let fp = v(format!("Fp:{p}"));
        let quotient = v(format!("Zmod:{p}^{m}"));
        let next = v(format!("Zmod:{p}^{}", m + 1));
        let trivial = v(format!("triv:Zmod:{p}^{m}"));
        let zp = v(format!("Zp:{p}"));
        let qp = v(format!("Qp:{p}"));
        let z = v("Z".to_string());
        prop_assert!(fp <= quotient);
        prop_assert!(quotient <= zp);
        prop_assert!(zp <= z);
        prop_assert!(qp <= zp);
        prop_assert!(quotient <= next);
        prop_assert!(quotient <= trivial);
        prop_assert!(trivial <= Rational::from_integer(crate::rational::pow(p, m - 1)) * &quotient);
        // the residue rings are finite, so a shift range of p^m covers the coset
        let range = i64::try_from(p.pow(m)).unwrap();
        prop_assert_eq!(quotient, brute_force_shift(&model, &class, &format!("Zmod:{p}^{m}"), range));
        prop_assert_eq!(fp, brute_force_shift(&model, &class, &format!("Fp:{p}"), i64::try_from(p).unwrap()));
    }

    #[test]
    fn reduction_maps_do_not_increase_minima(t in -4i64..=4, p in prop::sample::select(vec![2u64, 3, 5]), m in 1u32..=3) {
        let model = sphere_with_ball();
        let class = shifted_class(&model, t);
        let over_z = solve(&model, &class, "Z");
        for tag in [format!("Zmod:{p}^{m}"), format!("Fp:{p}")] {
            let target = ring(&tag);
            let pushed = over_z.witness.reduce(&target).unwrap();
            prop_assert!(verify_fundamental_cycle_like(&model, &class, &pushed, target));
            let bound = pushed.norm(&target).unwrap();
            prop_assert!(solve(&model, &class, &tag).value <= bound);
            prop_assert!(bound <= over_z.value.clone());
        }
    }
}

fn verify_fundamental_cycle_like(model: &Model, class: &Chain, chain: &Chain, ring: RingSpec) -> bool {
    let diff = chain.minus(&class.reduce(&ring).unwrap());
    solve_boundary(model, &diff, &ring).unwrap().is_some()
}
