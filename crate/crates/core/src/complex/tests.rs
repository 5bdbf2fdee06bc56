use proptest::prelude::*;

use super::*;
use crate::models::{circle_model, sphere_model, surface_cycle, torus_model};
use crate::rational::{rat, Rational};
use crate::rings::RingSpec;

fn tetra_boundary() -> Model {
    let mut b = ModelBuilder::new(2);
    for v in ["0", "1", "2", "3"] {
        b.vertex(v);
    }
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        b.simplex(format!("{i}{j}"), &[j.to_string(), i.to_string()]);
    }
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        b.simplex(format!("{i}{j}{k}"), &[format!("{j}{k}"), format!("{i}{k}"), format!("{i}{j}")]);
    }
    for (id, s) in [("123", 1), ("023", -1), ("013", 1), ("012", -1)] {
        b.reference_term(id, rat(s));
    }
    b.build().unwrap()
}

fn single(id: &str, dim: usize) -> Chain {
    Chain::from_terms(dim, [(id, rat(1))])
}

#[test]
fn boundary_of_one_triangle() {
    let m = tetra_boundary();
    let bd = boundary(&m, &single("012", 2)).unwrap();
    assert_eq!(bd.support_size(), 3);
    assert_eq!(bd.get("12"), rat(1));
    assert_eq!(bd.get("02"), rat(-1));
    assert_eq!(bd.get("01"), rat(1));
}

#[test]
fn torus_reference_is_a_cycle() {
    let t = torus_model();
    assert!(boundary(&t, t.reference()).unwrap().is_zero());
    assert!(verify_relative_cycle(&t, t.reference(), &RingSpec::Z).unwrap());
    assert!(!verify_relative_cycle(&t, &single("T1", 2), &RingSpec::Z).unwrap());
}

#[test]
fn disk_cycle_is_relative() {
    let (disk, c) = surface_cycle(0, 1).unwrap();
    assert_eq!(c.support_size(), 1);
    assert!(verify_relative_cycle(&disk, &c, &RingSpec::Z).unwrap());
}

#[test]
fn fundamental_cycle_checks() {
    let t = torus_model();
    let r = t.reference().clone();
    for spec in ["Z", "Q", "Zp:3", "Fp:2", "Zmod:3^2", "triv:Q"] {
        let spec: RingSpec = spec.parse().unwrap();
        assert!(verify_fundamental_cycle(&t, &r, &spec).unwrap(), "{spec}");
    }
    assert!(!verify_fundamental_cycle(&t, &r.scaled(&rat(2)), &RingSpec::Z).unwrap());
    // over 𝔽_2 the reference and its negative agree
    let neg = r.scaled(&rat(-1));
    assert!(verify_fundamental_cycle(&t, &neg, &RingSpec::fp(2)).unwrap());
    assert!(!verify_fundamental_cycle(&t, &neg, &RingSpec::Z).unwrap());
}

#[test]
fn reducing_into_a_ring_rejects_bad_denominators() {
    let t = torus_model();
    let half = t.reference().scaled(&Rational::new(1.into(), 2.into()));
    assert!(verify_relative_cycle(&t, &half, &RingSpec::zp(2)).is_err());
    assert!(verify_relative_cycle(&t, &half, &RingSpec::zp(3)).unwrap());
}

#[test]
fn generated_complex_counts() {
    let t = torus_model();
    let (x, map) = generated_complex(&t, t.reference()).unwrap();
    assert_eq!((x.count(2), x.count(1), x.count(0)), (2, 3, 1));
    assert_eq!(map.len(), 6);

    let (disk, c) = surface_cycle(0, 1).unwrap();
    let (x, _) = generated_complex(&disk, &c).unwrap();
    assert_eq!((x.count(2), x.count(1), x.count(0)), (1, 3, 3));
    let m = tetra_boundary();
    let (x, _) = generated_complex(&m, &single("012", 2)).unwrap();
    assert_eq!((x.count(2), x.count(1), x.count(0)), (1, 3, 3));

    let (s2, c) = surface_cycle(2, 0).unwrap();
    let (x, _) = generated_complex(&s2, &c).unwrap();
    assert_eq!(x.count(2), 6);
}

#[test]
fn generated_complex_is_idempotent() {
    let (s, c) = surface_cycle(1, 2).unwrap();
    let (x, _) = generated_complex(&s, &c).unwrap();
    let (y, _) = generated_complex(&x, x.reference()).unwrap();
    for n in 0..=2 {
        assert_eq!(x.ids(n), y.ids(n));
    }
    assert_eq!(x.boundary_ids(), y.boundary_ids());
}

#[test]
fn circle_cover_transfer() {
    let circle = circle_model();
    let cov = voltage_cover(&circle, &[("e".to_string(), 1)].into_iter().collect(), 3).unwrap();
    let lifted = transfer(&cov, &single("e", 1)).unwrap();
    assert_eq!(lifted.support_size(), 3);
    assert!(lifted.iter().all(|(_, q)| *q == rat(1)));
    assert!(boundary(&cov.total, &lifted).unwrap().is_zero());
    assert!(transfer(&cov, &Chain::zero(1)).unwrap().is_zero());
}

#[test]
fn torus_double_cover_transfer() {
    let cov = crate::models::cyclic_cover(1, 2).unwrap();
    let lifted = transfer(&cov, cov.base.reference()).unwrap();
    assert_eq!(lifted.support_size(), 4);
    assert_eq!(lifted.norm(&RingSpec::Z).unwrap(), rat(4));
    assert!(verify_fundamental_cycle(&cov.total, &lifted, &RingSpec::Z).unwrap());
    assert_eq!(cov.total.euler_characteristic(), 0);
}

#[test]
fn circle_times_circle_is_a_torus_cycle() {
    let c = circle_model();
    let (prod, chain) = cross_product(&c, c.reference(), &c, c.reference()).unwrap();
    assert_eq!(chain.support_size(), 2);
    assert_eq!(prod.count(2), 2);
    assert!(boundary(&prod, &chain).unwrap().is_zero());
    assert_eq!(&chain, prod.reference());
    assert_eq!(prod.euler_characteristic(), 0);
}

#[test]
fn product_with_a_point_is_a_copy() {
    let mut b = ModelBuilder::new(0);
    b.vertex("p").reference_term("p", rat(1));
    let point = b.build().unwrap();
    let t = torus_model();
    let (prod, chain) = cross_product(&t, t.reference(), &point, point.reference()).unwrap();
    assert_eq!(chain.support_size(), t.reference().support_size());
    assert_eq!(chain.mass(), t.reference().mass());
    assert_eq!(prod.euler_characteristic(), t.euler_characteristic());
    assert!(boundary(&prod, &chain).unwrap().is_zero());
}

#[test]
fn torus_times_circle_support() {
    let t = torus_model();
    let c = circle_model();
    let (prod, chain) = cross_product(&t, t.reference(), &c, c.reference()).unwrap();
    assert!(chain.support_size() <= 6);
    assert!(boundary(&prod, &chain).unwrap().is_zero());
    assert_eq!(prod.euler_characteristic(), 0);
}

#[test]
fn product_with_boundary_is_relative() {
    let (disk, c) = surface_cycle(0, 1).unwrap();
    let circle = circle_model();
    let (prod, chain) = cross_product(&disk, &c, &circle, circle.reference()).unwrap();
    assert!(verify_relative_cycle(&prod, &chain, &RingSpec::Z).unwrap());
    assert!(!prod.boundary_ids().is_empty());
}

#[test]
fn json_round_trip() {
    let (s, _) = surface_cycle(2, 1).unwrap();
    let text = s.to_json().to_string();
    let back = Model::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.to_json(), s.to_json());
    assert_eq!(back.content_hash(), s.content_hash());
    assert_ne!(torus_model().content_hash(), s.content_hash());
    let chain = s.reference().clone();
    assert_eq!(Chain::from_json(&chain.to_json()).unwrap(), chain);
}

#[test]
fn invalid_models_are_rejected() {
    let mut b = ModelBuilder::new(2);
    b.vertex("x").vertex("y");
    b.simplex("e", &["y", "x"]).simplex("f", &["x", "y"]);
    b.simplex("t", &["e", "e", "f"]);
    assert!(b.build().is_err(), "face identity must fail");

    let mut b = ModelBuilder::new(1);
    b.vertex("x").vertex("y").simplex("e", &["y", "x"]).mark_boundary("e");
    assert!(b.build().is_err(), "boundary must be face-closed");

    let mut b = ModelBuilder::new(1);
    b.vertex("x").vertex("y").simplex("e", &["y", "x"]).reference_term("e", rat(1));
    assert!(b.build().is_err(), "reference must be a relative cycle");

    let json = serde_json::json!({"dim": 1, "simplices": {"0": ["v"], "1": [{"id": "e", "faces": ["w", "v"]}]}});
    assert!(Model::from_json(&json).is_err());
}

fn random_chain(model: &Model, n: usize, coeffs: &[i64]) -> Chain {
    Chain::from_terms(n, model.ids(n).iter().zip(coeffs).map(|(id, c)| (id.clone(), rat(*c))))
}

proptest! {
    #[test]
    fn boundary_squared_vanishes(coeffs in proptest::collection::vec(-5i64..=5, 10)) {
        let s3 = sphere_model(3).unwrap();
        let c = random_chain(&s3, 3, &coeffs);
        let bb = boundary(&s3, &boundary(&s3, &c).unwrap()).unwrap();
        prop_assert!(bb.is_zero());
        let ball = crate::models::sphere_with_ball();
        let c = random_chain(&ball, 2, &coeffs);
        prop_assert!(boundary(&ball, &boundary(&ball, &c).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn transfer_is_linear_and_scales_mass(a in -4i64..=4, b in -4i64..=4, k in 1usize..4) {
        let cov = crate::models::cyclic_cover(2, k).unwrap();
        let x = cov.base.reference().scaled(&rat(a));
        let y = Chain::from_terms(2, [("T1", rat(b))]);
        let sum = transfer(&cov, &x.plus(&y)).unwrap();
        let parts = transfer(&cov, &x).unwrap().plus(&transfer(&cov, &y).unwrap());
        prop_assert_eq!(&sum, &parts);
        prop_assert_eq!(transfer(&cov, &x).unwrap().mass(), x.mass() * rat(k as i64));
    }
}
