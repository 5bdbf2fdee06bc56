use proptest::prelude::*;

use super::*;
use crate::models::{circle_model, sphere_model, torus_model};
use crate::rational::rat;

fn exact(kb: &KnowledgeBase, space: &str, ring: RingSpec, value: i64) {
    let iv = kb.interval(space, ring);
    assert!(iv.is_exact() && iv.lo == rat(value), "{space} {ring}: [{}, {:?}]", iv.lo, iv.hi);
}

fn projective(d: usize) -> KnowledgeBase {
    let (rp, s) = (format!("RP{d}"), format!("S{d}"));
    let mut kb = KnowledgeBase::with_default_primes();
    kb.add_fact(&rp, RingSpec::Z, Some(rat(2)), Some(rat(2)), "cited: integral value of RP^d").unwrap();
    kb.add_fact(&rp, RingSpec::fp(2), Some(rat(2)), Some(rat(2)), "cited: weightless F_2 value of RP^d").unwrap();
    kb.add_fact(&s, RingSpec::Z, Some(rat(1)), Some(rat(1)), "cited: odd sphere").unwrap();
    kb.add_relation(Relation::Covering { total: s.clone(), base: rp.clone(), sheets: 2 }).unwrap();
    kb.add_relation(Relation::Closed { space: rp }).unwrap();
    kb.add_relation(Relation::Closed { space: s }).unwrap();
    kb
}

#[test]
fn projective_three_space_over_z5() {
    let mut kb = KnowledgeBase::new([5]).unwrap();
    kb.add_fact("RP3", RingSpec::Z, Some(rat(2)), Some(rat(2)), "cited").unwrap();
    kb.add_fact("S3", RingSpec::zp(5), Some(rat(1)), Some(rat(1)), "cited").unwrap();
    kb.add_relation(Relation::Covering { total: "S3".into(), base: "RP3".into(), sheets: 2 }).unwrap();
    kb.add_relation(Relation::Closed { space: "RP3".into() }).unwrap();
    let summary = kb.propagate().unwrap();
    assert!(summary.converged);
    exact(&kb, "RP3", RingSpec::zp(5), 1);
    exact(&kb, "RP3", RingSpec::qp(5), 1);
    let iv = kb.interval("RP3", RingSpec::zp(5));
    let hi_step = &kb.steps()[iv.hi_step.unwrap()];
    assert_eq!(hi_step.rule, Rule::Degree);
}

#[test]
fn projective_spaces_at_all_primes() {
    for d in [1, 3, 5] {
        let mut kb = projective(d);
        kb.propagate().unwrap();
        let rp = format!("RP{d}");
        exact(&kb, &rp, RingSpec::zp(2), 2);
        exact(&kb, &rp, RingSpec::qp(2), 2);
        for p in [3, 5, 7] {
            exact(&kb, &rp, RingSpec::zp(p), 1);
            exact(&kb, &rp, RingSpec::qp(p), 1);
        }
        let q2 = kb.interval(&rp, RingSpec::qp(2));
        assert_eq!(kb.steps()[q2.lo_step.unwrap()].rule, Rule::Trigger);
        kb.export_table().replay_all().unwrap();
    }
}

#[test]
fn torus_from_a_witness() {
    let torus = torus_model();
    let mut kb = KnowledgeBase::with_default_primes();
    assert_eq!(kb.add_witness("T2", RingSpec::Z, &torus, None).unwrap(), rat(2));
    kb.add_relation(Relation::EvenClosed { space: "T2".into() }).unwrap();
    kb.propagate().unwrap();
    for p in [2, 3, 5, 7] {
        exact(&kb, "T2", RingSpec::qp(p), 2);
        exact(&kb, "T2", RingSpec::zp(p), 2);
    }
}

#[test]
fn spheres_from_witnesses() {
    for d in 1..=4 {
        let space = format!("S{d}");
        let mut kb = KnowledgeBase::with_default_primes();
        // small models exist only for the circle and the 2-sphere
        match d {
            1 => assert_eq!(kb.add_witness(&space, RingSpec::Z, &circle_model(), None).unwrap(), rat(1)),
            2 => assert_eq!(kb.add_witness(&space, RingSpec::Z, &sphere_model(2).unwrap(), None).unwrap(), rat(2)),
            _ => {
                let model = sphere_model(d).unwrap();
                assert_eq!(kb.add_witness(&space, RingSpec::Z, &model, None).unwrap(), rat(d as i64 + 2));
                let v = rat(if d % 2 == 0 { 2 } else { 1 });
                kb.add_fact(&space, RingSpec::Z, Some(v.clone()), Some(v), "cited: sphere value").unwrap();
            }
        }
        let rel = if d % 2 == 0 { Relation::EvenClosed { space: space.clone() } } else { Relation::Closed { space: space.clone() } };
        kb.add_relation(rel).unwrap();
        kb.propagate().unwrap();
        let expected = if d % 2 == 0 { 2 } else { 1 };
        for p in [2, 3, 5, 7] {
            exact(&kb, &space, RingSpec::zp(p), expected);
            exact(&kb, &space, RingSpec::qp(p), expected);
        }
    }
}

#[test]
fn contradictions_name_their_rules() {
    let mut kb = KnowledgeBase::with_default_primes();
    kb.add_fact("X", RingSpec::Z, None, Some(rat(1)), "cited: too small").unwrap();
    kb.add_relation(Relation::EvenClosed { space: "X".into() }).unwrap();
    match kb.propagate() {
        Err(SvolError::Contradiction { trace, .. }) => {
            assert!(trace.contains("closed-lower"), "{trace}");
            assert!(trace.contains("seed"), "{trace}");
        }
        other => panic!("expected a contradiction, got {other:?}"),
    }
}

#[test]
fn tables_are_sorted_and_replayable() {
    let empty = KnowledgeBase::with_default_primes();
    assert!(empty.export_table().rows.is_empty());
    let mut one = KnowledgeBase::with_default_primes();
    one.add_fact("M", RingSpec::fp(3), Some(rat(1)), None, "cited").unwrap();
    assert_eq!(one.export_table().rows.len(), 1);

    let mut kb = projective(3);
    kb.propagate().unwrap();
    let table = kb.export_table();
    let keys: Vec<(String, String)> = table.rows.iter().map(|r| (r.space.clone(), r.ring.to_string())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    table.replay_all().unwrap();
    for id in 0..table.steps.len() {
        replay(&table.steps, id).unwrap();
    }

    // the facts document rebuilds the same table
    let mut again = KnowledgeBase::from_json(&kb.to_json()).unwrap();
    again.propagate().unwrap();
    let rows = |t: &Table| t.rows.iter().map(|r| (r.space.clone(), r.ring, r.interval.lo.clone(), r.interval.hi.clone())).collect::<Vec<_>>();
    assert_eq!(rows(&again.export_table()), rows(&table));
}

#[test]
fn tampered_steps_do_not_replay() {
    let mut kb = projective(3);
    kb.propagate().unwrap();
    let mut table = kb.export_table();
    let target = table.steps.iter().position(|s| matches!(s.derivation, Derivation::Scaled { .. })).unwrap();
    table.steps[target].value += rat(1);
    assert!(replay(&table.steps, target).is_err());
}

#[test]
fn products_betti_numbers_and_certificates() {
    let mut kb = KnowledgeBase::new([2, 3]).unwrap();
    for s in ["S1a", "S1b"] {
        kb.add_fact(s, RingSpec::fp(2), Some(rat(1)), Some(rat(1)), "cited").unwrap();
        kb.add_relation(Relation::Closed { space: s.into() }).unwrap();
        kb.add_relation(Relation::Dim { space: s.into(), d: 1 }).unwrap();
    }
    kb.add_relation(Relation::Product { product: "T".into(), left: "S1a".into(), right: "S1b".into() }).unwrap();
    kb.add_relation(Relation::Betti { space: "T".into(), n: 1, field: RingSpec::fp(2), value: 2 }).unwrap();
    kb.propagate().unwrap();
    exact(&kb, "T", RingSpec::fp(2), 2);
    assert_eq!(kb.interval("T", RingSpec::zp(2)).lo, rat(2));

    let torus = torus_model();
    let mut kb = KnowledgeBase::new([2, 3]).unwrap();
    let bad = kb.add_certificate(&torus);
    assert!(bad.is_empty());
    let id = torus.content_hash();
    kb.add_fact(&id, RingSpec::Q.trivial(), Some(rat(2)), Some(rat(2)), "model minimum").unwrap();
    kb.propagate().unwrap();
    for p in [2, 3] {
        exact(&kb, &id, RingSpec::fp(p), 2);
        exact(&kb, &id, RingSpec::qp(p), 2);
    }
}

#[test]
fn separations_are_reported_not_assumed() {
    let mut kb = KnowledgeBase::new([2]).unwrap();
    kb.add_fact("X", RingSpec::qp(2), None, Some(rat(2)), "cited").unwrap();
    kb.add_fact("X", RingSpec::zp(2), Some(rat(3)), None, "cited").unwrap();
    kb.propagate().unwrap();
    let seps = kb.separations();
    assert_eq!(seps.len(), 1);
    assert_eq!((seps[0].kind, seps[0].gap.clone()), ("Qp<Zp", rat(1)));
}

#[test]
fn malformed_documents_name_the_path() {
    let doc = serde_json::json!({"facts": [{"space": "M", "ring": "Zp:4", "hi": "1"}]});
    match KnowledgeBase::from_json(&doc) {
        Err(SvolError::Input { path, .. }) => assert_eq!(path.to_string_lossy(), "$.facts[0].ring"),
        other => panic!("{other:?}"),
    }
    let doc = serde_json::json!({"relations": [{"kind": "warp", "space": "M"}]});
    assert!(matches!(KnowledgeBase::from_json(&doc), Err(SvolError::Input { .. })));
}

const TORUS_RINGS: [&str; 8] = ["Z", "Q", "triv:Q", "Fp:2", "Zp:2", "Qp:3", "Zp:3", "Fp:3"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Seeds around the true torus value 2 never contradict, and propagation
    /// only shrinks them while keeping 2 inside.
    #[test]
    fn torus_seeds_shrink_consistently(
        seeds in prop::collection::vec((0usize..8, 0i64..=2, prop::option::of(2i64..=6)), 0..8),
        even in any::<bool>(),
    ) {
        let mut kb = KnowledgeBase::new([2, 3]).unwrap();
        let mut seeded = Vec::new();
        for (i, lo, hi) in seeds {
            let ring = parse_ring_spec(TORUS_RINGS[i]).unwrap();
            kb.add_fact("T2", ring, Some(rat(lo)), hi.map(rat), "seed").unwrap();
            seeded.push(ring);
        }
        if even {
            kb.add_relation(Relation::EvenClosed { space: "T2".into() }).unwrap();
        }
        let before: Vec<Interval> = seeded.iter().map(|r| kb.interval("T2", *r)).collect();
        kb.propagate().unwrap();
        for (r, old) in seeded.iter().zip(&before) {
            let new = kb.interval("T2", *r);
            prop_assert!(new.lo >= old.lo);
            let narrower = match (&new.hi, &old.hi) {
                (Some(a), Some(b)) => a <= b,
                (_, None) => true,
                (None, Some(_)) => false,
            };
            prop_assert!(narrower);
        }
        for ring in TORUS_RINGS {
            let iv = kb.interval("T2", parse_ring_spec(ring).unwrap());
            prop_assert!(iv.lo <= rat(2));
            prop_assert!(iv.hi.map_or(true, |h| h >= rat(2)));
        }
        prop_assert!(kb.export_table().replay_all().is_ok());
    }
}
