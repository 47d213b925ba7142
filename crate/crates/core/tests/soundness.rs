mod common;

use common::{brute_force, element_bound, min_modulus, rational_in, Exact, Oracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srs_lab::certified::decide_point;
use srs_lab::regions::Rule;
use srs_lab::{classify, Status, Verdict};

/// Sampling box for each positive rule.
const BOXES: &[(Rule, [f64; 4])] = &[
    (Rule::RealRootsAboveOne, [4.0, 10.0, -10.0, -4.0]),
    (Rule::SumBelowMinusTwo, [-6.0, 2.0, -6.0, 0.0]),
    (Rule::NegativeConstantTerm, [-6.0, 0.0, 1.0, 7.0]),
    (Rule::SectorTransitions, [0.0, 4.0, 1.0, 6.0]),
    (Rule::SmallCycleBound, [2.9, 8.0, -5.0, 8.0]),
    (Rule::AlternatingStrip, [2.0, 8.0, 3.0, 9.0]),
    (Rule::WitnessSearch, [1.0, 4.0, -4.0, 4.0]),
];

/// Largest element bound the brute-force search is run for.
const MAX_BOUND: f64 = 40.0;

#[test]
fn positive_rules_have_no_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for &(rule, [a, b, c, d]) in BOXES {
        let mut checked = 0;
        let mut tries = 0;
        while checked < 100 {
            tries += 1;
            assert!(tries < 200_000, "{rule:?}: only {checked} samples");
            let e = Exact::from_rationals(rational_in(&mut rng, a, b, 12), rational_in(&mut rng, c, d, 12));
            let v = classify(&e.param()).unwrap();
            if v.rule() != Some(rule) {
                continue;
            }
            let (r0, r1) = e.f64s();
            if !element_bound(r0, r1).is_some_and(|x| x <= MAX_BOUND) {
                continue;
            }
            let b = element_bound(r0, r1).unwrap().ceil() as usize;
            let budget = (2 * b + 1).pow(2) + 1;
            assert_eq!(
                brute_force(&e, budget),
                Some(Oracle::NoCycle),
                "{rule:?} at ({r0}, {r1})"
            );
            checked += 1;
        }
    }
}

#[test]
fn leftover_band_agrees_with_certified_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let mut checked = 0;
    while checked < 40 {
        let e = Exact::from_rationals(rational_in(&mut rng, 1.0, 3.0, 10), rational_in(&mut rng, -3.0, 3.0, 10));
        let (r0, r1) = e.f64s();
        let v = classify(&e.param()).unwrap();
        if v.rule() != Some(Rule::WitnessSearch) || min_modulus(r0, r1) < 1.02 {
            continue;
        }
        assert_eq!(decide_point(&e.param()).unwrap().status(), Status::InDStar, "({r0}, {r1})");
        checked += 1;
    }
}

#[test]
fn cycle_rules_report_real_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = 0;
    for _ in 0..5000 {
        let e = Exact::from_rationals(rational_in(&mut rng, -3.0, 3.0, 8), rational_in(&mut rng, -3.0, 3.0, 8));
        if let Verdict::NotInDStar { cycle, .. } = classify(&e.param()).unwrap() {
            let c = cycle.entries();
            let n = c.len();
            let mut a = (c[0], c[1 % n]);
            for k in 0..n {
                let next = e.step(a);
                assert_eq!(next.1, c[(k + 2) % n], "{cycle} fails at {:?}", e.f64s());
                a = next;
            }
            seen += 1;
        }
    }
    assert!(seen > 500);
}

#[test]
fn oracle_finds_known_cycles() {
    let e = Exact::from_rationals(common::q(6, 5), common::q(-3, 2));
    assert_eq!(brute_force(&e, 10_000), Some(Oracle::Cycle(vec![1])));
    let e = Exact::from_rationals(common::q(3, 2), common::q(0, 1));
    assert_eq!(brute_force(&e, 10_000), Some(Oracle::NoCycle));
    // (6, -5): the bound is below one, so only the origin survives
    let e = Exact::from_rationals(common::q(6, 1), common::q(-5, 1));
    assert_eq!(brute_force(&e, 10_000), Some(Oracle::NoCycle));
    let e = Exact::from_rationals(common::q(1, 1), common::q(0, 1));
    assert_eq!(brute_force(&e, 10_000), None);
}
