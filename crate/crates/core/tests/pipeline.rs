//! End-to-end runs of the testers on fixtures.

use condtest::adaptive::{test_identity_adaptive, AdaptiveParams};
use condtest::learner::{even_uniblock_distance, test_label_invariant, LabelInvariantParams, LearnParams};
use condtest::rng::seeded;
use condtest::{fixture, Distribution, SimulatedOracle};

#[test]
fn label_invariant_tester_separates_uniblock_parities() {
    let learn = LearnParams::new(0.9, 1.0 / 3.0)
        .unwrap()
        .with_scale(0.02)
        .with_estimator_scale(1e-8);
    let params = LabelInvariantParams::new(learn);
    let (mut accepted, mut rejected) = (0, 0);
    for seed in 0..6u64 {
        let even = fixture::parse(&format!("uniblock-even:256:{seed}")).unwrap();
        let odd = fixture::parse(&format!("uniblock-odd:256:{seed}")).unwrap();
        assert_eq!(even_uniblock_distance(&even), 0.0);
        assert!(even_uniblock_distance(&odd) >= 0.5);
        let (v, _) = test_label_invariant(
            SimulatedOracle::new(even, seed),
            even_uniblock_distance,
            &params,
            &mut seeded(seed),
        )
        .unwrap();
        accepted += v.is_accept() as usize;
        let (v, _) = test_label_invariant(
            SimulatedOracle::new(odd, seed),
            even_uniblock_distance,
            &params,
            &mut seeded(seed),
        )
        .unwrap();
        rejected += !v.is_accept() as usize;
    }
    assert!(accepted >= 5 && rejected >= 5, "{accepted} {rejected}");
}

#[test]
fn adaptive_identity_on_skewed_known_distributions() {
    let params = AdaptiveParams::new(0.5, 1.0 / 3.0)
        .unwrap()
        .with_recursion_threshold(16);
    let known = fixture::parse("zipf:256:1").unwrap();
    let far = Distribution::uniform(256);
    let (mut accepted, mut rejected) = (0, 0);
    for seed in 0..10u64 {
        let mut o = SimulatedOracle::new(known.clone(), seed);
        accepted += test_identity_adaptive(&mut o, &known, &params, &mut seeded(seed))
            .unwrap()
            .is_accept() as usize;
        let mut o = SimulatedOracle::new(far.clone(), seed);
        rejected += !test_identity_adaptive(&mut o, &known, &params, &mut seeded(seed))
            .unwrap()
            .is_accept() as usize;
    }
    assert!(accepted >= 7 && rejected >= 7, "{accepted} {rejected}");
}
