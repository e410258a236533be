//! Testing label-invariant properties by learning, and comparing two unknown
//! distributions up to relabeling.

use condtest::learner::{
    even_uniblock_distance, test_identity_up_to_relabeling, test_label_invariant, uniformity_distance,
    LabelInvariantParams, LearnParams,
};
use condtest::rng::seeded;
use condtest::{fixture, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let learn = LearnParams::new(0.6, 1.0 / 3.0)?
        .with_scale(0.05)
        .with_estimator_scale(1e-8);
    let params = LabelInvariantParams::new(learn);

    // "Is it uniform?" as a label-invariant property.
    for spec in ["uniform:32", "halfheavy:32"] {
        let o = SimulatedOracle::new(fixture::parse(spec)?, 3);
        let (v, r) = test_label_invariant(o, uniformity_distance, &params, &mut seeded(4))?;
        println!(
            "{spec:>13}: {} (learned distance {:.3})",
            v.decision.as_str(),
            uniformity_distance(&r.dist)
        );
    }

    // "Is it uniform on 4^k elements for some k?"
    for spec in ["uniblock-even:256:1", "uniblock-odd:256:1"] {
        let o = SimulatedOracle::new(fixture::parse(spec)?, 5);
        let (v, _) = test_label_invariant(o, even_uniblock_distance, &params, &mut seeded(6))?;
        println!("{spec:>19}: {}", v.decision.as_str());
    }

    // Two unknown distributions that differ only by a relabeling.
    let a = fixture::parse("zipf:32:1")?;
    let perm: Vec<usize> = (0..32).rev().collect();
    let b = a.permuted(&perm)?;
    let learn = LearnParams::new(0.9, 1.0 / 3.0)?
        .with_scale(0.05)
        .with_estimator_scale(1e-8);
    let (v, gap) = test_identity_up_to_relabeling(
        SimulatedOracle::new(a, 7),
        SimulatedOracle::new(b, 8),
        &learn,
        &mut seeded(9),
    )?;
    println!("zipf vs reversed zipf: {} (learned gap {gap:.3})", v.decision.as_str());
    Ok(())
}
