//! Non-adaptive testers: every conditioning set is drawn up front, before the
//! first sample.

use condtest::nonadaptive::{
    plan_identity, plan_near_uniformity, test_identity_nonadaptive, test_near_uniformity_nonadaptive, NonAdaptiveParams,
};
use condtest::rng::seeded;
use condtest::{fixture, Distribution, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let params = NonAdaptiveParams::new(0.3, 1.0 / 3.0)?;
    let plan = plan_near_uniformity(1000, &params, &mut seeded(0))?;
    println!(
        "near-uniformity plan at n=1000: {} collision sets, final set of {} elements, {} samples",
        plan.collision.len(),
        plan.identity.set.len(),
        plan.total_samples()
    );
    let u = Distribution::uniform(1000);
    for spec in ["uniform:1000", "halfheavy:1000"] {
        let mut o = SimulatedOracle::new(fixture::parse(spec)?, 1);
        let v = test_near_uniformity_nonadaptive(&mut o, &u, &params, &mut seeded(0))?;
        println!("{spec:>15}: {}", v.decision.as_str());
    }

    let known = fixture::parse("zipf:256:0.3")?;
    let params = NonAdaptiveParams::new(0.5, 1.0 / 3.0)?;
    let plan = plan_identity(&known, &params, &mut seeded(5))?;
    println!(
        "identity plan: {} buckets tested, {} sets declared",
        plan.tested_buckets(),
        plan.sets().len()
    );
    for spec in ["zipf:256:0.3", "uniform:256"] {
        let mut o = SimulatedOracle::new(fixture::parse(spec)?, 2);
        let v = test_identity_nonadaptive(&mut o, &known, &params, &mut seeded(5))?;
        println!(
            "{spec:>15} vs known: {} after {} samples",
            v.decision.as_str(),
            v.account.total
        );
    }
    Ok(())
}
