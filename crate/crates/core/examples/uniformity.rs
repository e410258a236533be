//! Adaptive uniformity testing: the number of conditional samples is the
//! same whatever the domain size.

use condtest::adaptive::{near_uniformity_budget, test_near_uniformity, AdaptiveParams};
use condtest::rng::seeded;
use condtest::{fixture, Distribution, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let params = AdaptiveParams::new(0.3, 1.0 / 3.0)?;
    let budget = near_uniformity_budget(&params)?;
    println!(
        "budget: {} unconditioned + {} conditional samples",
        budget.k, budget.primitive_samples
    );

    for spec in ["uniform:1000", "halfheavy:1000", "uniform:1000000", "zipf:100000:0.5"] {
        let mu = fixture::parse(spec)?;
        let n = mu.len();
        let mut oracle = SimulatedOracle::new(mu, 1);
        let v = test_near_uniformity(&mut oracle, &Distribution::uniform(n), &params, &mut seeded(2))?;
        println!(
            "{spec:>18}: {:6} after {} samples",
            v.decision.as_str(),
            v.account.total
        );
    }
    Ok(())
}
