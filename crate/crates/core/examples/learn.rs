//! Learning a distribution up to relabeling.

use condtest::learner::{learn_distribution, min_permutation_tv, LearnParams};
use condtest::rng::seeded;
use condtest::{fixture, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let params = LearnParams::new(0.6, 1.0 / 3.0)?
        .with_scale(0.15)
        .with_estimator_scale(1.6e-9);
    println!("s = {} trimming samples at n = 64", params.samples(64));
    for spec in ["uniform:64", "zipf:64:1", "halfheavy:64", "pointmass:64:5"] {
        let mu = fixture::parse(spec)?;
        let r = learn_distribution(SimulatedOracle::new(mu.clone(), 1), &params, &mut seeded(2))?;
        println!(
            "{spec:>15}: tv after relabeling {:.3}, {} queries, {} sentinels",
            min_permutation_tv(&r.dist, &mu)?,
            r.account.total,
            r.sentinels
        );
    }
    Ok(())
}
