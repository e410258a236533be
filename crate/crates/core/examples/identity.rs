//! Adaptive identity testing against a known, skewed distribution.

use condtest::adaptive::{max_recursion_depth, test_identity_adaptive, trace_depth, AdaptiveParams};
use condtest::rng::seeded;
use condtest::{fixture, tv_distance, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let known = fixture::parse("zipf:4096:1")?;
    // Recurse on anything above 64 elements so the bucket structure shows.
    let params = AdaptiveParams::new(0.5, 1.0 / 3.0)?.with_recursion_threshold(64);
    println!("recursion limit for n = 4096: {}", max_recursion_depth(4096));

    for spec in ["zipf:4096:1", "zipf:4096:1.3", "uniform:4096"] {
        let unknown = fixture::parse(spec)?;
        let distance = tv_distance(&unknown, &known)?;
        let mut oracle = SimulatedOracle::new(unknown, 3);
        let v = test_identity_adaptive(&mut oracle, &known, &params, &mut seeded(4))?;
        println!(
            "{spec:>14} (tv {distance:.3}): {:6} samples {:>12} depth {}",
            v.decision.as_str(),
            v.account.total,
            trace_depth(&v.trace)
        );
    }
    Ok(())
}
