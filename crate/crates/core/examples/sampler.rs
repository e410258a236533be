//! The explicit persistent sampler: samples that carry their own probability,
//! from one distribution fixed by the ratio tree.

use condtest::rng::seeded;
use condtest::sampler::{SamplerParams, SamplerSession};
use condtest::{fixture, CondOracle, SimulatedOracle};

fn main() -> condtest::Result<()> {
    let mu = fixture::parse("zipf:100:1")?;
    let oracle = SimulatedOracle::new(mu.clone(), 7);
    let params = SamplerParams::new(0.2, 0.1, 1000).with_scale(1e-4);
    println!("per-node samples: {}", params.node_samples(7));
    let mut session = SamplerSession::new(oracle, params, seeded(8))?;
    for _ in 0..8 {
        let s = session.sample()?;
        println!(
            "element {:>3}  reported {:.5}  true {:.5}",
            s.index,
            s.eta,
            mu.prob(s.index)
        );
    }
    // The tree is filled in lazily; later samples are mostly free.
    println!("queries per run: {:?}", session.queries_per_run());
    println!("total queries: {}", session.oracle().account().total);
    Ok(())
}
